// Parallel kernels vs. their serial reference implementations on a
// synthetic scaffold scene. Run with --benchmark_time_unit=ms.

#include <benchmark/benchmark.h>

#include "scaffold/deviation.hpp"
#include "scaffold/features.hpp"
#include "scaffold/filters.hpp"
#include "scaffold/kdtree.hpp"
#include "scaffold/synth.hpp"
#include "serial_ref.hpp"

namespace {

scaffold::PointCloud make_scene(double points_per_meter) {
    scaffold::ScaffoldSpec spec;
    spec.bays_x = 2;
    spec.bays_y = 1;
    spec.lifts = 2;
    spec.points_per_meter = points_per_meter;
    spec.seed = 7;
    return scaffold::generate_scaffold(spec).cloud;
}

const scaffold::PointCloud& scene() {
    static scaffold::PointCloud cloud = make_scene(500.0);
    return cloud;
}

const scaffold::PointCloud& small_scene() {
    static scaffold::PointCloud cloud = make_scene(60.0);
    return cloud;
}

void BM_voxel_parallel(benchmark::State& state) {
    const auto& cloud = scene();
    for (auto _ : state) benchmark::DoNotOptimize(scaffold::voxel_downsample(cloud, 0.02));
}
BENCHMARK(BM_voxel_parallel);

void BM_voxel_serial_ref(benchmark::State& state) {
    const auto& cloud = scene();
    for (auto _ : state) benchmark::DoNotOptimize(scaffref::voxel_serial(cloud, 0.02));
}
BENCHMARK(BM_voxel_serial_ref);

void BM_cloud_distances_parallel(benchmark::State& state) {
    const auto& cloud = scene();
    scaffold::SpatialIndex index(cloud);
    for (auto _ : state) benchmark::DoNotOptimize(scaffold::cloud_distances(cloud, index));
}
BENCHMARK(BM_cloud_distances_parallel);

void BM_cloud_distances_serial_ref(benchmark::State& state) {
    const auto& cloud = small_scene();
    for (auto _ : state)
        benchmark::DoNotOptimize(scaffref::cloud_distances_serial(cloud.points, cloud.points));
}
BENCHMARK(BM_cloud_distances_serial_ref);

void BM_outlier_filter_parallel(benchmark::State& state) {
    const auto& cloud = scene();
    for (auto _ : state)
        benchmark::DoNotOptimize(scaffold::remove_statistical_outliers(cloud, 12, 2.0));
}
BENCHMARK(BM_outlier_filter_parallel);

void BM_outlier_filter_serial_ref(benchmark::State& state) {
    const auto& cloud = small_scene();
    for (auto _ : state)
        benchmark::DoNotOptimize(scaffref::outlier_keep_serial(cloud.points, 12, 2.0));
}
BENCHMARK(BM_outlier_filter_serial_ref);

void BM_shape_features(benchmark::State& state) {
    const auto& cloud = scene();
    scaffold::SpatialIndex index(cloud);
    for (auto _ : state)
        benchmark::DoNotOptimize(scaffold::shape_features(cloud, index, 0.10, 8));
}
BENCHMARK(BM_shape_features);

}  // namespace

BENCHMARK_MAIN();
