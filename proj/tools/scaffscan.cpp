// scaffscan: scaffold inspection pipeline over point-cloud scans.
//
// Subcommands compose the workflow piecewise (preprocess, register, deviate,
// graph) or run it end to end (inspect); synth generates labeled test
// scenes. Exit codes: 0 success, 1 usage/configuration error, 2 pipeline
// failure (the diagnostic names the failing stage).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "scaffold/cloud_io.hpp"
#include "scaffold/config.hpp"
#include "scaffold/pipeline.hpp"
#include "scaffold/synth.hpp"

namespace fs = std::filesystem;
using scaffold::PipelineConfig;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string output_dir;
    bool has_seed = false;
    std::uint64_t seed = 0;
    bool emit_effective_config = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    cmd->add_option("--set", args.sets, "override a config key, e.g. --set icp.max_iterations=80")
        ->take_all();
    cmd->add_option("--output-dir", args.output_dir, "directory for all outputs");
    cmd->add_option("--seed", args.seed, "seed for all randomized stages")
        ->check(CLI::NonNegativeNumber)
        ->each([&args](const std::string&) { args.has_seed = true; });
    cmd->add_flag("--emit-effective-config", args.emit_effective_config,
                  "write the fully resolved configuration to <output-dir>/effective_config.cfg");
}

PipelineConfig resolve_config(const CommonArgs& args, const std::string& extra_file = "") {
    PipelineConfig config;
    if (!args.config_path.empty()) scaffold::load_config_file(config, args.config_path);
    if (!extra_file.empty()) scaffold::load_config_file(config, extra_file);
    for (const auto& s : args.sets) scaffold::apply_override(config, s);
    if (args.has_seed) config.seed = args.seed;
    if (!args.output_dir.empty()) config.io_output_dir = args.output_dir;
    config.validate();
    return config;
}

fs::path prepare_output_dir(const PipelineConfig& config) {
    fs::path dir(config.io_output_dir);
    fs::create_directories(dir);
    return dir;
}

void maybe_emit_config(const CommonArgs& args, const PipelineConfig& config, const fs::path& dir) {
    if (!args.emit_effective_config) return;
    std::ofstream out(dir / "effective_config.cfg");
    out << scaffold::emit_config(config);
    if (!out) throw scaffold::StageError("report", "cannot write effective_config.cfg");
}

scaffold::LoadFormat load_format(const PipelineConfig& config) {
    if (config.io_input_format == "ply") return scaffold::LoadFormat::Ply;
    if (config.io_input_format == "xyz") return scaffold::LoadFormat::Xyz;
    return scaffold::LoadFormat::Auto;
}

scaffold::CloudFormat output_format(const PipelineConfig& config) {
    if (config.io_output_format == "ply_ascii") return scaffold::CloudFormat::PlyAscii;
    if (config.io_output_format == "xyz") return scaffold::CloudFormat::Xyz;
    return scaffold::CloudFormat::PlyBinary;
}

scaffold::PointCloud load_stage(const std::string& path, const PipelineConfig& config) {
    try {
        return scaffold::load_cloud(path, load_format(config));
    } catch (const std::exception& e) {
        throw scaffold::StageError("load", e.what());
    }
}

void save_cloud_stage(const scaffold::PointCloud& cloud, const fs::path& path,
                      scaffold::CloudFormat format) {
    try {
        scaffold::save_cloud(cloud, path.string(), format);
    } catch (const std::exception& e) {
        throw scaffold::StageError("save", e.what());
    }
}

void write_json(const nlohmann::ordered_json& j, const fs::path& path) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    if (!out) throw scaffold::StageError("report", "cannot write " + path.string());
}

void write_text(const std::string& text, const fs::path& path) {
    std::ofstream out(path);
    out << text;
    if (!out) throw scaffold::StageError("report", "cannot write " + path.string());
}

int cmd_preprocess(const CommonArgs& args, const std::string& input) {
    PipelineConfig config = resolve_config(args);
    fs::path dir = prepare_output_dir(config);
    maybe_emit_config(args, config, dir);

    scaffold::PointCloud cloud = load_stage(input, config);
    scaffold::PreprocessResult result = scaffold::preprocess_cloud(cloud, config);

    fs::path out_cloud = dir / (std::string("preprocessed.") +
                                (output_format(config) == scaffold::CloudFormat::Xyz ? "xyz" : "ply"));
    save_cloud_stage(result.cloud, out_cloud, output_format(config));

    nlohmann::ordered_json summary = scaffold::preprocess_json(result);
    summary["input"] = input;
    summary["output"] = out_cloud.string();
    write_json(summary, dir / "preprocess.json");
    std::cout << "preprocess: " << cloud.size() << " -> " << result.cloud.size() << " points ("
              << out_cloud.string() << ")\n";
    return 0;
}

int cmd_register(const CommonArgs& args, const std::string& reference,
                 const std::string& current) {
    PipelineConfig config = resolve_config(args);
    fs::path dir = prepare_output_dir(config);
    maybe_emit_config(args, config, dir);

    scaffold::PointCloud ref = load_stage(reference, config);
    scaffold::PointCloud cur = load_stage(current, config);
    scaffold::IcpResult result;
    try {
        result = scaffold::icp(ref, cur, scaffold::icp_params(config));
    } catch (const std::exception& e) {
        throw scaffold::StageError("register", e.what());
    }

    save_cloud_stage(scaffold::apply_transform(cur, result.transform), dir / "aligned.ply",
                     scaffold::CloudFormat::PlyBinary);
    nlohmann::ordered_json summary = scaffold::registration_json(result);
    summary["reference"] = reference;
    summary["current"] = current;
    write_json(summary, dir / "registration.json");
    std::cout << "register: mse " << result.mse << " after " << result.iterations
              << " iterations (converged: " << (result.converged ? "yes" : "no") << ")\n";
    return 0;
}

int cmd_deviate(const CommonArgs& args, const std::string& reference, const std::string& current) {
    PipelineConfig config = resolve_config(args);
    fs::path dir = prepare_output_dir(config);
    maybe_emit_config(args, config, dir);

    scaffold::PointCloud ref = load_stage(reference, config);
    scaffold::PointCloud cur = load_stage(current, config);
    try {
        scaffold::SpatialIndex index(ref.points);
        std::vector<double> distances = scaffold::cloud_distances(cur, index);
        double characteristic_length = scaffold::resolve_characteristic_length(config, nullptr);
        scaffold::DeviationReport report = scaffold::classify_deviation(
            distances, config.deviation_threshold_fraction, characteristic_length);
        scaffold::ChangeMap changes =
            scaffold::change_map(cur, index, scaffold::resolve_match_distance(config));

        scaffold::export_deviation_cloud(cur, report, (dir / "deviation.ply").string());
        scaffold::export_change_cloud(cur, changes, (dir / "changes.ply").string());
        nlohmann::ordered_json summary = {
            {"reference", reference},
            {"current", current},
            {"threshold_fraction", report.threshold_fraction},
            {"characteristic_length", report.characteristic_length},
            {"threshold", report.threshold},
            {"within_count", report.labels.size() - report.exceeding_count},
            {"exceeding_count", report.exceeding_count},
            {"exceeding_fraction", report.exceeding_fraction},
            {"max_distance", report.max_distance},
            {"mean_distance", report.mean_distance},
            {"match_distance", changes.match_distance},
            {"matched_count", changes.matched_count},
            {"modified_count", changes.modified_count}};
        write_json(summary, dir / "deviation.json");
        std::cout << "deviate: " << report.exceeding_count << "/" << report.labels.size()
                  << " points exceed " << report.threshold << " m\n";
    } catch (const scaffold::StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw scaffold::StageError("deviate", e.what());
    }
    return 0;
}

int cmd_graph(const CommonArgs& args, const std::string& input) {
    PipelineConfig config = resolve_config(args);
    fs::path dir = prepare_output_dir(config);
    maybe_emit_config(args, config, dir);

    scaffold::PointCloud cloud = load_stage(input, config);
    scaffold::StructureResult result = scaffold::extract_structure(cloud, config);
    scaffold::save_graph(result.build.graph, (dir / "graph.json").string());
    scaffold::export_element_cloud(cloud, result.classes, (dir / "elements.ply").string());
    nlohmann::ordered_json summary = scaffold::structure_json(result, cloud.size());
    summary["input"] = input;
    write_json(summary, dir / "structure.json");
    std::cout << "graph: " << result.build.graph.nodes.size() << " nodes, "
              << result.build.graph.edges.size() << " edges from " << result.braces.size()
              << " braces\n";
    return 0;
}

int cmd_inspect(const CommonArgs& args, const std::string& reference, const std::string& current) {
    PipelineConfig config = resolve_config(args);
    fs::path dir = prepare_output_dir(config);
    maybe_emit_config(args, config, dir);

    scaffold::PointCloud ref = load_stage(reference, config);
    scaffold::PointCloud cur = load_stage(current, config);
    scaffold::InspectionResult result =
        scaffold::run_inspection(ref, cur, config, reference, current);

    save_cloud_stage(result.aligned, dir / "aligned.ply", scaffold::CloudFormat::PlyBinary);
    try {
        scaffold::export_deviation_cloud(result.aligned, result.deviation,
                                         (dir / "deviation.ply").string());
        scaffold::export_change_cloud(result.aligned, result.changes,
                                      (dir / "changes.ply").string());
        scaffold::save_graph(result.reference_structure.build.graph,
                             (dir / "reference_graph.json").string());
        scaffold::save_graph(result.current_structure.build.graph,
                             (dir / "current_graph.json").string());
        scaffold::export_element_cloud(result.reference_pre.cloud,
                                       result.reference_structure.classes,
                                       (dir / "reference_elements.ply").string());
        scaffold::export_element_cloud(result.aligned, result.current_structure.classes,
                                       (dir / "current_elements.ply").string());
        write_text(scaffold::diff_to_json(result.diff, result.reference_structure.build.graph,
                                          result.current_structure.build.graph),
                   dir / "graph_diff.json");
    } catch (const scaffold::StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw scaffold::StageError("report", e.what());
    }
    write_json(result.report, dir / "report.json");
    std::cout << "inspect: alert " << (result.alert ? "RAISED" : "clear") << " (missing "
              << result.diff.missing_count << ", deviated " << result.diff.deviated_count
              << ", added " << result.diff.added_count << ", exceeding fraction "
              << result.deviation.exceeding_fraction << ")\n";
    return 0;
}

int cmd_synth(const CommonArgs& args, const std::string& spec_file) {
    PipelineConfig config = resolve_config(args, spec_file);
    fs::path dir = prepare_output_dir(config);
    maybe_emit_config(args, config, dir);

    try {
        scaffold::SynthResult result = scaffold::generate_scaffold(scaffold::synth_spec(config));
        scaffold::apply_defects(result, config.defects(), scaffold::synth_spec(config));
        fs::path out_cloud = dir / (std::string("synthetic.") +
                                    (output_format(config) == scaffold::CloudFormat::Xyz ? "xyz" : "ply"));
        scaffold::save_cloud(result.cloud, out_cloud.string(), output_format(config));
        scaffold::save_synth_sidecar(result, (dir / "synthetic_sidecar.json").string());
        scaffold::save_graph(result.graph, (dir / "synthetic_graph.json").string());
        std::cout << "synth: " << result.cloud.size() << " points, "
                  << result.graph.nodes.size() << " nodes, " << result.graph.edges.size()
                  << " edges (" << out_cloud.string() << ")\n";
    } catch (const std::exception& e) {
        throw scaffold::StageError("synth", e.what());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scaffold inspection toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string input, reference, current, spec_file;

    CLI::App* preprocess = app.add_subcommand("preprocess", "clean a scan (voxel, outliers, planes, crop)");
    preprocess->add_option("input", input, "input cloud (.ply or .xyz)")->required();
    add_common(preprocess, common);

    CLI::App* reg = app.add_subcommand("register", "align a current scan onto a reference");
    reg->add_option("reference", reference, "reference cloud")->required();
    reg->add_option("current", current, "current cloud")->required();
    add_common(reg, common);

    CLI::App* deviate = app.add_subcommand("deviate", "per-point deviation of an aligned scan");
    deviate->add_option("reference", reference, "reference cloud")->required();
    deviate->add_option("current", current, "aligned current cloud")->required();
    add_common(deviate, common);

    CLI::App* graph = app.add_subcommand("graph", "extract the scaffold graph from a clean scan");
    graph->add_option("input", input, "input cloud")->required();
    add_common(graph, common);

    CLI::App* inspect = app.add_subcommand("inspect", "full reference-vs-campaign comparison");
    inspect->add_option("reference", reference, "reference (certified) scan")->required();
    inspect->add_option("current", current, "campaign scan")->required();
    add_common(inspect, common);

    CLI::App* synth = app.add_subcommand("synth", "generate a labeled synthetic scaffold scene");
    synth->add_option("spec", spec_file, "scene description (config syntax, synth.* keys)")
        ->required();
    add_common(synth, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (preprocess->parsed()) return cmd_preprocess(common, input);
        if (reg->parsed()) return cmd_register(common, reference, current);
        if (deviate->parsed()) return cmd_deviate(common, reference, current);
        if (graph->parsed()) return cmd_graph(common, input);
        if (inspect->parsed()) return cmd_inspect(common, reference, current);
        if (synth->parsed()) return cmd_synth(common, spec_file);
    } catch (const scaffold::ConfigError& e) {
        std::cerr << "scaffscan: config: " << e.what() << "\n";
        return 1;
    } catch (const scaffold::StageError& e) {
        std::cerr << "scaffscan: " << e.stage << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "scaffscan: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
