#pragma once

#include <string>

#include "scaffold/types.hpp"

namespace scaffold {

enum class CloudFormat { PlyAscii, PlyBinary, Xyz };

/// Input format selector; Auto dispatches on extension with a PLY magic sniff.
enum class LoadFormat { Auto, Ply, Xyz };

/// Load a cloud from disk. ".ply" files may be ASCII or binary little
/// endian; anything else is read as whitespace-separated XYZ lines ('#'
/// comments and blank lines ignored). Errors carry the path and the line or
/// byte offset of the failure.
PointCloud load_cloud(const std::string& path, LoadFormat format = LoadFormat::Auto);

/// Save a cloud. PLY vertices are written as float64 x/y/z plus uint8
/// red/green/blue when colors are present; XYZ drops colors with a warning
/// on stderr. ASCII floats use %.17g so values round-trip exactly.
void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format);

/// Format implied by a file name: ".xyz" -> Xyz, everything else PLY binary.
CloudFormat format_for_path(const std::string& path);

}  // namespace scaffold
