#pragma once

#include <string>

#include "slicedot/geometry.hpp"

namespace slicedot {

// Shortest round-trip decimal form of a double; deterministic, suitable
// for byte-compared CSV/JSON output.
std::string format_double(double v);

// Headerless CSV, one point per row. With `weighted`, the trailing
// column is a per-point weight (renormalized to sum to 1).
PointCloud read_cloud_csv(const std::string& path, bool weighted);

void write_cloud_csv(const std::string& path, const PointCloud& cloud, bool weighted);

// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit hash, hex-encoded; used as a content fingerprint in
// experiment manifests.
std::string content_hash(const std::string& content);

}  // namespace slicedot
