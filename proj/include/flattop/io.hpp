#pragma once

#include <Eigen/Dense>
#include <istream>
#include <optional>
#include <string>

#include "flattop/kernels.hpp"
#include "flattop/sample.hpp"

namespace flattop {

/// CSV with columns `time[,event]`. A header row is optional (detected by a
/// non-numeric first field); event accepts 0/1/true/false and defaults to 1.
/// Blank lines and lines starting with '#' are skipped. Errors name the
/// 1-based line.
CensoredSample parse_sample_csv(std::istream& in);

/// JSON: an array of times, an array of {"time", "event"} objects, or an
/// object {"time": [...], "event": [...]}.
CensoredSample parse_sample_json(const std::string& text);

/// Dispatches on the extension (.json, anything else is CSV).
CensoredSample read_sample(const std::string& path);

/// "min:max:count" (inclusive, equispaced) or a comma-separated list.
Eigen::VectorXd parse_grid_spec(const std::string& spec);

/// Comma-separated positive integers, e.g. "15,30".
std::vector<int> parse_int_list(const std::string& spec);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

/// Kernel table cached in a JSON file keyed by (family, c, b, tol). A hit
/// is returned as stored; a miss builds the table and appends it to the
/// file. Without a path this is build_table.
KernelTable cached_table(const FlatTopSpec& spec, double tol, const std::optional<std::string>& cache_path);

}  // namespace flattop
