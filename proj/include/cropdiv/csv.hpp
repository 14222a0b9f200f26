#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cropdiv/types.hpp"

namespace cropdiv {

/// Shortest decimal string that round-trips the double (std::to_chars).
std::string format_double(double value);

/// Formats an optional metric for CSV: absent values become empty fields.
std::string format_optional(const std::optional<double>& value);

/// Class scheme CSV with header `code,label`; row order defines the class
/// index. The label is everything after the first comma (labels may contain
/// commas); surrounding double quotes are stripped.
ClassScheme read_class_scheme_csv(const std::filesystem::path& path);

/// Covariate table CSV with header `region,value`. Duplicate region keys are
/// an error.
std::vector<std::pair<std::string, double>> read_covariates_csv(const std::filesystem::path& path);

/// Reference profile CSV with header `scale,gamma`, scale in block factors.
std::map<int, double> read_reference_csv(const std::filesystem::path& path);

} // namespace cropdiv
