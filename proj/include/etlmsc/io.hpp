#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "etlmsc/tensor.hpp"

namespace etlmsc {

/// Headerless CSV, one row per line, '.' decimal point. Rows must all have the
/// same number of fields. Errors name the file and line.
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Writes with shortest round-trip formatting, so reading back is bit-exact.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// One base-10 integer per line; blank trailing lines are ignored.
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

}  // namespace etlmsc
