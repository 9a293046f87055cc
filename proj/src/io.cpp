#include "etlmsc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace etlmsc {
namespace {

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& what,
                           std::size_t line = 0) {
  std::ostringstream msg;
  msg << path.string();
  if (line > 0) msg << ":" << line;
  msg << ": " << what;
  throw Error(ErrorCode::kIo, msg.str());
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) io_error(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "cannot open for writing");
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    Index count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = row.find(',', pos);
      const std::string_view field =
          trim(row.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      double v = 0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        io_error(path, "malformed number '" + std::string(field) + "'", lineno);
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (cols < 0) cols = count;
    if (count != cols) {
      io_error(path, "expected " + std::to_string(cols) + " fields, found " + std::to_string(count),
               lineno);
    }
    ++rows;
  }
  if (rows == 0) io_error(path, "no data rows");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = values[static_cast<std::size_t>(i * cols + j)];
  }
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += format_double(m(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) io_error(path, "write failed");
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view field = trim(line);
    if (field.empty()) continue;
    int v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      io_error(path, "malformed label '" + std::string(field) + "'", lineno);
    }
    if (v < 0) io_error(path, "labels must be nonnegative", lineno);
    labels.push_back(v);
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream out = open_out(path);
  for (int v : labels) out << v << '\n';
  if (!out) io_error(path, "write failed");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) io_error(path, "write failed");
}

}  // namespace etlmsc
