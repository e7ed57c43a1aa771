#include "gegen/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "gegen/num/errors.hpp"

namespace gegen::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

num::DenseMatrix parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::size_t col = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      std::string_view cell = trim(rest.substr(0, comma));
      ++col;
      double v = 0.0;
      const auto* first = cell.data();
      const auto* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (cell.empty() || ec != std::errc() || ptr != last) {
        throw IngestError(source + ": non-numeric cell '" + std::string(cell) + "' at (row " +
                          std::to_string(line_no) + ", column " + std::to_string(col) + ")");
      }
      if (!std::isfinite(v)) {
        throw IngestError(source + ": non-finite value at (row " + std::to_string(line_no) +
                          ", column " + std::to_string(col) + ")");
      }
      data.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = col;
    } else if (col != cols) {
      throw IngestError(source + ": ragged row " + std::to_string(line_no) + " has " +
                        std::to_string(col) + " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  return num::DenseMatrix(rows, cols, std::move(data));
}

num::DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  return parse_matrix_csv(in, path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_matrix_csv(std::ostream& out, const num::DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write '" + path.string() + "'");
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const num::DenseMatrix& m) {
  auto out = open_output(path);
  write_matrix_csv(out, m);
}

}  // namespace gegen::io
