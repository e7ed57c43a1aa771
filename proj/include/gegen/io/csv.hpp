#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gegen/num/dense.hpp"

namespace gegen::io {

// Parses a headerless rectangular numeric CSV. Throws IngestError naming the
// 1-based (row, col) of the first ragged row, non-numeric or non-finite cell.
num::DenseMatrix parse_matrix_csv(std::istream& in, const std::string& source = "<stream>");
num::DenseMatrix read_matrix_csv(const std::filesystem::path& path);

// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double v);

void write_matrix_csv(std::ostream& out, const num::DenseMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const num::DenseMatrix& m);

// Opens path for writing, creating parent directories; throws IngestError on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace gegen::io
