#pragma once

#include <cstddef>
#include <vector>

#include "gegen/num/dense.hpp"

namespace gegen::num {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix. Column indices are strictly increasing
// within each row; duplicates are summed at construction time.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values);

  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(const std::vector<double>& diag);
  // Entries with |value| == 0 are dropped.
  static SparseMatrix from_dense(const DenseMatrix& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return offsets_; }
  const std::vector<std::size_t>& col_indices() const { return cols_idx_; }
  const std::vector<double>& values() const { return values_; }

  // Returns 0 for structurally absent entries.
  double at(std::size_t i, std::size_t j) const;

  SparseMatrix transposed() const;
  DenseMatrix to_dense() const;
  bool is_symmetric(double tol = 0.0) const;

  // this * alpha + other * beta (patterns merged).
  SparseMatrix linear_combination(double alpha, const SparseMatrix& other, double beta) const;
  SparseMatrix scaled(double s) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> cols_idx_;
  std::vector<double> values_;
};

// s * d, cost O(nnz(s) * d.cols()).
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d);
// d * s, cost O(nnz(s) * d.rows()).
DenseMatrix dense_sparse(const DenseMatrix& d, const SparseMatrix& s);
// s^T * d without forming the transpose.
DenseMatrix spmm_transposed(const SparseMatrix& s, const DenseMatrix& d);

}  // namespace gegen::num
