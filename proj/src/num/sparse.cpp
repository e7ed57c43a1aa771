#include "gegen/num/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gegen/num/errors.hpp"

namespace gegen::num {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(row_offsets)),
      cols_idx_(std::move(col_indices)),
      values_(std::move(values)) {
  if (offsets_.size() != rows_ + 1 || offsets_.front() != 0) {
    throw ShapeError("SparseMatrix: row offsets must have rows+1 entries starting at 0");
  }
  if (cols_idx_.size() != values_.size() || offsets_.back() != values_.size()) {
    throw ShapeError("SparseMatrix: nnz does not match last offset");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (offsets_[i] > offsets_[i + 1]) throw ShapeError("SparseMatrix: offsets not monotone");
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      if (cols_idx_[p] >= cols_) throw ShapeError("SparseMatrix: column index out of range");
      if (p > offsets_[i] && cols_idx_[p] <= cols_idx_[p - 1]) {
        throw ShapeError("SparseMatrix: column indices not strictly increasing in row " +
                         std::to_string(i));
      }
      if (!std::isfinite(values_[p])) throw DomainError("SparseMatrix: non-finite value");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw ShapeError("from_triplets: index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(rows + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> vals;
  idx.reserve(triplets.size());
  vals.reserve(triplets.size());
  std::size_t prev_row = rows;
  for (const auto& t : triplets) {
    if (!idx.empty() && prev_row == t.row && idx.back() == t.col) {
      vals.back() += t.value;
      continue;
    }
    idx.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
    prev_row = t.row;
  }
  for (std::size_t i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(rows, cols, std::move(offsets), std::move(idx), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  return diagonal(std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::diagonal(const std::vector<double>& diag) {
  const std::size_t n = diag.size();
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = i + 1;
    idx[i] = i;
  }
  return SparseMatrix(n, n, std::move(offsets), std::move(idx), diag);
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d(i, j) != 0.0) t.push_back({i, j, d(i, j)});
  return from_triplets(d.rows(), d.cols(), std::move(t));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = cols_idx_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = cols_idx_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_idx_.begin())];
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<std::size_t> offsets(cols_ + 1, 0);
  for (std::size_t c : cols_idx_) ++offsets[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) offsets[j + 1] += offsets[j];
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<std::size_t> idx(nnz());
  std::vector<double> vals(nnz());
  // Row-major traversal keeps the transposed column indices sorted.
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      const std::size_t dst = cursor[cols_idx_[p]]++;
      idx[dst] = i;
      vals[dst] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(idx), std::move(vals));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) out(i, cols_idx_[p]) = values_[p];
  return out;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
      if (std::abs(values_[p] - at(cols_idx_[p], i)) > tol) return false;
    }
  }
  return true;
}

SparseMatrix SparseMatrix::linear_combination(double alpha, const SparseMatrix& other,
                                              double beta) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw ShapeError("linear_combination: shape mismatch");
  }
  std::vector<std::size_t> offsets(rows_ + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> vals;
  for (std::size_t i = 0; i < rows_; ++i) {
    std::size_t p = offsets_[i];
    std::size_t q = other.offsets_[i];
    const std::size_t pe = offsets_[i + 1];
    const std::size_t qe = other.offsets_[i + 1];
    while (p < pe || q < qe) {
      if (q == qe || (p < pe && cols_idx_[p] < other.cols_idx_[q])) {
        idx.push_back(cols_idx_[p]);
        vals.push_back(alpha * values_[p++]);
      } else if (p == pe || other.cols_idx_[q] < cols_idx_[p]) {
        idx.push_back(other.cols_idx_[q]);
        vals.push_back(beta * other.values_[q++]);
      } else {
        idx.push_back(cols_idx_[p]);
        vals.push_back(alpha * values_[p++] + beta * other.values_[q++]);
      }
    }
    offsets[i + 1] = idx.size();
  }
  return SparseMatrix(rows_, cols_, std::move(offsets), std::move(idx), std::move(vals));
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix out = *this;
  for (double& v : out.values_) v *= s;
  return out;
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.cols() != d.rows()) {
    throw ShapeError("spmm: sparse has " + std::to_string(s.cols()) + " columns, dense has " +
                     std::to_string(d.rows()) + " rows");
  }
  const auto& off = s.row_offsets();
  const auto& idx = s.col_indices();
  const auto& val = s.values();
  DenseMatrix out(s.rows(), d.cols());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
      const double v = val[p];
      auto d_row = d.row(idx[p]);
      for (std::size_t j = 0; j < d.cols(); ++j) out_row[j] += v * d_row[j];
    }
  }
  return out;
}

DenseMatrix spmm_transposed(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.rows() != d.rows()) throw ShapeError("spmm_transposed: row counts differ");
  const auto& off = s.row_offsets();
  const auto& idx = s.col_indices();
  const auto& val = s.values();
  DenseMatrix out(s.cols(), d.cols());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    auto d_row = d.row(i);
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
      auto out_row = out.row(idx[p]);
      const double v = val[p];
      for (std::size_t j = 0; j < d.cols(); ++j) out_row[j] += v * d_row[j];
    }
  }
  return out;
}

DenseMatrix dense_sparse(const DenseMatrix& d, const SparseMatrix& s) {
  if (d.cols() != s.rows()) throw ShapeError("dense_sparse: inner dimensions differ");
  const auto& off = s.row_offsets();
  const auto& idx = s.col_indices();
  const auto& val = s.values();
  DenseMatrix out(d.rows(), s.cols());
  for (std::size_t r = 0; r < d.rows(); ++r) {
    auto d_row = d.row(r);
    auto out_row = out.row(r);
    for (std::size_t k = 0; k < s.rows(); ++k) {
      const double dk = d_row[k];
      if (dk == 0.0) continue;
      for (std::size_t p = off[k]; p < off[k + 1]; ++p) out_row[idx[p]] += dk * val[p];
    }
  }
  return out;
}

}  // namespace gegen::num
