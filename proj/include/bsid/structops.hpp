#pragma once

// Structured linear algebra: block Hankel and block lower triangular
// Toeplitz matrices, the 0/1 selector operators that map generating
// sequences onto them, block vectorization, truncated SVD and the
// pseudo-determinant.
//
// vec() is column-major everywhere.

#include <vector>

#include "bsid/types.hpp"

namespace bsid {

// Block lower triangular Toeplitz matrix stored by its first block column.
// Blocks are block_rows x block_cols; block (k, l) is the k-l'th block of the
// first column for k >= l and zero otherwise.
class BlockToeplitzLower {
 public:
  BlockToeplitzLower() = default;
  // first_block_column has num_blocks * block_rows rows.
  BlockToeplitzLower(Matrix first_block_column, Index num_blocks);

  // Last block row [R_0 ... R_{i-1}], where block (k,l) of the result is
  // R_{i-1-(k-l)}.
  static BlockToeplitzLower from_last_block_row(const Matrix& row, Index num_blocks);
  // Reads the first block column out of a dense matrix, ignoring the rest.
  static BlockToeplitzLower from_dense(const Matrix& dense, Index num_blocks);

  Index num_blocks() const { return num_blocks_; }
  Index block_rows() const { return block_rows_; }
  Index block_cols() const { return first_column_.cols(); }
  const Matrix& first_block_column() const { return first_column_; }

  // k'th block of the first column, k = 0 .. num_blocks-1.
  Matrix block(Index k) const;
  Matrix leading_block() const { return block(0); }

  Matrix dense() const;
  Matrix last_block_row() const;

  // Inverse, via block forward substitution on the first column. Requires
  // square blocks with a nonsingular leading block.
  BlockToeplitzLower inverse() const;

  BlockToeplitzLower operator*(const BlockToeplitzLower& rhs) const;

 private:
  Matrix first_column_;
  Index num_blocks_ = 0;
  Index block_rows_ = 0;
};

Matrix toeplitz_expand(const BlockToeplitzLower& t);

// Dense block lower triangular Toeplitz matrix from its last block row.
Matrix toeplitz_from_last_block_row(const Matrix& row, Index num_blocks);

// Exact structural predicate (entries compared with absolute tolerance tol).
bool is_block_lower_toeplitz(const Matrix& m, Index num_blocks, Index block_rows, Index block_cols,
                             double tol = 0.0);

enum class Triangle { lower, upper };

// T_{i x i}: maps the first column (lower) or first row (upper) of an i x i
// scalar triangular Toeplitz matrix to its vectorization.
class ToeplitzSelector {
 public:
  explicit ToeplitzSelector(Index dim, Triangle tri = Triangle::lower);

  Index dim() const { return dim_; }
  Matrix dense() const;
  // Gather: T g.
  Vector apply(const Vector& generator) const;
  // Scatter-add: T^T v.
  Vector apply_transpose(const Vector& v) const;

 private:
  Index dim_;
  // source_[p] = generator index feeding vec position p, or -1.
  std::vector<Index> source_;
};

// H_{i x j}: maps a length i+j-1 vector v to vec(Hankel), Hankel(r,c) = v[r+c].
class HankelSelector {
 public:
  HankelSelector(Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index generator_length() const { return rows_ + cols_ - 1; }

  Matrix dense() const;
  Vector apply(const Vector& v) const;
  Vector apply_transpose(const Vector& w) const;
  // Diagonal of H^T H; the columns of H have disjoint supports so H^T H is
  // diagonal with these entries.
  Vector column_counts() const;

 private:
  Index rows_;
  Index cols_;
};

// Block Hankel matrix of a signal whose columns are samples (d x T).
// Block (m, n) is signal[:, start_offset + m + n].
Matrix build_block_hankel(const Matrix& signal, Index rows, Index cols, Index start_offset);

// Stacks the block columns of p (each block_width wide) vertically.
Matrix block_vec(const Matrix& p, Index block_width);

struct TruncatedSvd {
  Matrix u;
  Vector s;
  Matrix v;

  Matrix reconstruct() const { return u * s.asDiagonal() * v.transpose(); }
};

TruncatedSvd truncated_svd(const Matrix& m, Index rank);

// All singular values, descending.
Vector singular_values(const Matrix& m);

inline constexpr double kDefaultRankTolerance = 1e-12;

// Product of singular values above rank_tolerance * sigma_max.
double pseudo_determinant(const Matrix& m, double rank_tolerance = kDefaultRankTolerance);
double log_pseudo_determinant(const Matrix& m, double rank_tolerance = kDefaultRankTolerance);

}  // namespace bsid
