#include "bsid/structops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

namespace bsid {

BlockToeplitzLower::BlockToeplitzLower(Matrix first_block_column, Index num_blocks)
    : first_column_(std::move(first_block_column)), num_blocks_(num_blocks) {
  if (num_blocks_ < 1) throw ConfigError("BlockToeplitzLower: need at least one block");
  if (first_column_.rows() % num_blocks_ != 0) {
    throw ConfigError("BlockToeplitzLower: first block column rows (" + std::to_string(first_column_.rows()) +
                      ") not divisible by block count (" + std::to_string(num_blocks_) + ")");
  }
  block_rows_ = first_column_.rows() / num_blocks_;
}

BlockToeplitzLower BlockToeplitzLower::from_last_block_row(const Matrix& row, Index num_blocks) {
  if (num_blocks < 1 || row.cols() % num_blocks != 0) {
    throw ConfigError("from_last_block_row: row of width " + std::to_string(row.cols()) +
                      " does not split into " + std::to_string(num_blocks) + " blocks");
  }
  const Index br = row.rows();
  const Index bc = row.cols() / num_blocks;
  Matrix col(num_blocks * br, bc);
  for (Index k = 0; k < num_blocks; ++k) {
    col.middleRows(k * br, br) = row.middleCols((num_blocks - 1 - k) * bc, bc);
  }
  return BlockToeplitzLower(std::move(col), num_blocks);
}

BlockToeplitzLower BlockToeplitzLower::from_dense(const Matrix& dense, Index num_blocks) {
  if (num_blocks < 1 || dense.cols() % num_blocks != 0 || dense.rows() % num_blocks != 0) {
    throw ConfigError("from_dense: matrix does not split into the requested blocks");
  }
  return BlockToeplitzLower(dense.leftCols(dense.cols() / num_blocks), num_blocks);
}

Matrix BlockToeplitzLower::block(Index k) const {
  return first_column_.middleRows(k * block_rows_, block_rows_);
}

Matrix BlockToeplitzLower::dense() const {
  const Index br = block_rows_;
  const Index bc = block_cols();
  Matrix out = Matrix::Zero(num_blocks_ * br, num_blocks_ * bc);
  for (Index c = 0; c < num_blocks_; ++c) {
    out.block(c * br, c * bc, (num_blocks_ - c) * br, bc) = first_column_.topRows((num_blocks_ - c) * br);
  }
  return out;
}

Matrix BlockToeplitzLower::last_block_row() const {
  const Index br = block_rows_;
  const Index bc = block_cols();
  Matrix row(br, num_blocks_ * bc);
  for (Index k = 0; k < num_blocks_; ++k) row.middleCols((num_blocks_ - 1 - k) * bc, bc) = block(k);
  return row;
}

BlockToeplitzLower BlockToeplitzLower::inverse() const {
  if (block_rows_ != block_cols()) throw ConfigError("BlockToeplitzLower::inverse: blocks are not square");
  const Index n = block_rows_;
  Eigen::PartialPivLU<Matrix> lead(block(0));
  const double det = lead.determinant();
  if (!std::isfinite(det) || det == 0.0) throw NumericalError("BlockToeplitzLower::inverse: singular leading block");
  Matrix inv(num_blocks_ * n, n);
  inv.topRows(n) = lead.inverse();
  for (Index k = 1; k < num_blocks_; ++k) {
    Matrix acc = Matrix::Zero(n, n);
    for (Index m = 1; m <= k; ++m) acc += block(m) * inv.middleRows((k - m) * n, n);
    inv.middleRows(k * n, n) = -lead.solve(acc);
  }
  return BlockToeplitzLower(std::move(inv), num_blocks_);
}

BlockToeplitzLower BlockToeplitzLower::operator*(const BlockToeplitzLower& rhs) const {
  if (num_blocks_ != rhs.num_blocks_ || block_cols() != rhs.block_rows_) {
    throw ConfigError("BlockToeplitzLower product: incompatible shapes");
  }
  const Index br = block_rows_;
  Matrix col = Matrix::Zero(num_blocks_ * br, rhs.block_cols());
  for (Index k = 0; k < num_blocks_; ++k) {
    for (Index m = 0; m <= k; ++m) col.middleRows(k * br, br) += block(m) * rhs.block(k - m);
  }
  return BlockToeplitzLower(std::move(col), num_blocks_);
}

Matrix toeplitz_expand(const BlockToeplitzLower& t) { return t.dense(); }

Matrix toeplitz_from_last_block_row(const Matrix& row, Index num_blocks) {
  return BlockToeplitzLower::from_last_block_row(row, num_blocks).dense();
}

bool is_block_lower_toeplitz(const Matrix& m, Index num_blocks, Index block_rows, Index block_cols, double tol) {
  if (m.rows() != num_blocks * block_rows || m.cols() != num_blocks * block_cols) return false;
  for (Index k = 0; k < num_blocks; ++k) {
    for (Index l = 0; l < num_blocks; ++l) {
      const auto blk = m.block(k * block_rows, l * block_cols, block_rows, block_cols);
      if (k < l) {
        if (blk.size() > 0 && blk.cwiseAbs().maxCoeff() > tol) return false;
      } else {
        const auto ref = m.block((k - l) * block_rows, 0, block_rows, block_cols);
        if (blk.size() > 0 && (blk - ref).cwiseAbs().maxCoeff() > tol) return false;
      }
    }
  }
  return true;
}

ToeplitzSelector::ToeplitzSelector(Index dim, Triangle tri) : dim_(dim), source_(dim * dim, -1) {
  if (dim < 1) throw ConfigError("ToeplitzSelector: dimension must be positive");
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) {
      if (tri == Triangle::lower && r >= c) source_[r + c * dim] = r - c;
      if (tri == Triangle::upper && c >= r) source_[r + c * dim] = c - r;
    }
  }
}

Matrix ToeplitzSelector::dense() const {
  Matrix out = Matrix::Zero(dim_ * dim_, dim_);
  for (Index p = 0; p < dim_ * dim_; ++p) {
    if (source_[p] >= 0) out(p, source_[p]) = 1.0;
  }
  return out;
}

Vector ToeplitzSelector::apply(const Vector& generator) const {
  if (generator.size() != dim_) throw ConfigError("ToeplitzSelector::apply: wrong generator length");
  Vector out = Vector::Zero(dim_ * dim_);
  for (Index p = 0; p < dim_ * dim_; ++p) {
    if (source_[p] >= 0) out(p) = generator(source_[p]);
  }
  return out;
}

Vector ToeplitzSelector::apply_transpose(const Vector& v) const {
  if (v.size() != dim_ * dim_) throw ConfigError("ToeplitzSelector::apply_transpose: wrong length");
  Vector out = Vector::Zero(dim_);
  for (Index p = 0; p < dim_ * dim_; ++p) {
    if (source_[p] >= 0) out(source_[p]) += v(p);
  }
  return out;
}

HankelSelector::HankelSelector(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw ConfigError("HankelSelector: dimensions must be positive");
}

Matrix HankelSelector::dense() const {
  Matrix out = Matrix::Zero(rows_ * cols_, generator_length());
  for (Index c = 0; c < cols_; ++c) {
    for (Index r = 0; r < rows_; ++r) out(r + c * rows_, r + c) = 1.0;
  }
  return out;
}

Vector HankelSelector::apply(const Vector& v) const {
  if (v.size() != generator_length()) throw ConfigError("HankelSelector::apply: wrong generator length");
  Vector out(rows_ * cols_);
  for (Index c = 0; c < cols_; ++c) {
    for (Index r = 0; r < rows_; ++r) out(r + c * rows_) = v(r + c);
  }
  return out;
}

Vector HankelSelector::apply_transpose(const Vector& w) const {
  if (w.size() != rows_ * cols_) throw ConfigError("HankelSelector::apply_transpose: wrong length");
  Vector out = Vector::Zero(generator_length());
  for (Index c = 0; c < cols_; ++c) {
    for (Index r = 0; r < rows_; ++r) out(r + c) += w(r + c * rows_);
  }
  return out;
}

Vector HankelSelector::column_counts() const {
  Vector out(generator_length());
  for (Index t = 0; t < generator_length(); ++t) {
    const Index lo = std::max<Index>(0, t - (cols_ - 1));
    const Index hi = std::min<Index>(rows_ - 1, t);
    out(t) = static_cast<double>(hi - lo + 1);
  }
  return out;
}

Matrix build_block_hankel(const Matrix& signal, Index rows, Index cols, Index start_offset) {
  if (rows < 0 || cols < 0 || start_offset < 0) throw ConfigError("build_block_hankel: negative size");
  const Index d = signal.rows();
  Matrix out(rows * d, cols);
  if (rows == 0 || cols == 0) return out;
  const Index needed = start_offset + rows + cols - 1;
  if (needed > signal.cols()) {
    throw DataError("build_block_hankel: signal has " + std::to_string(signal.cols()) + " samples, " +
                    std::to_string(needed) + " required");
  }
  for (Index m = 0; m < rows; ++m) out.middleRows(m * d, d) = signal.middleCols(start_offset + m, cols);
  return out;
}

Matrix block_vec(const Matrix& p, Index block_width) {
  if (block_width < 1 || p.cols() % block_width != 0) {
    throw ConfigError("block_vec: " + std::to_string(p.cols()) + " columns not divisible by block width " +
                      std::to_string(block_width));
  }
  const Index k = p.cols() / block_width;
  Matrix out(k * p.rows(), block_width);
  for (Index b = 0; b < k; ++b) out.middleRows(b * p.rows(), p.rows()) = p.middleCols(b * block_width, block_width);
  return out;
}

TruncatedSvd truncated_svd(const Matrix& m, Index rank) {
  if (rank < 0 || rank > std::min(m.rows(), m.cols())) {
    throw ConfigError("truncated_svd: rank " + std::to_string(rank) + " exceeds matrix dimensions " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  TruncatedSvd out;
  if (rank == 0) {
    out.u = Matrix::Zero(m.rows(), 0);
    out.s = Vector::Zero(0);
    out.v = Matrix::Zero(m.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU().leftCols(rank);
  out.s = svd.singularValues().head(rank);
  out.v = svd.matrixV().leftCols(rank);
  return out;
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector::Zero(0);
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

double log_pseudo_determinant(const Matrix& m, double rank_tolerance) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s(0) <= 0.0) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > rank_tolerance * s(0)) acc += std::log(s(k));
  }
  return acc;
}

double pseudo_determinant(const Matrix& m, double rank_tolerance) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s(0) <= 0.0) return 0.0;
  double acc = 1.0;
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > rank_tolerance * s(0)) acc *= s(k);
  }
  return acc;
}

}  // namespace bsid
