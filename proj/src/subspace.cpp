#include "bsid/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsid/linalg.hpp"

namespace bsid {

HankelDataset assemble(const TimeSeries& data, Index f, Index p) {
  data.validate();
  if (f < 1 || p < 1) throw ConfigError("assemble: horizons must be >= 1");
  const Index T = data.length();
  if (T < f + p) {
    throw DataError("assemble: series of length " + std::to_string(T) + " is shorter than f + p = " +
                    std::to_string(f + p));
  }
  HankelDataset ds;
  ds.f = f;
  ds.p = p;
  ds.j = T - f - p + 1;
  ds.ni = data.ni();
  ds.no = data.no();
  ds.yf = build_block_hankel(data.y, f, ds.j, p);
  ds.uf = build_block_hankel(data.u, f, ds.j, p);
  ds.up = build_block_hankel(data.u, p, ds.j, 0);
  ds.yp = build_block_hankel(data.y, p, ds.j, 0);
  ds.zp.resize(ds.up.rows() + ds.yp.rows(), ds.j);
  ds.zp << ds.up, ds.yp;
  ds.source = data;
  return ds;
}

LsEstimate ls_markov(const HankelDataset& ds) {
  Matrix regressor(ds.zp.rows() + ds.uf.rows(), ds.j);
  regressor << ds.zp, ds.uf;
  const auto solved = linalg::right_pinv_solve(ds.yf, regressor);
  LsEstimate out;
  out.hfp = solved.solution.leftCols(ds.zp.rows());
  out.hf = solved.solution.rightCols(ds.uf.rows());
  out.regressor_rank = solved.rank;
  out.rank_deficient = solved.rank < regressor.rows();
  return out;
}

WeightPair make_weights(Matrix w1, Matrix w2) {
  WeightPair out;
  out.w1 = std::move(w1);
  out.w2 = std::move(w2);
  out.w2_pinv = linalg::pinv(out.w2).pinv;
  return out;
}

WeightPair default_weights(const HankelDataset& ds, const Matrix& sigma_y) {
  if (sigma_y.rows() != ds.no || sigma_y.cols() != ds.no) throw ConfigError("default_weights: Sigma_y has wrong size");
  Vector lambda(ds.no);
  for (Index m = 0; m < ds.no; ++m) {
    if (!(sigma_y(m, m) > 0.0)) {
      throw DataError("default_weights: output channel " + std::to_string(m) + " has nonpositive variance");
    }
    lambda(m) = 1.0 / std::sqrt(sigma_y(m, m));
  }
  return make_weights(linalg::kron_identity_left(ds.f, lambda.asDiagonal().toDenseMatrix()), ds.zp);
}

WeightPair identity_weights(const HankelDataset& ds) {
  const Index m = ds.zp.rows();
  WeightPair out;
  out.w1 = Matrix::Identity(ds.f * ds.no, ds.f * ds.no);
  out.w2 = Matrix::Identity(m, m);
  out.w2_pinv = out.w2;
  return out;
}

namespace {

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& w1) {
  if (w1.rows() != w1.cols()) throw ConfigError("W1 must be square");
  Eigen::FullPivLU<Matrix> full(w1);
  if (!full.isInvertible()) throw ConfigError("W1 is singular");
  return Eigen::PartialPivLU<Matrix>(w1);
}

}  // namespace

Matrix weighted_truncate(const Matrix& hfp, const WeightPair& weights, Index rank) {
  const auto lu = checked_lu(weights.w1);
  const TruncatedSvd svd = truncated_svd(weights.w1 * hfp * weights.w2, rank);
  return lu.solve(svd.reconstruct()) * weights.w2_pinv;
}

RowLength row_length(Index n, Index no, Index ni) {
  if (n < 1 || no < 1 || ni < 0) throw ConfigError("row_length: sizes must be positive");
  RowLength out;
  out.rows = std::min<Index>(15, n / (10 * (no + ni)));
  if (out.rows < 2) {
    out.rows = 2;
    out.clamped = true;
  }
  return out;
}

Index select_rank(const Vector& singular_values, double threshold) {
  if (singular_values.size() == 0 || !(singular_values(0) > 0.0)) return 0;
  Index r = 0;
  for (Index k = 0; k < singular_values.size(); ++k) {
    if (singular_values(k) / singular_values(0) > threshold) r = k + 1;
  }
  return r;
}

namespace {

// Samples of the training series skipped before the secondary fits.
Index transient_length(const HankelDataset& ds) {
  return std::min<Index>(std::max<Index>(ds.f, 20), ds.source.length() / 2);
}

StateSpaceModel static_model(const HankelDataset& ds) {
  const TimeSeries& s = ds.source;
  Matrix d = Matrix::Zero(ds.no, ds.ni);
  if (ds.ni > 0) d = linalg::right_pinv_solve(s.y, s.u).solution;
  const Matrix resid = s.y - d * s.u;
  Matrix sigma = s.length() >= 2 ? linalg::sample_covariance(resid) : Matrix::Zero(ds.no, ds.no);
  return make_model(Matrix::Zero(0, 0), Matrix::Zero(0, ds.ni), Matrix::Zero(ds.no, 0), d, Matrix::Zero(0, ds.no),
                    0.5 * (sigma + sigma.transpose()), true);
}

}  // namespace

StateSpaceModel recover_system(const Matrix& gamma, const Matrix& lp, const Matrix& hf, const HankelDataset& ds,
                               Index nx) {
  if (nx == 0) return static_model(ds);
  const Index no = ds.no;
  const Index ni = ds.ni;
  const Index f = gamma.rows() / std::max<Index>(no, 1);
  if (gamma.rows() != f * no || gamma.cols() != nx) throw ConfigError("recover_system: Gamma has wrong shape");
  if (f < 2) throw ConfigError("recover_system: Gamma needs at least two block rows");
  if (lp.rows() != nx || lp.cols() != ds.p * (ni + no)) throw ConfigError("recover_system: L_p has wrong shape");

  const Matrix upper = gamma.topRows((f - 1) * no);
  const auto shift = linalg::pinv(upper);
  if (shift.rank < nx) {
    throw NumericalError("recover_system: observability stack has rank " + std::to_string(shift.rank) +
                         " < n_x = " + std::to_string(nx));
  }
  const Matrix a = shift.pinv * gamma.bottomRows((f - 1) * no);
  const Matrix c = gamma.topRows(no);
  const Matrix bk1 = lp.middleCols((ds.p - 1) * ni, ni);
  const Matrix k = lp.rightCols(no);

  // The predictor state does not depend on D once B - K D is known.
  const TimeSeries& s = ds.source;
  const Matrix ak = a - k * c;
  Matrix xhat(nx, s.length());
  Vector x = Vector::Zero(nx);
  for (Index t = 0; t < s.length(); ++t) {
    xhat.col(t) = x;
    x = ak * x + bk1 * s.u.col(t) + k * s.y.col(t);
  }
  const Index skip = transient_length(ds);
  const Index used = s.length() - skip;
  const Matrix resid = s.y.rightCols(used) - c * xhat.rightCols(used);
  Matrix d = Matrix::Zero(no, ni);
  if (ni > 0) {
    if (used > ni) {
      d = linalg::right_pinv_solve(resid, s.u.rightCols(used)).solution;
    } else if (hf.rows() >= no && hf.cols() >= ni) {
      d = hf.topLeftCorner(no, ni);
    }
  }
  const Matrix innov = resid - d * s.u.rightCols(used);
  Matrix sigma = used >= 2 ? linalg::sample_covariance(innov) : Matrix::Zero(no, no);
  sigma = 0.5 * (sigma + sigma.transpose());
  return make_model(a, bk1 + k * d, c, d, k, sigma, true);
}

StateSpaceModel recover_from_markov(const Matrix& hfp, const Matrix& hf, const HankelDataset& ds,
                                    const WeightPair& weights, Index nx) {
  if (nx == 0) return static_model(ds);
  const auto lu = checked_lu(weights.w1);
  const TruncatedSvd svd = truncated_svd(weights.w1 * hfp * weights.w2, nx);
  const Vector root = svd.s.cwiseSqrt();
  const Matrix gamma = lu.solve(svd.u * root.asDiagonal());
  const Matrix lp = root.asDiagonal() * svd.v.transpose() * weights.w2_pinv;
  return recover_system(gamma, lp, hf, ds, nx);
}

}  // namespace bsid
