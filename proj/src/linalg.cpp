#include "bsid/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bsid::linalg {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

Matrix kron_identity_left(Index n, const Matrix& b) {
  Matrix out = Matrix::Zero(n * b.rows(), n * b.cols());
  for (Index k = 0; k < n; ++k) out.block(k * b.rows(), k * b.cols(), b.rows(), b.cols()) = b;
  return out;
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows * cols != v.size()) throw ConfigError("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool is_psd(const Matrix& m, double rel_tol) {
  if (!is_symmetric(m, rel_tol)) return false;
  if (m.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const double top = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() >= -rel_tol * top;
}

Matrix sym_sqrt(const Matrix& s) {
  if (s.size() == 0) return s;
  if (!is_symmetric(s)) throw NumericalError("sym_sqrt: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  Vector ev = es.eigenvalues();
  const double top = std::max(0.0, ev.cwiseAbs().maxCoeff());
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < -1e-10 * std::max(top, 1e-300)) throw NumericalError("sym_sqrt: matrix is not PSD");
    ev(k) = std::sqrt(std::max(ev(k), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

constexpr int kMaxJitter = 2;
constexpr double kJitterScale = 1e-10;
// Eigenvalues below this fraction of the largest are "not SPD" for our purposes.
constexpr double kSpdFloor = 1e-14;

double jitter_amount(const Matrix& s) {
  const double tr = s.trace();
  const double d = static_cast<double>(s.rows());
  return kJitterScale * (tr > 0.0 ? tr / d : 1.0);
}

}  // namespace

SpdFactor spd_factor(const Matrix& s) {
  if (s.rows() != s.cols()) throw ConfigError("spd_factor: matrix is not square");
  SpdFactor out;
  if (s.size() == 0) return out;
  Matrix work = 0.5 * (s + s.transpose());
  const double jitter = jitter_amount(work);
  for (int attempt = 0; attempt <= kMaxJitter; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(work);
    if (es.info() == Eigen::Success) {
      const Vector& ev = es.eigenvalues();
      const double top = ev.maxCoeff();
      if (top > 0.0 && ev.minCoeff() > kSpdFloor * top) {
        const Matrix& v = es.eigenvectors();
        out.inverse = v * ev.cwiseInverse().asDiagonal() * v.transpose();
        out.inv_sqrt = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
        out.jitter_applied = attempt;
        return out;
      }
    }
    work.diagonal().array() += jitter;
  }
  throw NumericalError("spd_factor: matrix is not positive definite after jitter");
}

Matrix reverse_cholesky(const Matrix& omega, int* jitter) {
  if (omega.rows() != omega.cols()) throw ConfigError("reverse_cholesky: matrix is not square");
  const Index n = omega.rows();
  // With P the exchange matrix, P omega P = U^T U gives omega = (P U P)^T (P U P).
  Matrix work = 0.5 * (omega + omega.transpose());
  const double amount = jitter_amount(work);
  for (int attempt = 0; attempt <= kMaxJitter; ++attempt) {
    const Matrix flipped = work.reverse();
    Eigen::LLT<Matrix> llt(flipped);
    if (llt.info() == Eigen::Success) {
      const Matrix u = llt.matrixU();
      const double dmin = u.diagonal().cwiseAbs().minCoeff();
      const double dmax = u.diagonal().cwiseAbs().maxCoeff();
      if (dmax > 0.0 && dmin > 1e-7 * dmax) {
        if (jitter != nullptr) *jitter = attempt;
        Matrix r = u.reverse();
        for (Index c = 0; c < n; ++c) {
          for (Index rr = 0; rr < c; ++rr) r(rr, c) = 0.0;
        }
        return r;
      }
    }
    work.diagonal().array() += amount;
  }
  throw NumericalError("reverse_cholesky: matrix is not positive definite after jitter");
}

Pinv pinv(const Matrix& m, double rcond) {
  Pinv out;
  if (m.size() == 0) {
    out.pinv = Matrix::Zero(m.cols(), m.rows());
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = rcond * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff && s(k) > 0.0) {
      inv(k) = 1.0 / s(k);
      ++out.rank;
    }
  }
  out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

RightSolve right_pinv_solve(const Matrix& y, const Matrix& r, double rcond) {
  if (y.cols() != r.cols()) throw ConfigError("right_pinv_solve: column counts differ");
  RightSolve out;
  if (r.size() == 0) {
    out.solution = Matrix::Zero(y.rows(), r.rows());
    return out;
  }
  // R = U S V^T  =>  Y R^+ = (Y V) S^+ U^T
  Eigen::BDCSVD<Matrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = rcond * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff && s(k) > 0.0) {
      inv(k) = 1.0 / s(k);
      ++out.rank;
    }
  }
  out.solution = (y * svd.matrixV()) * inv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

Matrix sample_covariance(const Matrix& samples) {
  const Index n = samples.cols();
  if (n < 2) throw DataError("sample_covariance: need at least two samples");
  const Vector mean = samples.rowwise().mean();
  const Matrix centered = samples.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(n - 1);
}

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace bsid::linalg
