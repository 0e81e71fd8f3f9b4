#pragma once

#include "bsid/types.hpp"

namespace bsid::linalg {

Matrix kron(const Matrix& a, const Matrix& b);

// I_n (x) b
Matrix kron_identity_left(Index n, const Matrix& b);

// Column-major vec.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Index rows, Index cols);

// Symmetric square root of a symmetric PSD matrix. Negative eigenvalues
// smaller than the round-off floor are clamped to zero; clearly negative
// ones raise NumericalError.
Matrix sym_sqrt(const Matrix& s);

bool is_symmetric(const Matrix& m, double rel_tol = 1e-10);
bool is_psd(const Matrix& m, double rel_tol = 1e-10);

// Inverse and inverse symmetric square root of a symmetric positive definite
// matrix. When the matrix is numerically not SPD, 1e-10 * trace/dim is added
// to its diagonal, at most twice; after that NumericalError is thrown.
struct SpdFactor {
  Matrix inverse;
  Matrix inv_sqrt;
  int jitter_applied = 0;
};
SpdFactor spd_factor(const Matrix& s);

// Factor omega = R^T R with R lower triangular. Same jitter policy as
// spd_factor; the number of jitter steps is written to *jitter if given.
Matrix reverse_cholesky(const Matrix& omega, int* jitter = nullptr);

// Minimum-norm pseudo-inverse via SVD. Singular values below
// rcond * sigma_max are treated as zero.
struct Pinv {
  Matrix pinv;
  Index rank = 0;
};
Pinv pinv(const Matrix& m, double rcond = 1e-10);

// Y * R^+ without forming R^+ explicitly. rank is the numerical rank of R.
struct RightSolve {
  Matrix solution;
  Index rank = 0;
};
RightSolve right_pinv_solve(const Matrix& y, const Matrix& r, double rcond = 1e-10);

// Columns are samples; returns the unbiased covariance of the rows.
Matrix sample_covariance(const Matrix& samples);

double spectral_radius(const Matrix& a);

}  // namespace bsid::linalg
