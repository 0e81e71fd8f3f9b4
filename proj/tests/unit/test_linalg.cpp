#include <doctest.h>

#include "bsid/linalg.hpp"
#include "bsid/random.hpp"
#include "../support/oracles.hpp"

using namespace bsid;

TEST_SUITE("linalg") {
  TEST_CASE("kron matches the elementwise definition") {
    Rng rng(1);
    const Matrix a = rng.normal_matrix(2, 3);
    const Matrix b = rng.normal_matrix(4, 2);
    CHECK((linalg::kron(a, b) - oracle::kron(a, b)).norm() == 0.0);
    CHECK((linalg::kron_identity_left(3, b) - oracle::kron(Matrix::Identity(3, 3), b)).norm() == 0.0);
  }

  TEST_CASE("vec and unvec are column-major inverses") {
    Rng rng(2);
    const Matrix m = rng.normal_matrix(3, 4);
    CHECK(linalg::vec(m) == oracle::vec(m));
    CHECK(linalg::unvec(linalg::vec(m), 3, 4) == m);
    CHECK_THROWS_AS(linalg::unvec(linalg::vec(m), 5, 2), ConfigError);
  }

  TEST_CASE("symmetric square root") {
    Rng rng(3);
    const Matrix x = rng.normal_matrix(4, 6);
    const Matrix s = x * x.transpose();
    const Matrix root = linalg::sym_sqrt(s);
    CHECK(linalg::is_symmetric(root));
    CHECK((root * root - s).norm() <= 1e-10 * s.norm());
    const Matrix psd = x.leftCols(2) * x.leftCols(2).transpose();
    CHECK((linalg::sym_sqrt(psd) * linalg::sym_sqrt(psd) - psd).norm() <= 1e-10 * psd.norm());
    CHECK(linalg::is_psd(psd));
    CHECK_FALSE(linalg::is_psd(-s));
  }

  TEST_CASE("spd_factor gives inverse and inverse root") {
    Rng rng(4);
    const Matrix x = rng.normal_matrix(5, 9);
    const Matrix s = x * x.transpose();
    const auto f = linalg::spd_factor(s);
    CHECK(f.jitter_applied == 0);
    CHECK((f.inverse * s - Matrix::Identity(5, 5)).norm() <= 1e-10);
    CHECK((f.inv_sqrt * f.inv_sqrt - f.inverse).norm() <= 1e-10 * f.inverse.norm());
    CHECK(linalg::is_symmetric(f.inv_sqrt));
  }

  TEST_CASE("spd_factor jitters a singular matrix or gives up") {
    Matrix s = Matrix::Zero(3, 3);
    s(0, 0) = 1.0;
    s(1, 1) = 1.0;
    bool jittered = false;
    try {
      jittered = linalg::spd_factor(s).jitter_applied > 0;
    } catch (const NumericalError&) {
      jittered = true;
    }
    CHECK(jittered);
    CHECK_THROWS_AS(linalg::spd_factor(-Matrix::Identity(2, 2)), NumericalError);
  }

  TEST_CASE("reverse Cholesky is lower triangular with omega = R^T R") {
    Rng rng(5);
    const Matrix x = rng.normal_matrix(6, 10);
    const Matrix omega = x * x.transpose();
    int jitter = -1;
    const Matrix r = linalg::reverse_cholesky(omega, &jitter);
    CHECK(jitter == 0);
    CHECK((r.triangularView<Eigen::StrictlyUpper>().toDenseMatrix()).norm() == 0.0);
    CHECK((r.transpose() * r - omega).norm() <= 1e-12 * omega.norm());
    for (Index k = 0; k < 6; ++k) CHECK(r(k, k) > 0.0);
  }

  TEST_CASE("pinv matches the full-SVD oracle, including rank-deficient input") {
    Rng rng(6);
    const Matrix a = rng.normal_matrix(4, 2) * rng.normal_matrix(2, 7);
    const auto p = linalg::pinv(a);
    CHECK(p.rank == 2);
    CHECK((p.pinv - oracle::pinv(a)).norm() <= 1e-10 * oracle::pinv(a).norm());
    const Matrix y = rng.normal_matrix(3, 7);
    const auto sol = linalg::right_pinv_solve(y, a);
    CHECK((sol.solution - y * oracle::pinv(a)).norm() <= 1e-10 * (1.0 + sol.solution.norm()));
  }

  TEST_CASE("sample covariance uses the unbiased normalization") {
    Matrix s(2, 3);
    s << 1, 2, 3, 2, 4, 9;
    const Matrix c = linalg::sample_covariance(s);
    CHECK(c(0, 0) == doctest::Approx(1.0));
    CHECK(c(0, 1) == doctest::Approx(3.5));
    CHECK(c(1, 1) == doctest::Approx(13.0));
  }

  TEST_CASE("spectral radius of a scaled rotation") {
    Matrix a(2, 2);
    a << 0.0, -0.9, 0.9, 0.0;
    CHECK(linalg::spectral_radius(a) == doctest::Approx(0.9));
  }
}
