#pragma once

// Linear state-space models in innovation form
//
//   x[k+1] = A x[k] + B u[k] + K e[k]
//   y[k]   = C x[k] + D u[k] + e[k],     e[k] ~ N(0, Sigma)
//
// and the equivalent predictor form driven by z[k] = [u[k]; y[k]]:
//
//   x[k+1] = (A - K C) x[k] + [B - K D, K] z[k].
//
// Also builds the stacked matrices of the future/past data equation:
// extended observability Gamma_f, the Toeplitz blocks H_f and G_f, and the
// past-to-future map H_fp = Gamma_f L_p.

#include <cstdint>

#include "bsid/types.hpp"

namespace bsid {

struct StateSpaceModel {
  Matrix A, B, C, D, K, Sigma;

  Index nx() const { return A.rows(); }
  Index ni() const { return B.cols(); }
  Index no() const { return C.rows(); }

  // Throws ConfigError on inconsistent shapes or a non-PSD Sigma.
  void validate() const;

  Matrix predictor_a() const { return A - K * C; }
  // [B - K D, K]
  Matrix predictor_b() const;

  double predictor_spectral_radius() const;
  bool predictor_stable() const;
};

// Checked construction. Throws unless A - K C is stable or allow_unstable.
StateSpaceModel make_model(Matrix a, Matrix b, Matrix c, Matrix d, Matrix k, Matrix sigma,
                           bool allow_unstable = false);

// Columns are samples: u is ni x T, y is no x T.
struct TimeSeries {
  Matrix u;
  Matrix y;

  Index length() const { return y.cols(); }
  Index ni() const { return u.rows(); }
  Index no() const { return y.rows(); }

  void validate() const;
  TimeSeries segment(Index start, Index length) const;
};

struct Simulation {
  TimeSeries data;
  Matrix innovations;  // no x T, the e[k] actually used
  Matrix states;       // nx x (T+1), x[0] .. x[T]
};

inline constexpr Index kDefaultBurnIn = 100;

// Innovation-form simulation. e[k] = Sigma^{1/2} xi[k] with xi drawn from a
// generator seeded by noise_seed. An empty x0 means zero initial state.
Simulation simulate(const StateSpaceModel& model, const Matrix& u, std::uint64_t noise_seed,
                    const Vector& x0 = Vector());

// Zero-mean unit-variance white Gaussian input of length + burn_in samples;
// the first burn_in samples are discarded.
Simulation simulate_white_input(const StateSpaceModel& model, Index length, std::uint64_t seed,
                                Index burn_in = kDefaultBurnIn);

// One-step-ahead predictions yhat[k|k-1] (no x T).
Matrix predict_one_step(const StateSpaceModel& model, const TimeSeries& data, const Vector& x0 = Vector(),
                        bool allow_unstable = false);

// [C; CA; ...; CA^{f-1}]
Matrix extended_observability(const StateSpaceModel& model, Index f);

// Block lower triangular Toeplitz with D on the diagonal and CA^{m-1}B below.
Matrix toeplitz_hf(const StateSpaceModel& model, Index f);

// Block lower triangular Toeplitz with I on the diagonal and CA^{m-1}K below,
// right-multiplied by I_f (x) Sigma^{1/2}.
Matrix toeplitz_gf(const StateSpaceModel& model, Index f);

struct MarkovBlocks {
  Matrix hfp;  // f*no x p*(ni+no), columns ordered like [U_p; Y_p]
  Matrix lp1;  // nx x p*ni
  Matrix lp2;  // nx x p*no

  Matrix lp() const;
};

MarkovBlocks markov_hfp(const StateSpaceModel& model, Index f, Index p);

}  // namespace bsid
