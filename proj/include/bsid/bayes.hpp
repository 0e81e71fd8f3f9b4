#pragma once

// Bayesian estimation of H_fp = Gamma_f L_p by Gibbs sampling.
//
// The chain alternates conditional draws of
//   [Gamma_f H_f]   row-wise regression of Y_f on [X_p; U_f],
//   Gamma_f         refresh with H_f held fixed (optional),
//   L_p             column-wise regression through Z_p^+,
//   G_f             the block lower triangular Toeplitz noise factor,
// and averages Gamma_f L_p over the trajectory after burn-in.
//
// Notation used below: i = f (future horizon), j = Hankel width, r = rank,
// m = p (ni + no). gamma = 1 / |det G_11|^{2i} and Gbar = G_f sqrt(gamma).
//
// Random numbers are consumed in a fixed order per sweep: Xi_{Gamma,H}, then
// Xi_Gamma (refresh), then Xi_L, then the Wishart draw (Bartlett: diagonal
// chi-squares, then sub-diagonal normals column by column), then the normal
// blocks N_2 .. N_i. Each matrix is filled column-major.

#include <cstdint>
#include <string>
#include <vector>

#include "bsid/random.hpp"
#include "bsid/structops.hpp"
#include "bsid/subspace.hpp"

namespace bsid {

struct PriorParams {
  Matrix lambda_gamma;  // r x r
  Matrix lambda_l;      // r x r
  Matrix lambda_h;      // i*ni x i*ni
  Index rank = 0;
};

struct GibbsState {
  Matrix gamma;  // i*no x r
  Matrix hf;     // i*no x i*ni
  Matrix lp;     // r x m
  BlockToeplitzLower gf;
  double log_abs_det_g11 = 0.0;
  Matrix psi_e;  // (G_f G_f^T)^{-1}
  Matrix xp;     // L_p Z_p

  Index horizon() const { return gf.num_blocks(); }
  // log gamma = -2 i log|det G_11|
  double log_gamma() const { return -2.0 * static_cast<double>(horizon()) * log_abs_det_g11; }
};

// Recomputes log|det G_11| and Psi_e from gf.
void sync_noise_terms(GibbsState& state);

enum class GfVariant { exact, independent_approx };
enum class AverageMode { plain, rao_blackwell };

struct ChainConfig {
  Index total_iterations = 500;  // N_F
  Index burn_in = 100;           // N_o
  GfVariant gf_variant = GfVariant::independent_approx;
  std::uint64_t seed = 0;
  AverageMode average_mode = AverageMode::rao_blackwell;
  // Redraw Gamma_f with the projected H_f held fixed after the joint draw.
  bool gamma_refresh = true;

  void validate() const;
};

std::string to_string(GfVariant v);
std::string to_string(AverageMode m);
GfVariant parse_gf_variant(const std::string& s);
AverageMode parse_average_mode(const std::string& s);

// Data shared by all sweeps of a chain.
class ChainData {
 public:
  explicit ChainData(const HankelDataset& ds);

  const HankelDataset& ds() const { return *ds_; }
  // (Z_p^+)^T, m x j.
  const Matrix& zp_pinv_t() const { return zp_pinv_t_; }
  Index horizon() const { return ds_->f; }

 private:
  const HankelDataset* ds_;
  Matrix zp_pinv_t_;
};

struct InitResult {
  PriorParams priors;
  GibbsState state;
  TruncatedSvd svd;  // of H_fp^(1) Z_p
  std::vector<std::string> warnings;
};

// Least squares, truncated SVD of H_fp^(1) Z_p, and the empirical priors
//   Lambda_Gamma = i no S_r^{-1},  Lambda_L = j S_r^{-1},
//   Lambda_H = I i^2 no ni / tr(H_f^T H_f).
InitResult init_chain(const HankelDataset& ds, Index rank);

// A conditional draw: mean is the data term (all Xi set to zero).
struct RegressionDraw {
  Matrix mean;
  Matrix draw;
  int jitter = 0;
};

// Joint [Gamma_f H_f] draw. xi is i*no x (r + i*ni).
RegressionDraw step_gamma_h(const GibbsState& state, const ChainData& data, const PriorParams& priors,
                            const Matrix& xi);
RegressionDraw step_gamma_h(const GibbsState& state, const ChainData& data, const PriorParams& priors, Rng& rng);

// Rebuilds H_f as block lower triangular Toeplitz from its last block row.
Matrix project_hf(const Matrix& hf_unprojected, Index horizon, Index no, Index ni);

// Gamma_f refresh with H_f fixed. xi is i*no x r.
RegressionDraw step_gamma_refresh(const GibbsState& state, const ChainData& data, const PriorParams& priors,
                                  const Matrix& xi);
RegressionDraw step_gamma_refresh(const GibbsState& state, const ChainData& data, const PriorParams& priors,
                                  Rng& rng);

// L_p draw. xi is r x j.
RegressionDraw step_lp(const GibbsState& state, const ChainData& data, const PriorParams& priors, const Matrix& xi);
RegressionDraw step_lp(const GibbsState& state, const ChainData& data, const PriorParams& priors, Rng& rng);

// Wishart degrees of freedom of the G_f posterior: i + j - i no (exact) or
// i j - i no + 1 (independent approximation). Throws ConfigError when the
// value does not exceed no - 1.
double gf_dof(GfVariant variant, Index horizon, Index width, Index no);

// Quadratic-form matrix Omega of the G_f posterior (i*no square). The
// unknown is the block-transposed first block column of G_f^{-1}:
// Theta = [Q_0^T; ...; Q_{i-1}^T] with tr(Theta^T Omega Theta) equal to the
// whitened residual energy.
Matrix gf_omega(const Matrix& residual, Index horizon, Index no, GfVariant variant);

struct GfNoise {
  Matrix theta;                // no x no, Wishart(I, dof)
  std::vector<Matrix> normals;  // i-1 blocks, no x no
};
GfNoise draw_gf_noise(Rng& rng, double dof, Index no, Index horizon);

struct GfDraw {
  BlockToeplitzLower gf;
  Matrix omega;
  int jitter = 0;
};

// Y_f - Gamma_f L_p Z_p - H_f U_f using the cached X_p.
Matrix chain_residual(const GibbsState& state, const HankelDataset& ds);

GfDraw step_gf(const GibbsState& state, const ChainData& data, GfVariant variant, const GfNoise& noise);
GfDraw step_gf(const GibbsState& state, const ChainData& data, GfVariant variant, Rng& rng);

// log of the improper prior density 1/|det G_11|^{i no}.
double prior_density_log(const BlockToeplitzLower& gf);

// log |Jacobian| of M -> A M (or M -> M A) restricted to first block columns
// of block lower triangular Toeplitz matrices: i no log|det A_11|.
double group_action_log_jacobian(const BlockToeplitzLower& a);

// Bartlett decomposition. Throws ConfigError unless dof > d - 1.
Matrix sample_wishart(const Matrix& scale, double dof, Rng& rng);

// Every random number consumed by one sweep.
struct SweepNoise {
  Matrix xi_gamma_h;
  Matrix xi_refresh;  // empty when the refresh is disabled
  Matrix xi_l;
  GfNoise gf;
};
SweepNoise draw_sweep_noise(Rng& rng, const ChainData& data, const PriorParams& priors, const ChainConfig& cfg);

struct SweepOutput {
  GibbsState state;
  Matrix expected_gamma;  // data term of the last Gamma draw of the sweep
  Matrix expected_lp;     // data term of the L_p draw
  Matrix previous_lp;
  Matrix hf_unprojected;
  int jitter = 0;
};

// step_gamma_h -> project_hf -> step_gamma_refresh -> step_lp -> step_gf.
SweepOutput sweep(const GibbsState& state, const ChainData& data, const PriorParams& priors, const ChainConfig& cfg,
                  const SweepNoise& noise);

struct ChainResult {
  Matrix hfp;
  std::vector<double> trace_log_det_g11;
  std::vector<double> trace_norm_gamma_lp;
  int jitter_events = 0;
  GibbsState final_state;
};

ChainResult run_chain(const HankelDataset& ds, const PriorParams& priors, const GibbsState& initial,
                      const ChainConfig& cfg);
ChainResult run_chain(const HankelDataset& ds, Index rank, const ChainConfig& cfg);

}  // namespace bsid
