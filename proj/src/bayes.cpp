#include "bsid/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsid/kernels.hpp"
#include "bsid/linalg.hpp"

namespace bsid {

namespace {

// Sigma_s = s Lambda + k R R^T with s = 1/max(1, gamma), k = min(1, gamma).
// Sigma_1 = Sigma_s / s, so the mean is k Y R^T Sigma_s^{-1} and the noise
// is sqrt(k) G Xi Sigma_s^{-1/2}; gamma itself is never formed.
struct GammaScaling {
  double s = 1.0;
  double k = 1.0;
};

GammaScaling gamma_scaling(double log_gamma) {
  if (log_gamma <= 0.0) return {1.0, std::exp(log_gamma)};
  return {std::exp(-log_gamma), 1.0};
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

void require_shape(const Matrix& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << what << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
    throw ConfigError(os.str());
  }
}

RegressionDraw scaled_regression(const Matrix& target, const Matrix& regressors, const Matrix& lambda,
                                 const GibbsState& state, const Matrix& xi) {
  const GammaScaling sc = gamma_scaling(state.log_gamma());
  const Matrix sigma = sc.s * lambda + sc.k * kernels::gram_rows(regressors);
  const linalg::SpdFactor fac = linalg::spd_factor(sigma);
  RegressionDraw out;
  out.jitter = fac.jitter_applied;
  out.mean = sc.k * kernels::cross_rows(target, regressors) * fac.inverse;
  out.draw = out.mean + std::sqrt(sc.k) * (state.gf.dense() * xi) * fac.inv_sqrt;
  return out;
}

Matrix hf_times_uf(const GibbsState& state, const HankelDataset& ds) {
  if (ds.ni == 0) return Matrix::Zero(ds.yf.rows(), ds.yf.cols());
  return state.hf * ds.uf;
}

double log_abs_det(const Matrix& m) {
  const Eigen::PartialPivLU<Matrix> lu(m);
  double acc = 0.0;
  const Matrix& packed = lu.matrixLU();
  for (Index k = 0; k < packed.rows(); ++k) acc += std::log(std::abs(packed(k, k)));
  return acc;
}

}  // namespace

void sync_noise_terms(GibbsState& state) {
  state.log_abs_det_g11 = log_abs_det(state.gf.leading_block());
  if (!std::isfinite(state.log_abs_det_g11)) throw NumericalError("G_11 is singular");
  const Matrix q = state.gf.inverse().dense();
  state.psi_e = q.transpose() * q;
}

void ChainConfig::validate() const {
  if (total_iterations < 1) throw ConfigError("total_iterations must be positive");
  if (burn_in < 0 || burn_in >= total_iterations) {
    std::ostringstream os;
    os << "burn_in " << burn_in << " must lie in [0, " << total_iterations << ")";
    throw ConfigError(os.str());
  }
}

std::string to_string(GfVariant v) { return v == GfVariant::exact ? "exact" : "approx"; }

std::string to_string(AverageMode m) { return m == AverageMode::plain ? "plain" : "rao_blackwell"; }

GfVariant parse_gf_variant(const std::string& s) {
  if (s == "exact") return GfVariant::exact;
  if (s == "approx" || s == "independent_approx") return GfVariant::independent_approx;
  throw ConfigError("unknown G_f variant '" + s + "' (expected exact or approx)");
}

AverageMode parse_average_mode(const std::string& s) {
  if (s == "plain") return AverageMode::plain;
  if (s == "rao_blackwell" || s == "rb") return AverageMode::rao_blackwell;
  throw ConfigError("unknown average mode '" + s + "' (expected plain or rao_blackwell)");
}

ChainData::ChainData(const HankelDataset& ds) : ds_(&ds) {
  zp_pinv_t_ = linalg::pinv(ds.zp).pinv.transpose();
}

InitResult init_chain(const HankelDataset& ds, Index rank) {
  if (rank < 1) throw ConfigError("rank must be at least 1 for the Bayesian estimator");
  const Index i = ds.f;
  const LsEstimate ls = ls_markov(ds);
  const Matrix m = ls.hfp * ds.zp;
  InitResult out;
  out.svd = truncated_svd(m, rank);
  const Vector& s = out.svd.s;
  if (!(s(rank - 1) > 0.0)) {
    std::ostringstream os;
    os << "rank " << rank << " exceeds the numerical rank of H_fp Z_p";
    throw ConfigError(os.str());
  }
  const Vector root = s.cwiseSqrt();
  const ChainData data(ds);

  GibbsState& st = out.state;
  st.gamma = out.svd.u * root.asDiagonal();
  st.lp = root.asDiagonal() * (data.zp_pinv_t() * out.svd.v).transpose();
  st.hf = ls.hf;
  Matrix first = Matrix::Zero(i * ds.no, ds.no);
  first.topRows(ds.no).setIdentity();
  st.gf = BlockToeplitzLower(first, i);
  st.log_abs_det_g11 = 0.0;
  st.psi_e = Matrix::Identity(i * ds.no, i * ds.no);
  st.xp = st.lp * ds.zp;

  const Vector inv_s = s.cwiseInverse();
  PriorParams& pr = out.priors;
  pr.rank = rank;
  pr.lambda_gamma = (static_cast<double>(i * ds.no) * inv_s).asDiagonal();
  pr.lambda_l = (static_cast<double>(ds.j) * inv_s).asDiagonal();
  const Index hdim = i * ds.ni;
  const double tr = ls.hf.squaredNorm();
  if (hdim == 0) {
    pr.lambda_h = Matrix(0, 0);
  } else if (tr > 0.0) {
    pr.lambda_h = Matrix::Identity(hdim, hdim) * (static_cast<double>(i * i * ds.no * ds.ni) / tr);
  } else {
    pr.lambda_h = Matrix::Identity(hdim, hdim);
    out.warnings.emplace_back("least-squares H_f is zero; using Lambda_H = I");
  }
  return out;
}

RegressionDraw step_gamma_h(const GibbsState& state, const ChainData& data, const PriorParams& priors,
                            const Matrix& xi) {
  const HankelDataset& ds = data.ds();
  const Index r = priors.rank;
  const Index h = ds.f * ds.ni;
  require_shape(xi, ds.f * ds.no, r + h, "Xi_{Gamma,H}");
  Matrix reg(r + h, ds.j);
  reg.topRows(r) = state.xp;
  if (h > 0) reg.bottomRows(h) = ds.uf;
  return scaled_regression(ds.yf, reg, block_diag(priors.lambda_gamma, priors.lambda_h), state, xi);
}

RegressionDraw step_gamma_h(const GibbsState& state, const ChainData& data, const PriorParams& priors, Rng& rng) {
  const HankelDataset& ds = data.ds();
  return step_gamma_h(state, data, priors, rng.normal_matrix(ds.f * ds.no, priors.rank + ds.f * ds.ni));
}

Matrix project_hf(const Matrix& hf_unprojected, Index horizon, Index no, Index ni) {
  if (ni == 0) return Matrix::Zero(horizon * no, 0);
  require_shape(hf_unprojected, horizon * no, horizon * ni, "H_f");
  return toeplitz_from_last_block_row(hf_unprojected.bottomRows(no), horizon);
}

RegressionDraw step_gamma_refresh(const GibbsState& state, const ChainData& data, const PriorParams& priors,
                                  const Matrix& xi) {
  const HankelDataset& ds = data.ds();
  require_shape(xi, ds.f * ds.no, priors.rank, "Xi_Gamma");
  const Matrix target = ds.yf - hf_times_uf(state, ds);
  return scaled_regression(target, state.xp, priors.lambda_gamma, state, xi);
}

RegressionDraw step_gamma_refresh(const GibbsState& state, const ChainData& data, const PriorParams& priors,
                                  Rng& rng) {
  return step_gamma_refresh(state, data, priors, rng.normal_matrix(data.ds().f * data.ds().no, priors.rank));
}

RegressionDraw step_lp(const GibbsState& state, const ChainData& data, const PriorParams& priors, const Matrix& xi) {
  const HankelDataset& ds = data.ds();
  require_shape(xi, priors.rank, ds.j, "Xi_L");
  const Matrix pg = state.psi_e * state.gamma;
  const Matrix sigma = state.gamma.transpose() * pg + priors.lambda_l;
  const linalg::SpdFactor fac = linalg::spd_factor(sigma);
  const Matrix target = ds.yf - hf_times_uf(state, ds);
  const Matrix projected = kernels::cross_rows(target, data.zp_pinv_t());  // (Y_f - H_f U_f) Z_p^+
  RegressionDraw out;
  out.jitter = fac.jitter_applied;
  out.mean = fac.inverse * (pg.transpose() * projected);
  out.draw = out.mean + fac.inv_sqrt * kernels::cross_rows(xi, data.zp_pinv_t());
  return out;
}

RegressionDraw step_lp(const GibbsState& state, const ChainData& data, const PriorParams& priors, Rng& rng) {
  return step_lp(state, data, priors, rng.normal_matrix(priors.rank, data.ds().j));
}

double gf_dof(GfVariant variant, Index horizon, Index width, Index no) {
  const double i = static_cast<double>(horizon);
  const double j = static_cast<double>(width);
  const double n = static_cast<double>(no);
  const double dof = variant == GfVariant::exact ? i + j - i * n : i * j - i * n + 1.0;
  if (!(dof > n - 1.0)) {
    std::ostringstream os;
    os << "G_f posterior is improper: degrees of freedom " << dof << " must exceed no - 1 = " << n - 1.0
       << " (i = " << horizon << ", j = " << width << ", no = " << no << ", variant " << to_string(variant) << ")";
    throw ConfigError(os.str());
  }
  return dof;
}

Matrix gf_omega(const Matrix& residual, Index horizon, Index no, GfVariant variant) {
  const Index i = horizon;
  const Index dim = i * no;
  require_shape(residual, dim, residual.cols(), "residual");
  Matrix omega = Matrix::Zero(dim, dim);
  if (variant == GfVariant::independent_approx) {
    // Omega(k, k') = sum_{l >= max(k, k')} P_{l-k, l-k'} with P = E E^T.
    const Matrix p = kernels::gram_rows(residual);
    for (Index k = 0; k < i; ++k) {
      for (Index kk = 0; kk < i; ++kk) {
        auto blk = omega.block(k * no, kk * no, no, no);
        for (Index l = std::max(k, kk); l < i; ++l) blk += p.block((l - k) * no, (l - kk) * no, no, no);
      }
    }
    return omega;
  }
  // Exact: average over each Hankel anti-diagonal before squaring.
  // W(t, (k, s)) = sum_{c + l = t, l >= k} E_{l-k}(s, c), Omega = W^T diag(1/n_t^2) W.
  const Index j = residual.cols();
  const HankelSelector hs(j, i);
  const Vector counts = hs.column_counts();
  Matrix w = Matrix::Zero(hs.generator_length(), dim);
  for (Index k = 0; k < i; ++k) {
    for (Index l = k; l < i; ++l) {
      const auto e = residual.middleRows((l - k) * no, no);
      for (Index s = 0; s < no; ++s) {
        auto col = w.col(k * no + s);
        for (Index c = 0; c < j; ++c) col(c + l) += e(s, c);
      }
    }
  }
  w.array().colwise() /= counts.array();
  return w.transpose() * w;
}

GfNoise draw_gf_noise(Rng& rng, double dof, Index no, Index horizon) {
  GfNoise out;
  out.theta = sample_wishart(Matrix::Identity(no, no), dof, rng);
  out.normals.reserve(static_cast<std::size_t>(std::max<Index>(horizon - 1, 0)));
  for (Index l = 1; l < horizon; ++l) out.normals.push_back(rng.normal_matrix(no, no));
  return out;
}

Matrix chain_residual(const GibbsState& state, const HankelDataset& ds) {
  return ds.yf - state.gamma * state.xp - hf_times_uf(state, ds);
}

GfDraw step_gf(const GibbsState& state, const ChainData& data, GfVariant variant, const GfNoise& noise) {
  const HankelDataset& ds = data.ds();
  const Index i = ds.f;
  const Index no = ds.no;
  if (static_cast<Index>(noise.normals.size()) != i - 1) throw ConfigError("G_f noise has the wrong block count");
  GfDraw out;
  out.omega = gf_omega(chain_residual(state, ds), i, no, variant);
  const Matrix r = linalg::reverse_cholesky(out.omega, &out.jitter);
  Matrix n(i * no, no);
  n.topRows(no) = linalg::sym_sqrt(noise.theta);
  for (Index l = 1; l < i; ++l) n.middleRows(l * no, no) = noise.normals[static_cast<std::size_t>(l - 1)];
  const Matrix theta = r.triangularView<Eigen::Lower>().solve(n);
  Matrix qcol(i * no, no);
  for (Index l = 0; l < i; ++l) qcol.middleRows(l * no, no) = theta.middleRows(l * no, no).transpose();
  out.gf = BlockToeplitzLower(qcol, i).inverse();
  return out;
}

GfDraw step_gf(const GibbsState& state, const ChainData& data, GfVariant variant, Rng& rng) {
  const HankelDataset& ds = data.ds();
  const double dof = gf_dof(variant, ds.f, ds.j, ds.no);
  return step_gf(state, data, variant, draw_gf_noise(rng, dof, ds.no, ds.f));
}

double prior_density_log(const BlockToeplitzLower& gf) {
  const double scale = static_cast<double>(gf.num_blocks() * gf.block_rows());
  return -scale * log_abs_det(gf.leading_block());
}

double group_action_log_jacobian(const BlockToeplitzLower& a) {
  const double scale = static_cast<double>(a.num_blocks() * a.block_rows());
  return scale * log_abs_det(a.leading_block());
}

Matrix sample_wishart(const Matrix& scale, double dof, Rng& rng) {
  const Index d = scale.rows();
  if (scale.cols() != d) throw ConfigError("Wishart scale must be square");
  if (!(dof > static_cast<double>(d) - 1.0)) {
    std::ostringstream os;
    os << "Wishart degrees of freedom " << dof << " must exceed " << d - 1;
    throw ConfigError(os.str());
  }
  const Eigen::LLT<Matrix> llt(scale);
  if (llt.info() != Eigen::Success) throw NumericalError("Wishart scale is not positive definite");
  Matrix a = Matrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) a(k, k) = std::sqrt(rng.chi_squared(dof - static_cast<double>(k)));
  for (Index c = 0; c < d; ++c)
    for (Index r = c + 1; r < d; ++r) a(r, c) = rng.normal();
  const Matrix la = llt.matrixL() * a;
  return la * la.transpose();
}

SweepNoise draw_sweep_noise(Rng& rng, const ChainData& data, const PriorParams& priors, const ChainConfig& cfg) {
  const HankelDataset& ds = data.ds();
  SweepNoise out;
  out.xi_gamma_h = rng.normal_matrix(ds.f * ds.no, priors.rank + ds.f * ds.ni);
  if (cfg.gamma_refresh) out.xi_refresh = rng.normal_matrix(ds.f * ds.no, priors.rank);
  out.xi_l = rng.normal_matrix(priors.rank, ds.j);
  out.gf = draw_gf_noise(rng, gf_dof(cfg.gf_variant, ds.f, ds.j, ds.no), ds.no, ds.f);
  return out;
}

SweepOutput sweep(const GibbsState& state, const ChainData& data, const PriorParams& priors, const ChainConfig& cfg,
                  const SweepNoise& noise) {
  const HankelDataset& ds = data.ds();
  const Index r = priors.rank;
  SweepOutput out;
  out.state = state;
  out.previous_lp = state.lp;
  GibbsState& st = out.state;

  const RegressionDraw gh = step_gamma_h(st, data, priors, noise.xi_gamma_h);
  out.jitter += gh.jitter;
  out.hf_unprojected = gh.draw.rightCols(ds.f * ds.ni);
  st.hf = project_hf(out.hf_unprojected, ds.f, ds.no, ds.ni);
  st.gamma = gh.draw.leftCols(r);
  out.expected_gamma = gh.mean.leftCols(r);

  if (cfg.gamma_refresh) {
    const RegressionDraw rf = step_gamma_refresh(st, data, priors, noise.xi_refresh);
    out.jitter += rf.jitter;
    st.gamma = rf.draw;
    out.expected_gamma = rf.mean;
  }

  const RegressionDraw lp = step_lp(st, data, priors, noise.xi_l);
  out.jitter += lp.jitter;
  st.lp = lp.draw;
  out.expected_lp = lp.mean;
  st.xp = st.lp * ds.zp;

  GfDraw gf = step_gf(st, data, cfg.gf_variant, noise.gf);
  out.jitter += gf.jitter;
  st.gf = std::move(gf.gf);
  sync_noise_terms(st);
  return out;
}

ChainResult run_chain(const HankelDataset& ds, const PriorParams& priors, const GibbsState& initial,
                      const ChainConfig& cfg) {
  cfg.validate();
  const ChainData data(ds);
  gf_dof(cfg.gf_variant, ds.f, ds.j, ds.no);
  Rng rng(cfg.seed);
  ChainResult out;
  out.trace_log_det_g11.reserve(static_cast<std::size_t>(cfg.total_iterations));
  out.trace_norm_gamma_lp.reserve(static_cast<std::size_t>(cfg.total_iterations));
  Matrix sum = Matrix::Zero(ds.f * ds.no, ds.zp.rows());
  GibbsState state = initial;
  for (Index n = 1; n <= cfg.total_iterations; ++n) {
    SweepOutput sw;
    try {
      sw = sweep(state, data, priors, cfg, draw_sweep_noise(rng, data, priors, cfg));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "iteration " << n << ": " << e.what();
      throw NumericalError(os.str());
    }
    out.jitter_events += sw.jitter;
    state = std::move(sw.state);
    const Matrix product = state.gamma * state.lp;
    out.trace_log_det_g11.push_back(state.log_abs_det_g11);
    out.trace_norm_gamma_lp.push_back(product.norm());
    if (n > cfg.burn_in) {
      if (cfg.average_mode == AverageMode::plain)
        sum += product;
      else
        sum += 0.5 * (sw.expected_gamma * sw.previous_lp + state.gamma * sw.expected_lp);
    }
  }
  if (!sum.allFinite()) throw NumericalError("chain average is not finite");
  out.hfp = sum / static_cast<double>(cfg.total_iterations - cfg.burn_in);
  out.final_state = std::move(state);
  return out;
}

ChainResult run_chain(const HankelDataset& ds, Index rank, const ChainConfig& cfg) {
  const InitResult init = init_chain(ds, rank);
  return run_chain(ds, init.priors, init.state, cfg);
}

}  // namespace bsid
