// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bsid/bayes.hpp"
#include "bsid/expharness.hpp"
#include "bsid/linalg.hpp"
#include "bsid/structops.hpp"
#include "../support/oracles.hpp"
#include "../support/siso_reference.hpp"

using namespace bsid;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Random factor whose leading block stays well conditioned, so numerically
// zero singular values are not confused with genuine ones.
BlockToeplitzLower random_toeplitz(Rng& rng, Index n, Index b) {
  Matrix col = 0.3 * rng.normal_matrix(n * b, b);
  Matrix lead;
  do {
    lead = Matrix::Identity(b, b) + 0.3 * rng.normal_matrix(b, b);
  } while (Eigen::JacobiSVD<Matrix>(lead).singularValues().minCoeff() < 0.5);
  col.topRows(b) = lead;
  return BlockToeplitzLower(col, n);
}

Index uniform(Rng& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng.engine()() % static_cast<std::uint64_t>(hi - lo + 1));
}

StateSpaceModel quiet_mimo3() {
  StateSpaceModel m = preset_model("mimo3");
  m.Sigma.setZero();
  return m;
}

constexpr Index kF = 6;
constexpr Index kLength = 600;
constexpr std::uint64_t kDataSeed = 2024;

HankelDataset noiseless_dataset() { return assemble(simulate_white_input(quiet_mimo3(), kLength, kDataSeed).data, kF, kF); }

EstimatorOptions rank3_options(std::uint64_t seed) {
  EstimatorOptions o;
  o.rank.fixed = 3;
  o.chain.total_iterations = 500;
  o.chain.burn_in = 100;
  o.chain.seed = seed;
  return o;
}

// 1. Selector, block-vec and vectorization identities.
Outcome structural_identities() {
  Rng rng(1);
  double worst = 0.0;
  Index rank_failures = 0;
  Index cases = 0;
  for (Index no = 1; no <= 3; ++no) {
    for (Index i = 2; i <= 6; ++i) {
      for (Index j = 2; j <= 6; ++j) {
        ++cases;
        for (Triangle tri : {Triangle::lower, Triangle::upper}) {
          const ToeplitzSelector t(i, tri);
          const Vector g = rng.normal_matrix(i, 1).col(0);
          const Vector v = t.apply(g);
          Matrix full = Matrix::Zero(i, i);
          for (Index r = 0; r < i; ++r)
            for (Index c = 0; c < i; ++c) {
              if (tri == Triangle::lower && r >= c) full(r, c) = g(r - c);
              if (tri == Triangle::upper && c >= r) full(r, c) = g(c - r);
            }
          worst = std::max(worst, (v - oracle::vec(full)).norm() / v.norm());
          const Matrix d = t.dense();
          const Vector back = (d.transpose() * d).diagonal().cwiseInverse().asDiagonal() * t.apply_transpose(v);
          worst = std::max(worst, (back - g).norm() / g.norm());
        }
        const HankelSelector h(i, j);
        if (Eigen::FullPivLU<Matrix>(h.dense()).rank() != i + j - 1) ++rank_failures;

        const Index k = uniform(rng, 1, 4), w = uniform(rng, 1, 3);
        const Matrix q = rng.normal_matrix(no + 1, no);
        const Matrix r = rng.normal_matrix(no, k * w);
        const Matrix lhs = block_vec(q * r, w);
        worst = std::max(worst, (lhs - oracle::kron(Matrix::Identity(k, k), q) * block_vec(r, w)).norm() / lhs.norm());

        const Matrix gf = random_toeplitz(rng, i, no).dense();
        const Matrix ebar = rng.normal_matrix(no, i + j - 1);
        const Vector lv = oracle::vec(gf * build_block_hankel(ebar, i, j, 0));
        const Vector rv = oracle::kron(Matrix::Identity(j, j), gf) *
                          oracle::kron(h.dense(), Matrix::Identity(no, no)) * oracle::vec(ebar);
        worst = std::max(worst, (lv - rv).norm() / lv.norm());
      }
    }
  }
  return {worst <= 1e-10 && rank_failures == 0,
          std::to_string(cases) + " shapes, max relative residual " + fmt("%.2e", worst) + ", Hankel selector rank failures " +
              std::to_string(rank_failures)};
}

// 2. Pseudo-determinant of the Hankel noise covariance under G -> c G.
Outcome pseudo_determinant_law() {
  Rng rng(2);
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    const Index i = uniform(rng, 2, 6), j = uniform(rng, 2, 6), no = uniform(rng, 1, 3);
    const BlockToeplitzLower g = random_toeplitz(rng, i, no);
    const double c = 0.5 + 1.5 * std::abs(rng.normal());
    const Matrix hk = oracle::kron(HankelSelector(i, j).dense(), Matrix::Identity(no, no));
    const auto log_pdet = [&](const BlockToeplitzLower& gg) {
      const Matrix m = oracle::kron(Matrix::Identity(j, j), gg.dense()) * hk;
      return log_pseudo_determinant(m * m.transpose());
    };
    const BlockToeplitzLower scaled(g.first_block_column() * c, i);
    const double lhs = log_pdet(scaled) - log_pdet(g);
    const double rhs = 2.0 * static_cast<double>(i + j - 1) *
                       std::log(std::abs(scaled.leading_block().determinant() / g.leading_block().determinant()));
    worst = std::max(worst, std::abs(std::expm1(lhs - rhs)));
  }
  return {worst <= 1e-6, "50 instances, max relative deviation of the ratio " + fmt("%.2e", worst)};
}

// 3. Invariance of the prior under left and right group actions.
Outcome group_invariance() {
  Rng rng(3);
  double worst = 0.0;
  for (const bool left : {true, false}) {
    for (int n = 0; n < 100; ++n) {
      const Index i = uniform(rng, 1, 5), no = uniform(rng, 1, 3);
      const BlockToeplitzLower a = random_toeplitz(rng, i, no);
      const BlockToeplitzLower g = random_toeplitz(rng, i, no);
      const Index d = i * no * no;
      Matrix jac(d, d);
      for (Index k = 0; k < d; ++k) {
        const BlockToeplitzLower e(linalg::unvec(Vector::Unit(d, k), i * no, no), i);
        jac.col(k) = oracle::vec((left ? a * e : e * a).first_block_column());
      }
      const Eigen::PartialPivLU<Matrix> lu(jac);
      double log_jac = 0.0;
      for (Index k = 0; k < d; ++k) log_jac += std::log(std::abs(lu.matrixLU()(k, k)));
      const BlockToeplitzLower moved = left ? a * g : g * a;
      const double lhs = prior_density_log(moved) + log_jac;
      const double rhs = prior_density_log(g);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }
  return {worst <= 1e-9, "200 actions, max relative deviation " + fmt("%.2e", worst)};
}

// Largest |z| and the aggregate ||mean - target|| / sqrt(sum se^2).
struct MeanCheck {
  double aggregate = 0.0;
  double max_z = 0.0;
};

MeanCheck monte_carlo_mean(const std::function<Matrix()>& draw, const Matrix& target, int count) {
  Matrix sum = Matrix::Zero(target.rows(), target.cols());
  Matrix sq = sum;
  for (int n = 0; n < count; ++n) {
    const Matrix x = draw();
    sum += x;
    sq += x.cwiseProduct(x);
  }
  const Matrix mean = sum / count;
  const Matrix var = (sq / count - mean.cwiseProduct(mean)) * (static_cast<double>(count) / (count - 1));
  const Matrix se = (var / count).cwiseSqrt();
  MeanCheck out;
  out.aggregate = (mean - target).norm() / se.norm();
  out.max_z = ((mean - target).cwiseAbs().array() / se.array()).maxCoeff();
  return out;
}

// 4. Each conditional draw is centred on its data term.
Outcome conditional_means() {
  const HankelDataset ds = assemble(simulate_white_input(preset_model("mimo3"), 200, 4).data, 3, 3);
  const ChainData data(ds);
  const InitResult init = init_chain(ds, 3);
  ChainConfig cfg;
  Rng warm(40);
  GibbsState st = init.state;
  for (int n = 0; n < 5; ++n) st = sweep(st, data, init.priors, cfg, draw_sweep_noise(warm, data, init.priors, cfg)).state;

  const int count = 10000;
  Rng rng(41);
  std::ostringstream os;
  bool pass = true;
  const auto report = [&](const char* name, const MeanCheck& c) {
    pass = pass && c.aggregate <= 3.0;
    os << name << " " << fmt("%.2f", c.aggregate) << " se (max element z " << fmt("%.2f", c.max_z) << "), ";
  };
  const Matrix gh_mean = step_gamma_h(st, data, init.priors, Matrix::Zero(6, 9)).mean;
  report("gamma_h", monte_carlo_mean([&] { return step_gamma_h(st, data, init.priors, rng).draw; }, gh_mean, count));
  const Matrix rf_mean = step_gamma_refresh(st, data, init.priors, Matrix::Zero(6, 3)).mean;
  report("gamma_refresh",
         monte_carlo_mean([&] { return step_gamma_refresh(st, data, init.priors, rng).draw; }, rf_mean, count));
  const Matrix lp_mean = step_lp(st, data, init.priors, Matrix::Zero(3, ds.j)).mean;
  report("lp", monte_carlo_mean([&] { return step_lp(st, data, init.priors, rng).draw; }, lp_mean, count));

  Matrix scale(3, 3);
  scale << 2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5;
  const double dof = 6.5;
  Matrix wsum = Matrix::Zero(3, 3);
  for (int n = 0; n < count; ++n) wsum += sample_wishart(scale, dof, rng);
  const double werr = oracle::rel_err(wsum / count, dof * scale);
  pass = pass && werr <= 0.05;
  os << "Wishart mean relative error " << fmt("%.3f", werr);
  return {pass, os.str()};
}

// 5. Noiseless recovery of H_fp.
Outcome noiseless_recovery() {
  const StateSpaceModel m = quiet_mimo3();
  const HankelDataset ds = noiseless_dataset();
  const Matrix truth = markov_hfp(m, kF, kF).hfp;
  const WeightPair w = default_weights(ds, linalg::sample_covariance(ds.source.y));
  const EstimatorOptions opts = rank3_options(5);
  const Matrix svd = estimate_hfp(Method::svd_truncated, ds, w, opts).hfp;
  const Matrix bayes = estimate_hfp(Method::bayes_gibbs, ds, w, opts).hfp;
  const double e_svd = oracle::rel_err(svd, truth);
  const double e_bayes = oracle::rel_err(bayes, truth);
  const double z_svd = oracle::rel_err(svd * ds.zp, truth * ds.zp);
  const double z_bayes = oracle::rel_err(bayes * ds.zp, truth * ds.zp);
  return {e_svd <= 0.05 && e_bayes <= 0.05,
          "relative error LS+SVD " + fmt("%.4f", e_svd) + ", Gibbs " + fmt("%.4f", e_bayes) +
              " (limit 0.05); on the data span ||(H-Htrue)Z_p||/||Htrue Z_p||: LS+SVD " + fmt("%.2e", z_svd) +
              ", Gibbs " + fmt("%.2e", z_bayes)};
}

// 6. Weighted risk under colored output noise.
Outcome variance_reduction() {
  const StateSpaceModel m = quiet_mimo3();
  RiskOptions ro;
  ro.trials = 20;
  ro.f = ro.p = kF;
  ro.length = kLength;
  ro.alpha = 0.5;
  ro.seed = 6;
  const EstimatorOptions opts = rank3_options(60);
  const RiskSummary ls = risk_monte_carlo(m, method_estimator(Method::ls, opts), ro);
  const RiskSummary svd = risk_monte_carlo(m, method_estimator(Method::svd_truncated, opts), ro);
  const RiskSummary bayes = risk_monte_carlo(m, method_estimator(Method::bayes_gibbs, opts), ro);
  const bool complete = ls.failures == 0 && svd.failures == 0 && bayes.failures == 0;
  const auto show = [](const RiskSummary& r) { return fmt("%.4g", r.mean) + " +- " + fmt("%.2g", r.standard_error); };
  return {complete && bayes.mean <= ls.mean && bayes.mean <= 1.05 * svd.mean,
          "mean risk LS " + show(ls) + ", SVD " + show(svd) + ", Gibbs " + show(bayes) + ", failed trials " +
              std::to_string(ls.failures + svd.failures + bayes.failures)};
}

// 7. Block sweep against the scalar reference.
Outcome siso_consistency() {
  const HankelDataset ds = assemble(simulate_white_input(preset_model("siso"), 200, 7).data, 4, 4);
  const ChainData data(ds);
  const siso_ref::Data ref_data = siso_ref::make_data(ds);
  const InitResult init = init_chain(ds, 1);
  double worst = 0.0;
  for (const GfVariant v : {GfVariant::independent_approx, GfVariant::exact}) {
    ChainConfig cfg;
    cfg.gf_variant = v;
    Rng rng(70);
    GibbsState st = init.state;
    for (int n = 0; n < 50; ++n) {
      const SweepNoise noise = draw_sweep_noise(rng, data, init.priors, cfg);
      const SweepOutput out = sweep(st, data, init.priors, cfg, noise);
      const siso_ref::Step ref =
          siso_ref::sweep(siso_ref::from_gibbs(st), ref_data, init.priors, noise, v == GfVariant::exact, true);
      const siso_ref::State got = siso_ref::from_gibbs(out.state);
      worst = std::max({worst, oracle::rel_err(got.gamma, ref.state.gamma), oracle::rel_err(got.hf, ref.state.hf),
                        oracle::rel_err(got.lp, ref.state.lp), oracle::rel_err(got.g, ref.state.g)});
      st = out.state;
    }
  }
  return {worst <= 1e-10, "2 variants x 50 sweeps, max per-step relative difference " + fmt("%.2e", worst)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string drop_last_column(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

// 8. Experiment determinism, loader round trip and fixed splits.
Outcome pipeline() {
  const fs::path data_dir = BSID_DATA_DIR;
  const fs::path tmp = fs::temp_directory_path() / "bsid_acceptance";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  const std::string text =
      "seed = 8\nalphas = 0, 0.5\nmethods = ls, bayes-gibbs\ntrials = 2\nrank = 3\n"
      "[dataset]\nname = synthetic\npath = synthetic.dat\ninputs = 0 1\noutputs = 2 3\n"
      "estimation_length = 600\nvalidation_length = 600\ntruth_model = mimo3.json\n";
  std::vector<std::string> csvs;
  std::size_t records = 0;
  for (int run = 0; run < 2; ++run) {
    ExperimentConfig cfg = parse_experiment_config_text(text, data_dir);
    cfg.output = tmp / ("run" + std::to_string(run));
    const ExperimentResult res = run_experiment(cfg);
    write_experiment_outputs(cfg, res);
    records = res.records.size();
    csvs.push_back(drop_last_column(read_file(cfg.output / "results.csv")));
  }
  const bool same = csvs[0] == csvs[1];

  DatasetSpec spec;
  spec.name = "synthetic";
  spec.path = data_dir / "synthetic.dat";
  spec.input_columns = {0, 1};
  spec.output_columns = {2, 3};
  const TimeSeries raw = load_daisy(spec);
  write_daisy(tmp / "copy.dat", raw);
  spec.path = tmp / "copy.dat";
  const TimeSeries back = load_daisy(spec);
  const bool round_trip = back.u == raw.u && back.y == raw.y;

  write_daisy(tmp / "dryer.dat", raw.segment(0, 1000));
  spec.name = "dryer";
  spec.path = tmp / "dryer.dat";
  spec.estimation_length = 350;
  spec.validation_length = 650;
  const Split sp = split_dataset(load_daisy(spec), spec);
  const bool split_ok = sp.estimation.length() == 350 && sp.validation.length() == 650 &&
                        sp.validation.y.col(0) == raw.y.col(350);
  fs::remove_all(tmp);
  return {records == 8 && same && round_trip && split_ok,
          std::to_string(records) + " records, CSV identical across reruns: " + (same ? "yes" : "no") +
              ", loader round trip: " + (round_trip ? "yes" : "no") + ", 350/650 split: " + (split_ok ? "yes" : "no")};
}

// Batch-means standard error of the mean.
double batch_se(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t b = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  const std::size_t k = n / b;
  std::vector<double> means;
  for (std::size_t m = 0; m < k; ++m) {
    double s = 0.0;
    for (std::size_t t = 0; t < b; ++t) s += x[m * b + t];
    means.push_back(s / static_cast<double>(b));
  }
  double mu = 0.0;
  for (double v : means) mu += v;
  mu /= static_cast<double>(k);
  double ss = 0.0;
  for (double v : means) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// 9. Geweke mean-split diagnostic on the log|det G11| trace.
Outcome chain_health() {
  const HankelDataset ds = noiseless_dataset();
  const InitResult init = init_chain(ds, 3);
  int passed = 0;
  std::ostringstream zs;
  for (int s = 0; s < 20; ++s) {
    ChainConfig cfg = rank3_options(mix_seed(9, static_cast<std::uint64_t>(s))).chain;
    const ChainResult res = run_chain(ds, init.priors, init.state, cfg);
    const std::vector<double> kept(res.trace_log_det_g11.begin() + cfg.burn_in, res.trace_log_det_g11.end());
    const std::size_t n = kept.size();
    const std::vector<double> first(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(n / 10));
    const std::vector<double> last(kept.end() - static_cast<std::ptrdiff_t>(n / 2), kept.end());
    const double sa = batch_se(first), sb = batch_se(last);
    const double z = (mean_of(first) - mean_of(last)) / std::sqrt(sa * sa + sb * sb);
    if (std::abs(z) < 2.576) ++passed;
    zs << (s ? " " : "") << fmt("%.2f", z);
  }
  return {passed >= 19, std::to_string(passed) + "/20 runs with |z| < 2.576 (z: " + zs.str() + ")"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_s;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria = {
      {1, 5, structural_identities}, {2, 10, pseudo_determinant_law}, {3, 10, group_invariance},
      {4, 60, conditional_means},    {5, 120, noiseless_recovery},    {6, 900, variance_reduction},
      {7, 60, siso_consistency},     {8, 60, pipeline},               {9, 600, chain_health},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = out.pass && secs <= c.limit_s;
    if (!pass) ++failures;
    std::printf("criterion %d %s: %s [%.1f s, limit %.0f s]\n", c.id, pass ? "PASS" : "FAIL", out.detail.c_str(), secs,
                c.limit_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
