#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "bsid/expharness.hpp"
#include "bsid/linalg.hpp"
#include "../support/oracles.hpp"

using namespace bsid;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("bsid_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

DatasetSpec spec_for(const fs::path& p) {
  DatasetSpec s;
  s.name = "d";
  s.path = p;
  s.input_columns = {0};
  s.output_columns = {1, 2};
  s.estimation_length = 2;
  s.validation_length = 1;
  return s;
}

}  // namespace

TEST_SUITE("expharness") {
  TEST_CASE("loading whitespace-separated data") {
    TempDir tmp;
    const fs::path p = tmp.path() / "a.dat";
    write_text(p, "# header\n% note\n\n1 2 3\n  4\t5 6\n7 8 9\n");
    const TimeSeries ts = load_daisy(spec_for(p));
    CHECK(ts.length() == 3);
    CHECK(ts.u(0, 1) == 4.0);
    CHECK(ts.y(1, 2) == 9.0);
    CHECK(ts.y(0, 0) == 2.0);

    DatasetSpec none = spec_for(p);
    none.output_columns.clear();
    CHECK_THROWS_WITH_AS(load_daisy(none), "no output columns", DataError);
    DatasetSpec wide = spec_for(p);
    wide.output_columns = {5};
    CHECK_THROWS_AS(load_daisy(wide), DataError);

    write_text(p, "1 2 3\n4 x 6\n");
    CHECK_THROWS_WITH_AS(load_daisy(spec_for(p)), doctest::Contains(":2:"), DataError);
    write_text(p, "1 2 3\n4 5\n");
    CHECK_THROWS_AS(load_daisy(spec_for(p)), DataError);
    write_text(p, "1 nan 3\n");
    CHECK_THROWS_AS(load_daisy(spec_for(p)), DataError);
    CHECK_THROWS_AS(load_daisy(spec_for(tmp.path() / "missing.dat")), DataError);
  }

  TEST_CASE("data files round trip exactly") {
    TempDir tmp;
    Rng rng(1);
    const TimeSeries ts{rng.normal_matrix(1, 30), rng.normal_matrix(2, 30)};
    const fs::path p = tmp.path() / "rt.dat";
    write_daisy(p, ts);
    const TimeSeries back = load_daisy(spec_for(p));
    CHECK(back.u == ts.u);
    CHECK(back.y == ts.y);
  }

  TEST_CASE("estimation and validation split") {
    TimeSeries ts{Matrix(0, 10), Matrix(1, 10)};
    for (Index k = 0; k < 10; ++k) ts.y(0, k) = static_cast<double>(k);
    DatasetSpec s;
    s.name = "s";
    s.estimation_length = 6;
    s.validation_length = 4;
    Split sp = split_dataset(ts, s);
    CHECK(sp.estimation.y(0, 5) == 5.0);
    CHECK(sp.validation.y(0, 0) == 6.0);
    s.validation_length = 5;
    CHECK_THROWS_WITH_AS(split_dataset(ts, s), "dataset 's' has 10 samples, 11 required", DataError);
    s.reuse = true;
    sp = split_dataset(ts, s);
    CHECK(sp.validation.y(0, 0) == 0.0);
    CHECK(sp.validation.length() == 5);
  }

  TEST_CASE("detrending uses the estimation window") {
    TimeSeries ts{Matrix(1, 4), Matrix(1, 4)};
    ts.u << 2, 2, 2, 2;
    ts.y << 1, 2, 3, 4;
    const TimeSeries d = detrend(ts, 2);
    CHECK(d.y(0, 0) == -0.5);
    CHECK(d.y(0, 3) == 2.5);
    CHECK(d.u.norm() == 0.0);
    CHECK(detrend(ts).y.rowwise().sum()(0) == doctest::Approx(0.0));
  }

  TEST_CASE("colored contamination statistics") {
    Matrix sigma(2, 2);
    sigma << 2.0, 0.6, 0.6, 1.0;
    const double alpha = 0.5;
    const Index n = 100000;
    const Matrix v = colored_noise(sigma, alpha, n, 17);
    const Matrix cov = linalg::sample_covariance(v);
    CHECK(oracle::rel_err(cov, alpha * alpha * sigma) <= 0.1);
    const double lag1 = (v.leftCols(n - 1).row(0).array() * v.rightCols(n - 1).row(0).array()).mean() / cov(0, 0);
    CHECK(lag1 == doctest::Approx(0.5).epsilon(0.05));
    CHECK(v.col(0).norm() > 0.0);

    TimeSeries ts{Matrix(0, 50), Matrix::Ones(2, 50)};
    CHECK(contaminate(ts, 0.0, sigma, 3).y == ts.y);
    const TimeSeries c = contaminate(ts, alpha, sigma, 3);
    CHECK(oracle::rel_err(c.y - ts.y, colored_noise(sigma, alpha, 50, 3)) <= 1e-15);
  }

  TEST_CASE("normalized prediction error") {
    Matrix y(1, 2);
    y << 1, 2;
    CHECK(normalized_prediction_error(y, y).value == 0.0);
    CHECK(normalized_prediction_error(Matrix::Zero(1, 2), y).value == 1.0);
    Matrix yhat(1, 2);
    yhat << 0, 2;
    CHECK(normalized_prediction_error(yhat, y).value == doctest::Approx(0.2));
    CHECK(normalized_prediction_error(5.0 * yhat, 5.0 * y).value == doctest::Approx(0.2));
    CHECK(normalized_prediction_error(yhat, y, 1).value == 0.0);

    Matrix two(2, 2);
    two << 1, 2, 0, 0;
    Matrix pred(2, 2);
    pred << 0, 2, 1, 1;
    const Npe npe = normalized_prediction_error(pred, two);
    CHECK(npe.value == doctest::Approx(0.2));
    REQUIRE(npe.excluded_channels.size() == 1);
    CHECK(npe.excluded_channels[0] == 1);
    CHECK_THROWS_AS(normalized_prediction_error(pred, Matrix::Zero(2, 2)), DataError);

    Matrix den(1, 2);
    den << 2, 4;
    CHECK(normalized_prediction_error(yhat, y, 0, &den).value == doctest::Approx(0.05));
  }

  TEST_CASE("method names and rank policy") {
    CHECK(parse_method("svd") == Method::svd_truncated);
    CHECK(parse_method("bayes") == Method::bayes_gibbs);
    CHECK(to_string(Method::svd_truncated) == "svd-truncated");
    CHECK(parse_method(to_string(Method::bayes_gibbs)) == Method::bayes_gibbs);
    CHECK_THROWS_AS(parse_method("kalman"), ConfigError);
    const Vector sv = Eigen::Vector4d(1.0, 0.5, 0.1, 0.01);
    CHECK(RankPolicy{}.resolve(sv, 10) == 4);
    CHECK(RankPolicy{}.resolve(sv, 2) == 2);
    CHECK(RankPolicy{3}.resolve(sv, 2) == 3);
    CHECK_THROWS_AS(RankPolicy{5}.resolve(sv, 10), ConfigError);
  }

  TEST_CASE("Monte-Carlo risk against oracle estimators") {
    const StateSpaceModel m = preset_model("mimo3");
    RiskOptions opts;
    opts.trials = 3;
    opts.length = 300;
    opts.f = opts.p = 4;
    opts.seed = 9;
    const Matrix truth = markov_hfp(m, 4, 4).hfp;
    const RiskSummary exact = risk_monte_carlo(m, [&](const HankelDataset&, const WeightPair&) { return truth; }, opts);
    CHECK(exact.mean == 0.0);
    CHECK(exact.values.size() == 3);

    double expect = 0.0;
    for (Index t = 0; t < 3; ++t) {
      const TimeSeries ts = simulate_white_input(m, 300, mix_seed(9, static_cast<std::uint64_t>(t))).data;
      const HankelDataset ds = assemble(ts, 4, 4);
      const WeightPair w = default_weights(ds, linalg::sample_covariance(ts.y));
      expect += (w.w1 * truth * w.w2).squaredNorm() / 3.0;
    }
    const RiskSummary zero =
        risk_monte_carlo(m, [&](const HankelDataset&, const WeightPair&) { return Matrix(Matrix::Zero(8, 16)); }, opts);
    CHECK(zero.mean == doctest::Approx(expect).epsilon(1e-12));
    CHECK(zero.standard_error > 0.0);

    const RiskSummary failing = risk_monte_carlo(
        m, [](const HankelDataset&, const WeightPair&) -> Matrix { throw NumericalError("boom"); }, opts);
    CHECK(failing.failures == 3);
    CHECK(failing.values.empty());
    opts.trials = 1;
    CHECK_THROWS_AS(risk_monte_carlo(m, method_estimator(Method::ls, {}), opts), ConfigError);
  }

  TEST_CASE("least-squares estimator matches the direct fit") {
    const StateSpaceModel m = preset_model("mimo3");
    const HankelDataset ds = assemble(simulate_white_input(m, 300, 4).data, 4, 4);
    const WeightPair w = default_weights(ds, linalg::sample_covariance(ds.source.y));
    CHECK(method_estimator(Method::ls, {})(ds, w) == ls_markov(ds).hfp);
    EstimatorOptions opts;
    opts.rank.fixed = 3;
    const Matrix svd = method_estimator(Method::svd_truncated, opts)(ds, w);
    CHECK(oracle::rel_err(svd, weighted_truncate(ls_markov(ds).hfp, w, 3)) <= 1e-12);
  }

  TEST_CASE("model files") {
    TempDir tmp;
    const StateSpaceModel m = preset_model("mimo3");
    write_model_json(tmp.path() / "m.json", m);
    const StateSpaceModel back = read_model_json(tmp.path() / "m.json");
    CHECK(back.A == m.A);
    CHECK(back.K == m.K);
    CHECK(back.D == m.D);
    CHECK(back.Sigma == m.Sigma);
    CHECK_THROWS_AS(preset_model("nope"), ConfigError);
    write_text(tmp.path() / "bad.json", "{\"A\": [[1, 2]]}");
    CHECK_THROWS(read_model_json(tmp.path() / "bad.json"));
  }

  TEST_CASE("config parsing") {
    const ExperimentConfig cfg = parse_experiment_config_text(
        "seed = 4\nalphas = 0, 0.5\nmethods = ls svd bayes\ntrials = 2\nrank = 3\nvariant = exact\n"
        "iters = 50\nburnin = 10\n# comment\n[dataset]\nname = x\npath = data/x.dat\ninputs = 0 1\n"
        "outputs = 2,3\nestimation_length = 100\nvalidation_length = 50\nreuse = true\n",
        "/base");
    CHECK(cfg.seed == 4);
    CHECK(cfg.noise_levels == std::vector<double>{0.0, 0.5});
    CHECK(cfg.methods.size() == 3);
    CHECK(cfg.trials == 2);
    CHECK(cfg.estimator.rank.fixed == 3);
    CHECK(cfg.estimator.chain.gf_variant == GfVariant::exact);
    CHECK(cfg.estimator.chain.total_iterations == 50);
    REQUIRE(cfg.datasets.size() == 1);
    CHECK(cfg.datasets[0].path == fs::path("/base/data/x.dat"));
    CHECK(cfg.datasets[0].output_columns == std::vector<Index>{2, 3});
    CHECK(cfg.datasets[0].reuse);

    CHECK_THROWS_WITH_AS(parse_experiment_config_text("seed = 1\nbogus = 2\n", "."),
                         doctest::Contains("config line 2"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config_text("trials = two\n", "."), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(fs::path("/nonexistent/cfg")), Error);
  }

  TEST_CASE("experiment grid is complete and deterministic") {
    TempDir tmp;
    const StateSpaceModel m = preset_model("mimo3");
    write_daisy(tmp.path() / "sim.dat", simulate_white_input(m, 400, 5).data);
    write_model_json(tmp.path() / "truth.json", m);
    const std::string text =
        "seed = 11\nalphas = 0, 0.3\nmethods = ls, svd\ntrials = 1\nrank = 3\noutput = out\n"
        "[dataset]\nname = sim\npath = sim.dat\ninputs = 0 1\noutputs = 2 3\n"
        "estimation_length = 250\nvalidation_length = 150\ntruth_model = truth.json\n";
    ExperimentConfig cfg = parse_experiment_config_text(text, tmp.path());
    cfg.output = tmp.path() / "out";
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    REQUIRE(a.records.size() == 4);
    CHECK(a.failures.empty());
    CHECK(a.summary.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(a.records[k].npe == b.records[k].npe);
      CHECK(a.records[k].seed == b.records[k].seed);
      CHECK(a.records[k].risk.has_value());
      CHECK(std::isfinite(a.records[k].npe));
    }
    CHECK(a.records[0].method == "ls");
    CHECK(a.records[0].alpha == 0.0);
    CHECK(a.records[0].npe < 0.1);
    write_experiment_outputs(cfg, a);
    CHECK(fs::exists(cfg.output / "results.csv"));
    CHECK(fs::exists(cfg.output / "summary.csv"));
    CHECK(fs::exists(cfg.output / "results.json"));
    CHECK(records_csv(a.records).rfind("dataset,alpha,method,trial,seed,npe,risk,wall_time\n", 0) == 0);
  }

  TEST_CASE("experiment records failures instead of aborting") {
    TempDir tmp;
    const StateSpaceModel m = preset_model("mimo3");
    write_daisy(tmp.path() / "sim.dat", simulate_white_input(m, 60, 5).data);
    ExperimentConfig cfg = parse_experiment_config_text(
        "alphas = 0\nmethods = ls\nrank = 40\n[dataset]\nname = sim\npath = sim.dat\ninputs = 0 1\n"
        "outputs = 2 3\nestimation_length = 40\nvalidation_length = 20\n",
        tmp.path());
    const ExperimentResult r = run_experiment(cfg);
    CHECK(r.records.empty());
    REQUIRE(r.failures.size() == 1);
    CHECK_FALSE(r.failures[0].reason.empty());
  }
}
