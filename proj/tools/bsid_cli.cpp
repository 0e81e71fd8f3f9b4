#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsid/expharness.hpp"
#include "bsid/linalg.hpp"

namespace {

using namespace bsid;

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kNumerical = 3 };

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<Index> rank;
  std::optional<std::string> variant;
  std::optional<Index> iters;
  std::optional<Index> burnin;
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "Base random seed");
    app->add_option("--rank", rank, "Model order (default: from singular values)");
    app->add_option("--variant", variant, "G_f posterior variant: exact or approx");
    app->add_option("--iters", iters, "Gibbs iterations N_F");
    app->add_option("--burnin", burnin, "Burn-in iterations N_o");
    app->add_option("--out", out, "Output location");
  }

  void apply(EstimatorOptions& opts) const {
    if (seed) opts.chain.seed = *seed;
    if (rank) opts.rank.fixed = *rank;
    if (variant) opts.chain.gf_variant = parse_gf_variant(*variant);
    if (iters) opts.chain.total_iterations = *iters;
    if (burnin) opts.chain.burn_in = *burnin;
  }
};

std::vector<Index> parse_columns(const std::string& s) {
  std::vector<Index> out;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stol(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad column index '" + tok + "'");
    }
  }
  return out;
}

StateSpaceModel load_model(const std::string& preset, const std::string& model_path) {
  if (!model_path.empty()) return read_model_json(model_path);
  return preset_model(preset.empty() ? "mimo3" : preset);
}

int run_identify(const std::string& data, const std::string& inputs, const std::string& outputs,
                 const std::string& skip, Index n_est, Index n_val, bool reuse, const std::string& method,
                 const std::string& model_out, const CommonFlags& common) {
  DatasetSpec spec;
  spec.name = std::filesystem::path(data).stem().string();
  spec.path = data;
  spec.input_columns = parse_columns(inputs);
  spec.output_columns = parse_columns(outputs);
  spec.skip_columns = parse_columns(skip);
  spec.reuse = reuse;
  const TimeSeries raw = load_daisy(spec);
  spec.estimation_length = n_est > 0 ? n_est : raw.length() / 2;
  spec.validation_length = n_val > 0 ? n_val : (reuse ? spec.estimation_length : raw.length() - spec.estimation_length);
  spec.validate();
  split_dataset(raw, spec);
  const TimeSeries base = detrend(raw, spec.estimation_length);
  const Matrix sigma_y = linalg::sample_covariance(base.y.leftCols(spec.estimation_length));
  EstimatorOptions opts;
  common.apply(opts);
  const IdentifyOutcome id = identify(split_dataset(base, spec), sigma_y, parse_method(method), opts);
  std::printf("method %s\nhorizon %ld%s\norder %ld\nnpe %.10g\n", method.c_str(), static_cast<long>(id.horizon),
              id.horizon_clamped ? " (clamped)" : "", static_cast<long>(id.estimate.rank), id.npe);
  for (Index c : id.excluded_channels) std::fprintf(stderr, "warning: output channel %ld has zero energy\n", c);
  const std::string path = !model_out.empty() ? model_out : (common.out ? *common.out : std::string());
  if (!path.empty()) {
    write_model_json(path, id.model);
    std::printf("model written to %s\n", path.c_str());
  }
  return kOk;
}

int run_experiment_cmd(const std::string& config, const CommonFlags& common) {
  ExperimentConfig cfg = parse_experiment_config(config);
  if (common.seed) cfg.seed = *common.seed;
  common.apply(cfg.estimator);
  if (common.out) cfg.output = *common.out;
  if (cfg.output.empty()) cfg.output = "results";
  const ExperimentResult res = run_experiment(cfg);
  write_experiment_outputs(cfg, res);
  for (const auto& f : res.failures) {
    std::fprintf(stderr, "failed: %s alpha=%g %s trial %ld: %s\n", f.dataset.c_str(), f.alpha, f.method.c_str(),
                 static_cast<long>(f.trial), f.reason.c_str());
  }
  for (const auto& s : res.summary) {
    std::printf("%-16s alpha=%-6g %-14s mean npe %.6g (%ld)\n", s.dataset.c_str(), s.alpha, s.method.c_str(),
                s.mean_npe, static_cast<long>(s.count));
  }
  std::printf("%zu records, %zu failures, written to %s\n", res.records.size(), res.failures.size(),
              cfg.output.string().c_str());
  if (res.records.empty() && !res.failures.empty()) return kNumerical;
  return kOk;
}

int run_simulate(const std::string& preset, const std::string& model_path, Index length, Index burnin,
                 const std::string& model_out, const CommonFlags& common) {
  const StateSpaceModel model = load_model(preset, model_path);
  const Simulation sim = simulate_white_input(model, length, common.seed.value_or(0), burnin);
  const std::string out = common.out.value_or("synthetic.dat");
  write_daisy(out, sim.data);
  if (!model_out.empty()) write_model_json(model_out, model);
  std::printf("%ld samples (%ld inputs, %ld outputs) written to %s\n", static_cast<long>(length),
              static_cast<long>(model.ni()), static_cast<long>(model.no()), out.c_str());
  return kOk;
}

int run_risk(const std::string& preset, const std::string& model_path, const std::vector<double>& alphas,
             const std::vector<std::string>& methods, const RiskOptions& base, const CommonFlags& common) {
  const StateSpaceModel model = load_model(preset, model_path);
  EstimatorOptions opts;
  common.apply(opts);
  RiskOptions ro = base;
  ro.seed = common.seed.value_or(0);
  std::ostringstream csv;
  csv << "alpha,method,mean_risk,standard_error,trials,failures\n";
  for (double a : alphas) {
    ro.alpha = a;
    for (const auto& m : methods) {
      const RiskSummary s = risk_monte_carlo(model, method_estimator(parse_method(m), opts), ro);
      char line[256];
      std::snprintf(line, sizeof line, "%.17g,%s,%.17g,%.17g,%ld,%ld\n", a, m.c_str(), s.mean, s.standard_error,
                    static_cast<long>(s.values.size()), static_cast<long>(s.failures));
      csv << line;
      std::printf("alpha=%-6g %-14s risk %.6g +- %.2g (%ld failed)\n", a, m.c_str(), s.mean, s.standard_error,
                  static_cast<long>(s.failures));
      for (const auto& r : s.failure_reasons) std::fprintf(stderr, "  %s\n", r.c_str());
    }
  }
  const std::filesystem::path dir = common.out.value_or(".");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "risk.csv") << csv.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian subspace identification"};
  app.require_subcommand(1);

  CommonFlags identify_flags, experiment_flags, simulate_flags, risk_flags;

  auto* identify_cmd = app.add_subcommand("identify", "Identify a model from one data file");
  std::string data, inputs, outputs, skip, method = "bayes-gibbs", model_out;
  Index n_est = 0, n_val = 0;
  bool reuse = false;
  identify_cmd->add_option("--data", data, "Whitespace-separated data file")->required();
  identify_cmd->add_option("--inputs", inputs, "Comma-separated input column indices");
  identify_cmd->add_option("--outputs", outputs, "Comma-separated output column indices")->required();
  identify_cmd->add_option("--skip", skip, "Columns to ignore");
  identify_cmd->add_option("--n-est", n_est, "Estimation samples (default: half)");
  identify_cmd->add_option("--n-val", n_val, "Validation samples (default: the rest)");
  identify_cmd->add_flag("--reuse", reuse, "Validate on the estimation samples");
  identify_cmd->add_option("--method", method, "ls, svd-truncated or bayes-gibbs");
  identify_cmd->add_option("--model-out", model_out, "Write the identified model as JSON");
  identify_flags.attach(identify_cmd);

  auto* experiment_cmd = app.add_subcommand("experiment", "Run a configured experiment grid");
  std::string config;
  experiment_cmd->add_option("--config", config, "Experiment description")->required();
  experiment_flags.attach(experiment_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate synthetic data with white input");
  std::string preset, model_path, sim_model_out;
  Index length = 1000, sim_burnin = kDefaultBurnIn;
  simulate_cmd->add_option("--preset", preset, "mimo3 or siso");
  simulate_cmd->add_option("--model", model_path, "Model JSON (A, B, C, D, K, Sigma)");
  simulate_cmd->add_option("--length", length, "Number of samples");
  simulate_cmd->add_option("--transient", sim_burnin, "Discarded leading samples");
  simulate_cmd->add_option("--model-out", sim_model_out, "Write the model as JSON");
  simulate_flags.attach(simulate_cmd);

  auto* risk_cmd = app.add_subcommand("risk", "Monte-Carlo weighted risk of H_fp estimators");
  std::string risk_preset, risk_model;
  std::vector<double> alphas{0.0};
  std::vector<std::string> methods{"ls", "svd-truncated", "bayes-gibbs"};
  RiskOptions ro;
  risk_cmd->add_option("--preset", risk_preset, "mimo3 or siso");
  risk_cmd->add_option("--model", risk_model, "Model JSON");
  risk_cmd->add_option("--trials", ro.trials, "Monte-Carlo trials");
  risk_cmd->add_option("--alphas", alphas, "Colored-noise levels")->delimiter(',');
  risk_cmd->add_option("--methods", methods, "Estimators")->delimiter(',');
  risk_cmd->add_option("--N", ro.length, "Samples per trial");
  risk_cmd->add_option("--f", ro.f, "Future horizon");
  risk_cmd->add_option("--p", ro.p, "Past horizon");
  risk_flags.attach(risk_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*identify_cmd)
      return run_identify(data, inputs, outputs, skip, n_est, n_val, reuse, method, model_out, identify_flags);
    if (*experiment_cmd) return run_experiment_cmd(config, experiment_flags);
    if (*simulate_cmd) return run_simulate(preset, model_path, length, sim_burnin, sim_model_out, simulate_flags);
    if (*risk_cmd) return run_risk(risk_preset, risk_model, alphas, methods, ro, risk_flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
  return kOk;
}
