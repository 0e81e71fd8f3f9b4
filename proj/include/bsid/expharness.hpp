#pragma once

// Experiment plumbing: data files, detrending, output contamination, the
// prediction-error metric, Monte-Carlo risk and the config-driven grid.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsid/bayes.hpp"
#include "bsid/subspace.hpp"
#include "bsid/sysmodel.hpp"

namespace bsid {

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  std::vector<Index> input_columns;
  std::vector<Index> output_columns;
  std::vector<Index> skip_columns;
  Index estimation_length = 0;
  Index validation_length = 0;
  // Validation reuses the estimation samples.
  bool reuse = false;
  // Optional model file; enables the risk column.
  std::filesystem::path truth_model;

  void validate() const;
};

// Whitespace-separated numeric columns, one sample per line. Blank lines and
// lines starting with '#' or '%' are ignored.
TimeSeries load_daisy(const DatasetSpec& spec);
void write_daisy(const std::filesystem::path& path, const TimeSeries& ts);

struct Split {
  TimeSeries estimation;
  TimeSeries validation;
};
Split split_dataset(const TimeSeries& ts, const DatasetSpec& spec);

// Subtracts the per-channel mean of the first estimation_length samples.
TimeSeries detrend(const TimeSeries& ts, Index estimation_length);
TimeSeries detrend(const TimeSeries& ts);

// v[k] = 0.5 v[k-1] + sqrt(3)/2 w[k], w ~ N(0, alpha^2 Sigma_y), v[0] = sqrt(3)/2 w[0].
Matrix colored_noise(const Matrix& sigma_y, double alpha, Index length, std::uint64_t seed);
TimeSeries contaminate(const TimeSeries& ts, double alpha, const Matrix& sigma_y, std::uint64_t seed);

struct Npe {
  double value = 0.0;
  std::vector<Index> excluded_channels;
};

// (1/no) sum_m sum_k (yhat_m - y_m)^2 / sum_k d_m^2 over samples k >= skip,
// with d = y unless a separate denominator signal is given. Channels with
// zero energy are dropped; DataError if none remain.
Npe normalized_prediction_error(const Matrix& yhat, const Matrix& y, Index skip = 0,
                                const Matrix* denominator = nullptr);

enum class Method { ls, svd_truncated, bayes_gibbs };
std::string to_string(Method m);
Method parse_method(const std::string& s);

struct RankPolicy {
  Index fixed = 0;  // 0 selects from the weighted singular values
  // The automatic choice is capped at max_order, the largest order the
  // shift-invariance recovery can realize.
  Index resolve(const Vector& singular_values, Index max_order) const;
};

struct EstimatorOptions {
  RankPolicy rank;
  ChainConfig chain;
};

struct HfpEstimate {
  Matrix hfp;
  Matrix hf;
  Index rank = 0;
  std::optional<ChainResult> chain;
};

HfpEstimate estimate_hfp(Method method, const HankelDataset& ds, const WeightPair& weights,
                         const EstimatorOptions& opts);

// ||W1 (truth - estimate) W2||_F^2
double weighted_risk(const Matrix& truth, const Matrix& estimate, const WeightPair& weights);

enum class WeightPolicy { standard, identity };

struct RiskOptions {
  Index trials = 20;
  Index f = 6;
  Index p = 6;
  Index length = 600;
  double alpha = 0.0;  // colored output contamination level
  std::uint64_t seed = 0;
  WeightPolicy weights = WeightPolicy::standard;
};

struct RiskSummary {
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<double> values;
  Index failures = 0;
  std::vector<std::string> failure_reasons;
};

using Estimator = std::function<Matrix(const HankelDataset&, const WeightPair&)>;

// Trial t uses seed mix_seed(seed, t), so different estimators see the same
// realizations.
RiskSummary risk_monte_carlo(const StateSpaceModel& model, const Estimator& estimator, const RiskOptions& opts);

Estimator method_estimator(Method method, const EstimatorOptions& opts);

enum class NpeDenominator { contaminated, clean };

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<double> noise_levels;
  std::vector<Method> methods;
  Index trials = 1;
  EstimatorOptions estimator;
  std::uint64_t seed = 0;
  NpeDenominator npe_denominator = NpeDenominator::contaminated;
  std::filesystem::path output;  // empty: no files

  void validate() const;
};

// key = value lines, '#' comments, one [dataset] section per dataset.
// Relative dataset paths resolve against the config file's directory.
ExperimentConfig parse_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config_text(const std::string& text, const std::filesystem::path& base_dir);

struct ResultRecord {
  std::string dataset;
  double alpha = 0.0;
  std::string method;
  Index trial = 0;
  std::uint64_t seed = 0;
  double npe = 0.0;
  std::optional<double> risk;
  double wall_time = 0.0;
};

struct CellFailure {
  std::string dataset;
  double alpha = 0.0;
  std::string method;
  Index trial = 0;
  std::string reason;
};

struct SummaryRow {
  std::string dataset;
  double alpha = 0.0;
  std::string method;
  double mean_npe = 0.0;
  Index count = 0;
};

struct ExperimentResult {
  std::vector<ResultRecord> records;
  std::vector<CellFailure> failures;
  std::vector<SummaryRow> summary;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string records_csv(const std::vector<ResultRecord>& records);
void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

struct IdentifyOutcome {
  StateSpaceModel model;
  HfpEstimate estimate;
  WeightPair weights;
  Index horizon = 0;
  bool horizon_clamped = false;
  double npe = 0.0;
  std::vector<Index> excluded_channels;
};

// Estimation on one split: row-length rule, default weights from Sigma_y,
// estimate, recover, predict the validation segment from a zero state.
IdentifyOutcome identify(const Split& data, const Matrix& sigma_y, Method method, const EstimatorOptions& opts,
                         const Matrix* clean_validation_y = nullptr);

StateSpaceModel read_model_json(const std::filesystem::path& path);
void write_model_json(const std::filesystem::path& path, const StateSpaceModel& model);

// Built-in synthetic systems: "mimo3" (nx=3, ni=2, no=2) and "siso".
StateSpaceModel preset_model(const std::string& name);

void write_chain_trace(const std::filesystem::path& path, const ChainResult& chain);

}  // namespace bsid
