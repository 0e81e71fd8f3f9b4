#include "bsid/expharness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "bsid/linalg.hpp"
#include "bsid/random.hpp"

namespace bsid {

namespace {

using json = nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void DatasetSpec::validate() const {
  if (output_columns.empty()) throw ConfigError("dataset '" + name + "': no output columns");
  std::set<Index> seen;
  for (const auto* list : {&input_columns, &output_columns, &skip_columns}) {
    for (Index c : *list) {
      if (c < 0) throw ConfigError("dataset '" + name + "': negative column index");
      if (!seen.insert(c).second) {
        throw ConfigError("dataset '" + name + "': column " + std::to_string(c) + " selected twice");
      }
    }
  }
  if (estimation_length < 1 || validation_length < 1) {
    throw ConfigError("dataset '" + name + "': estimation and validation lengths must be >= 1");
  }
}

TimeSeries load_daisy(const DatasetSpec& spec) {
  if (spec.output_columns.empty()) throw DataError("no output columns");
  std::ifstream in(spec.path);
  if (!in) throw DataError("cannot open data file " + spec.path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  Index line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == '%') continue;
    std::istringstream ss(t);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw DataError(spec.path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + tok + "'");
      }
      if (std::isnan(v)) throw DataError(spec.path.string() + ":" + std::to_string(line_no) + ": NaN value");
      row.push_back(v);
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw DataError(spec.path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                      " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(spec.path.string() + ": no samples");
  auto pick = [&](const std::vector<Index>& cols) {
    Matrix m(static_cast<Index>(cols.size()), static_cast<Index>(rows.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c] >= static_cast<Index>(width)) {
        throw DataError(spec.path.string() + ": column " + std::to_string(cols[c]) + " out of range (file has " +
                        std::to_string(width) + " columns)");
      }
      for (std::size_t k = 0; k < rows.size(); ++k) {
        m(static_cast<Index>(c), static_cast<Index>(k)) = rows[k][static_cast<std::size_t>(cols[c])];
      }
    }
    return m;
  };
  for (Index c : spec.skip_columns) {
    if (c >= static_cast<Index>(width)) throw DataError("skip column " + std::to_string(c) + " out of range");
  }
  TimeSeries ts{pick(spec.input_columns), pick(spec.output_columns)};
  return ts;
}

void write_daisy(const std::filesystem::path& path, const TimeSeries& ts) {
  ts.validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "#";
  for (Index c = 0; c < ts.ni(); ++c) out << " u" << c + 1;
  for (Index c = 0; c < ts.no(); ++c) out << " y" << c + 1;
  out << "\n";
  for (Index k = 0; k < ts.length(); ++k) {
    std::string line;
    for (Index c = 0; c < ts.ni(); ++c) line += fmt_double(ts.u(c, k)) + " ";
    for (Index c = 0; c < ts.no(); ++c) line += fmt_double(ts.y(c, k)) + " ";
    line.pop_back();
    out << line << "\n";
  }
}

Split split_dataset(const TimeSeries& ts, const DatasetSpec& spec) {
  const Index n = spec.estimation_length;
  const Index nv = spec.validation_length;
  const Index needed = spec.reuse ? std::max(n, nv) : n + nv;
  if (n < 1 || nv < 1) throw ConfigError("dataset '" + spec.name + "': lengths must be >= 1");
  if (needed > ts.length()) {
    throw DataError("dataset '" + spec.name + "' has " + std::to_string(ts.length()) + " samples, " +
                    std::to_string(needed) + " required");
  }
  return {ts.segment(0, n), ts.segment(spec.reuse ? 0 : n, nv)};
}

TimeSeries detrend(const TimeSeries& ts, Index estimation_length) {
  const Index n = std::min(estimation_length, ts.length());
  if (n < 1) return ts;
  TimeSeries out = ts;
  if (ts.ni() > 0) out.u.colwise() -= ts.u.leftCols(n).rowwise().mean();
  out.y.colwise() -= ts.y.leftCols(n).rowwise().mean();
  return out;
}

TimeSeries detrend(const TimeSeries& ts) { return detrend(ts, ts.length()); }

Matrix colored_noise(const Matrix& sigma_y, double alpha, Index length, std::uint64_t seed) {
  const Index no = sigma_y.rows();
  if (alpha < 0.0) throw ConfigError("noise level must be nonnegative");
  if (!linalg::is_symmetric(sigma_y) || !linalg::is_psd(sigma_y)) {
    throw DataError("output covariance is not symmetric positive semidefinite");
  }
  Matrix v = Matrix::Zero(no, length);
  if (alpha == 0.0 || length == 0) return v;
  const double gain = std::sqrt(3.0) / 2.0;
  const Matrix root = alpha * linalg::sym_sqrt(sigma_y);
  Rng rng(seed);
  const Matrix w = root * rng.normal_matrix(no, length);
  v.col(0) = gain * w.col(0);
  for (Index k = 1; k < length; ++k) v.col(k) = 0.5 * v.col(k - 1) + gain * w.col(k);
  return v;
}

TimeSeries contaminate(const TimeSeries& ts, double alpha, const Matrix& sigma_y, std::uint64_t seed) {
  if (sigma_y.rows() != ts.no() || sigma_y.cols() != ts.no()) throw ConfigError("Sigma_y has wrong shape");
  if (alpha == 0.0) return ts;
  TimeSeries out = ts;
  out.y += colored_noise(sigma_y, alpha, ts.length(), seed);
  return out;
}

Npe normalized_prediction_error(const Matrix& yhat, const Matrix& y, Index skip, const Matrix* denominator) {
  if (yhat.rows() != y.rows() || yhat.cols() != y.cols()) throw DataError("prediction and data differ in shape");
  const Matrix& d = denominator ? *denominator : y;
  if (d.rows() != y.rows() || d.cols() != y.cols()) throw DataError("denominator signal has the wrong shape");
  const Index used = y.cols() - skip;
  if (skip < 0 || used < 1) {
    throw DataError("validation segment of " + std::to_string(y.cols()) + " samples is shorter than the " +
                    std::to_string(skip) + "-sample transient");
  }
  Npe out;
  double acc = 0.0;
  Index channels = 0;
  for (Index m = 0; m < y.rows(); ++m) {
    const double den = d.row(m).tail(used).squaredNorm();
    if (!(den > 0.0)) {
      out.excluded_channels.push_back(m);
      continue;
    }
    acc += (yhat.row(m).tail(used) - y.row(m).tail(used)).squaredNorm() / den;
    ++channels;
  }
  if (channels == 0) throw DataError("every output channel has zero energy");
  out.value = acc / static_cast<double>(channels);
  return out;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::ls:
      return "ls";
    case Method::svd_truncated:
      return "svd-truncated";
    case Method::bayes_gibbs:
      return "bayes-gibbs";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "ls") return Method::ls;
  if (s == "svd-truncated" || s == "svd") return Method::svd_truncated;
  if (s == "bayes-gibbs" || s == "bayes") return Method::bayes_gibbs;
  throw ConfigError("unknown method '" + s + "' (expected ls, svd-truncated or bayes-gibbs)");
}

Index RankPolicy::resolve(const Vector& singular_values, Index max_order) const {
  if (fixed > 0) {
    if (fixed > singular_values.size()) {
      throw ConfigError("rank " + std::to_string(fixed) + " exceeds the " + std::to_string(singular_values.size()) +
                        " available singular values");
    }
    return fixed;
  }
  const Index r = select_rank(singular_values);
  if (r < 1) throw NumericalError("weighted H_fp has no significant singular values");
  return std::min(r, std::max<Index>(max_order, 1));
}

HfpEstimate estimate_hfp(Method method, const HankelDataset& ds, const WeightPair& weights,
                         const EstimatorOptions& opts) {
  const LsEstimate ls = ls_markov(ds);
  HfpEstimate out;
  out.rank = opts.rank.resolve(singular_values(weights.w1 * ls.hfp * weights.w2), (ds.f - 1) * ds.no);
  switch (method) {
    case Method::ls:
      out.hfp = ls.hfp;
      out.hf = ls.hf;
      break;
    case Method::svd_truncated:
      out.hfp = weighted_truncate(ls.hfp, weights, out.rank);
      out.hf = ls.hf;
      break;
    case Method::bayes_gibbs: {
      ChainResult chain = run_chain(ds, out.rank, opts.chain);
      out.hfp = chain.hfp;
      out.hf = chain.final_state.hf;
      out.chain = std::move(chain);
      break;
    }
  }
  return out;
}

double weighted_risk(const Matrix& truth, const Matrix& estimate, const WeightPair& weights) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw ConfigError("risk: estimate and truth differ in shape");
  }
  return (weights.w1 * (truth - estimate) * weights.w2).squaredNorm();
}

Estimator method_estimator(Method method, const EstimatorOptions& opts) {
  return [method, opts](const HankelDataset& ds, const WeightPair& w) { return estimate_hfp(method, ds, w, opts).hfp; };
}

RiskSummary risk_monte_carlo(const StateSpaceModel& model, const Estimator& estimator, const RiskOptions& opts) {
  if (opts.trials < 2) throw ConfigError("risk estimation needs at least 2 trials");
  model.validate();
  const Matrix truth = markov_hfp(model, opts.f, opts.p).hfp;
  RiskSummary out;
  for (Index t = 0; t < opts.trials; ++t) {
    const std::uint64_t seed = mix_seed(opts.seed, static_cast<std::uint64_t>(t));
    try {
      TimeSeries ts = simulate_white_input(model, opts.length, seed).data;
      const Matrix sigma_y = linalg::sample_covariance(ts.y);
      ts = contaminate(ts, opts.alpha, sigma_y, mix_seed(seed, 2));
      const HankelDataset ds = assemble(ts, opts.f, opts.p);
      const WeightPair w = opts.weights == WeightPolicy::identity ? identity_weights(ds) : default_weights(ds, sigma_y);
      const double r = weighted_risk(truth, estimator(ds, w), w);
      if (!std::isfinite(r)) throw NumericalError("risk is not finite");
      out.values.push_back(r);
    } catch (const Error& e) {
      ++out.failures;
      out.failure_reasons.push_back("trial " + std::to_string(t) + ": " + e.what());
    }
  }
  const auto n = static_cast<double>(out.values.size());
  if (out.values.empty()) return out;
  double sum = 0.0;
  for (double v : out.values) sum += v;
  out.mean = sum / n;
  if (out.values.size() >= 2) {
    double ss = 0.0;
    for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ConfigError("no datasets configured");
  if (noise_levels.empty()) throw ConfigError("no noise levels configured");
  if (methods.empty()) throw ConfigError("no methods configured");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  for (double a : noise_levels) {
    if (!(a >= 0.0)) throw ConfigError("noise levels must be nonnegative");
  }
  std::set<std::string> names;
  for (const auto& d : datasets) {
    d.validate();
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
  }
  estimator.chain.validate();
}

IdentifyOutcome identify(const Split& data, const Matrix& sigma_y, Method method, const EstimatorOptions& opts,
                         const Matrix* clean_validation_y) {
  const TimeSeries& est = data.estimation;
  IdentifyOutcome out;
  const RowLength rl = row_length(est.length(), est.no(), est.ni());
  out.horizon = rl.rows;
  out.horizon_clamped = rl.clamped;
  const HankelDataset ds = assemble(est, rl.rows, rl.rows);
  out.weights = default_weights(ds, sigma_y);
  out.estimate = estimate_hfp(method, ds, out.weights, opts);
  out.model = recover_from_markov(out.estimate.hfp, out.estimate.hf, ds, out.weights, out.estimate.rank);
  const Matrix yhat = predict_one_step(out.model, data.validation, Vector(), true);
  if (!yhat.allFinite()) throw NumericalError("validation prediction diverged");
  const Npe npe = normalized_prediction_error(yhat, data.validation.y, std::max<Index>(rl.rows, 20),
                                              clean_validation_y);
  out.npe = npe.value;
  out.excluded_channels = npe.excluded_channels;
  return out;
}

void write_chain_trace(const std::filesystem::path& path, const ChainResult& chain) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "iteration,log_abs_det_g11,norm_gamma_lp\n";
  for (std::size_t n = 0; n < chain.trace_log_det_g11.size(); ++n) {
    out << n + 1 << "," << fmt_double(chain.trace_log_det_g11[n]) << "," << fmt_double(chain.trace_norm_gamma_lp[n])
        << "\n";
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  for (std::size_t di = 0; di < cfg.datasets.size(); ++di) {
    const DatasetSpec& spec = cfg.datasets[di];
    const TimeSeries raw = load_daisy(spec);
    split_dataset(raw, spec);
    const TimeSeries base = detrend(raw, spec.estimation_length);
    const Matrix sigma_y = linalg::sample_covariance(base.y.leftCols(spec.estimation_length));
    std::optional<StateSpaceModel> truth;
    if (!spec.truth_model.empty()) truth = read_model_json(spec.truth_model);
    const Split clean = split_dataset(base, spec);

    for (std::size_t ai = 0; ai < cfg.noise_levels.size(); ++ai) {
      const double alpha = cfg.noise_levels[ai];
      for (Index t = 0; t < cfg.trials; ++t) {
        const std::uint64_t cell_seed =
            mix_seed(mix_seed(mix_seed(cfg.seed, di), ai), static_cast<std::uint64_t>(t));
        const Split sp = split_dataset(contaminate(base, alpha, sigma_y, mix_seed(cell_seed, 1)), spec);
        const Matrix* clean_y =
            cfg.npe_denominator == NpeDenominator::clean ? &clean.validation.y : nullptr;
        for (Method method : cfg.methods) {
          EstimatorOptions opts = cfg.estimator;
          opts.chain.seed = mix_seed(cell_seed, 3);
          const auto start = std::chrono::steady_clock::now();
          try {
            const IdentifyOutcome id = identify(sp, sigma_y, method, opts, clean_y);
            ResultRecord rec;
            rec.dataset = spec.name;
            rec.alpha = alpha;
            rec.method = to_string(method);
            rec.trial = t;
            rec.seed = cell_seed;
            rec.npe = id.npe;
            if (truth) {
              const Matrix h = markov_hfp(*truth, id.horizon, id.horizon).hfp;
              rec.risk = weighted_risk(h, id.estimate.hfp, id.weights);
            }
            rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (!std::isfinite(rec.npe)) throw NumericalError("npe is not finite");
            if (id.estimate.chain && !cfg.output.empty()) {
              const std::string cell = spec.name + "_a" + std::to_string(ai) + "_t" + std::to_string(t);
              write_chain_trace(cfg.output / "chains" / cell / "trace.csv", *id.estimate.chain);
            }
            result.records.push_back(std::move(rec));
          } catch (const Error& e) {
            result.failures.push_back({spec.name, alpha, to_string(method), t, e.what()});
          }
        }
      }
    }
  }

  auto key = [](const auto& r) { return std::tie(r.dataset, r.alpha, r.method, r.trial); };
  std::sort(result.records.begin(), result.records.end(),
            [&](const ResultRecord& a, const ResultRecord& b) { return key(a) < key(b); });
  std::sort(result.failures.begin(), result.failures.end(),
            [&](const CellFailure& a, const CellFailure& b) { return key(a) < key(b); });

  std::map<std::tuple<std::string, double, std::string>, std::pair<double, Index>> groups;
  for (const auto& r : result.records) {
    auto& g = groups[{r.dataset, r.alpha, r.method}];
    g.first += r.npe;
    ++g.second;
  }
  for (const auto& [k, g] : groups) {
    result.summary.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), g.first / static_cast<double>(g.second),
                              g.second});
  }
  return result;
}

std::string records_csv(const std::vector<ResultRecord>& records) {
  std::ostringstream os;
  os << "dataset,alpha,method,trial,seed,npe,risk,wall_time\n";
  for (const auto& r : records) {
    os << r.dataset << "," << fmt_double(r.alpha) << "," << r.method << "," << r.trial << "," << r.seed << ","
       << fmt_double(r.npe) << "," << (r.risk ? fmt_double(*r.risk) : std::string()) << ","
       << fmt_double(r.wall_time) << "\n";
  }
  return os.str();
}

void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  if (cfg.output.empty()) return;
  std::filesystem::create_directories(cfg.output);
  {
    std::ofstream out(cfg.output / "results.csv");
    if (!out) throw DataError("cannot write results.csv in " + cfg.output.string());
    out << records_csv(result.records);
  }
  {
    std::ofstream out(cfg.output / "summary.csv");
    out << "dataset,alpha,method,mean_npe,count\n";
    for (const auto& s : result.summary) {
      out << s.dataset << "," << fmt_double(s.alpha) << "," << s.method << "," << fmt_double(s.mean_npe) << ","
          << s.count << "\n";
    }
  }
  json doc;
  json& c = doc["config"];
  c["seed"] = cfg.seed;
  c["noise_levels"] = cfg.noise_levels;
  c["trials"] = cfg.trials;
  c["rank"] = cfg.estimator.rank.fixed > 0 ? json(cfg.estimator.rank.fixed) : json("auto");
  c["variant"] = to_string(cfg.estimator.chain.gf_variant);
  c["iters"] = cfg.estimator.chain.total_iterations;
  c["burnin"] = cfg.estimator.chain.burn_in;
  c["average"] = to_string(cfg.estimator.chain.average_mode);
  c["refresh"] = cfg.estimator.chain.gamma_refresh;
  c["npe_denominator"] = cfg.npe_denominator == NpeDenominator::clean ? "clean" : "contaminated";
  c["methods"] = json::array();
  for (Method m : cfg.methods) c["methods"].push_back(to_string(m));
  c["datasets"] = json::array();
  for (const auto& d : cfg.datasets) {
    c["datasets"].push_back({{"name", d.name},
                             {"path", d.path.string()},
                             {"inputs", d.input_columns},
                             {"outputs", d.output_columns},
                             {"skip", d.skip_columns},
                             {"estimation_length", d.estimation_length},
                             {"validation_length", d.validation_length},
                             {"reuse", d.reuse}});
  }
  doc["records"] = json::array();
  for (const auto& r : result.records) {
    doc["records"].push_back({{"dataset", r.dataset},
                              {"alpha", r.alpha},
                              {"method", r.method},
                              {"trial", r.trial},
                              {"seed", r.seed},
                              {"npe", r.npe},
                              {"risk", r.risk ? json(*r.risk) : json(nullptr)},
                              {"wall_time", r.wall_time}});
  }
  doc["failures"] = json::array();
  for (const auto& f : result.failures) {
    doc["failures"].push_back(
        {{"dataset", f.dataset}, {"alpha", f.alpha}, {"method", f.method}, {"trial", f.trial}, {"reason", f.reason}});
  }
  doc["summary"] = json::array();
  for (const auto& s : result.summary) {
    doc["summary"].push_back(
        {{"dataset", s.dataset}, {"alpha", s.alpha}, {"method", s.method}, {"mean_npe", s.mean_npe}, {"count", s.count}});
  }
  std::ofstream out(cfg.output / "results.json");
  out << doc.dump(2) << "\n";
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("model file lacks '") + key + "'");
  const json& rows = doc.at(key);
  if (!rows.is_array()) throw ConfigError(std::string("model entry '") + key + "' is not an array of rows");
  if (rows.empty()) return Matrix(0, 0);
  const auto cols = rows.front().size();
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != cols) {
      throw ConfigError(std::string("model entry '") + key + "' has ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c].get<double>();
  }
  return m;
}

void fit_empty(Matrix& m, Index rows, Index cols) {
  if (m.size() == 0) m = Matrix::Zero(rows, cols);
}

}  // namespace

StateSpaceModel read_model_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("model file " + path.string() + ": " + e.what());
  }
  Matrix a = matrix_from_json(doc, "A");
  Matrix b = matrix_from_json(doc, "B");
  Matrix c = matrix_from_json(doc, "C");
  Matrix d = matrix_from_json(doc, "D");
  Matrix k = matrix_from_json(doc, "K");
  Matrix sigma = matrix_from_json(doc, "Sigma");
  const Index nx = a.rows();
  const Index no = sigma.rows();
  const Index ni = d.size() > 0 ? d.cols() : b.cols();
  fit_empty(b, nx, ni);
  fit_empty(c, no, nx);
  fit_empty(d, no, ni);
  fit_empty(k, nx, no);
  return make_model(a, b, c, d, k, sigma);
}

void write_model_json(const std::filesystem::path& path, const StateSpaceModel& model) {
  json doc;
  doc["A"] = matrix_to_json(model.A);
  doc["B"] = matrix_to_json(model.B);
  doc["C"] = matrix_to_json(model.C);
  doc["D"] = matrix_to_json(model.D);
  doc["K"] = matrix_to_json(model.K);
  doc["Sigma"] = matrix_to_json(model.Sigma);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

StateSpaceModel preset_model(const std::string& name) {
  if (name == "mimo3") {
    Matrix a(3, 3), b(3, 2), c(2, 3), k(3, 2);
    a << 0.7, 0.2, 0.0, -0.2, 0.7, 0.0, 0.0, 0.0, -0.5;
    b << 1.0, 0.0, 0.0, 1.0, 1.0, -1.0;
    c << 1.0, 0.0, 1.0, 0.0, 1.0, 1.0;
    k << 0.45, 0.0, -0.25, 0.5, -0.1, -0.15;
    return make_model(a, b, c, Matrix::Zero(2, 2), k, 0.1 * Matrix::Identity(2, 2));
  }
  if (name == "siso") {
    Matrix a(1, 1), b(1, 1), c(1, 1), d(1, 1), k(1, 1), s(1, 1);
    a << 0.8;
    b << 1.0;
    c << 1.0;
    d << 0.0;
    k << 0.5;
    s << 0.1;
    return make_model(a, b, c, d, k, s);
  }
  throw ConfigError("unknown preset '" + name + "' (expected mimo3 or siso)");
}

}  // namespace bsid
