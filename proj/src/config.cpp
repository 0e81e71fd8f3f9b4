#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "bsid/expharness.hpp"

namespace bsid {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class LineContext {
 public:
  explicit LineContext(Index line) : line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + msg);
  }

  std::vector<std::string> list(const std::string& v) const {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }

  double number(const std::string& v) const {
    std::size_t pos = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &pos);
    } catch (const std::exception&) {
      fail("'" + v + "' is not a number");
    }
    if (pos != v.size()) fail("'" + v + "' is not a number");
    return out;
  }

  Index integer(const std::string& v) const {
    std::size_t pos = 0;
    long long out = 0;
    try {
      out = std::stoll(v, &pos);
    } catch (const std::exception&) {
      fail("'" + v + "' is not an integer");
    }
    if (pos != v.size()) fail("'" + v + "' is not an integer");
    return static_cast<Index>(out);
  }

  std::uint64_t unsigned_integer(const std::string& v) const {
    std::size_t pos = 0;
    unsigned long long out = 0;
    if (!v.empty() && v[0] == '-') fail("'" + v + "' must be nonnegative");
    try {
      out = std::stoull(v, &pos);
    } catch (const std::exception&) {
      fail("'" + v + "' is not an integer");
    }
    if (pos != v.size()) fail("'" + v + "' is not an integer");
    return out;
  }

  bool boolean(const std::string& v) const {
    const std::string s = lower(v);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    fail("'" + v + "' is not a boolean");
  }

  std::vector<Index> indices(const std::string& v) const {
    std::vector<Index> out;
    for (const auto& t : list(v)) out.push_back(integer(t));
    return out;
  }

 private:
  Index line_;
};

void set_global(ExperimentConfig& cfg, const std::string& key, const std::string& value, const LineContext& ctx) {
  ChainConfig& chain = cfg.estimator.chain;
  try {
    if (key == "seed") {
      cfg.seed = ctx.unsigned_integer(value);
    } else if (key == "noise_levels" || key == "alphas") {
      cfg.noise_levels.clear();
      for (const auto& t : ctx.list(value)) cfg.noise_levels.push_back(ctx.number(t));
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& t : ctx.list(value)) cfg.methods.push_back(parse_method(t));
    } else if (key == "trials") {
      cfg.trials = ctx.integer(value);
    } else if (key == "rank") {
      cfg.estimator.rank.fixed = lower(value) == "auto" ? 0 : ctx.integer(value);
      if (cfg.estimator.rank.fixed < 0) ctx.fail("rank must be positive or auto");
    } else if (key == "variant") {
      chain.gf_variant = parse_gf_variant(value);
    } else if (key == "iters") {
      chain.total_iterations = ctx.integer(value);
    } else if (key == "burnin") {
      chain.burn_in = ctx.integer(value);
    } else if (key == "average") {
      chain.average_mode = parse_average_mode(value);
    } else if (key == "refresh") {
      chain.gamma_refresh = ctx.boolean(value);
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "npe_denominator") {
      if (value == "clean")
        cfg.npe_denominator = NpeDenominator::clean;
      else if (value == "contaminated")
        cfg.npe_denominator = NpeDenominator::contaminated;
      else
        ctx.fail("npe_denominator must be clean or contaminated");
    } else {
      ctx.fail("unknown key '" + key + "'");
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("config line", 0) == 0) throw;
    ctx.fail(msg);
  }
}

void set_dataset(DatasetSpec& d, const std::string& key, const std::string& value, const LineContext& ctx,
                 const std::filesystem::path& base_dir) {
  if (key == "name") {
    d.name = value;
  } else if (key == "path") {
    const std::filesystem::path p(value);
    d.path = p.is_absolute() ? p : base_dir / p;
  } else if (key == "inputs") {
    d.input_columns = ctx.indices(value);
  } else if (key == "outputs") {
    d.output_columns = ctx.indices(value);
  } else if (key == "skip") {
    d.skip_columns = ctx.indices(value);
  } else if (key == "estimation_length") {
    d.estimation_length = ctx.integer(value);
  } else if (key == "validation_length") {
    d.validation_length = ctx.integer(value);
  } else if (key == "reuse") {
    d.reuse = ctx.boolean(value);
  } else if (key == "truth_model") {
    const std::filesystem::path p(value);
    d.truth_model = p.is_absolute() ? p : base_dir / p;
  } else {
    ctx.fail("unknown dataset key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  Index line_no = 0;
  bool in_dataset = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineContext ctx(line_no);
    const auto hash = raw.find('#');
    const std::string line = strip(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[dataset]") ctx.fail("unknown section " + line);
      cfg.datasets.emplace_back();
      cfg.datasets.back().name = "dataset" + std::to_string(cfg.datasets.size());
      in_dataset = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected key = value");
    const std::string key = lower(strip(line.substr(0, eq)));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) ctx.fail("empty key");
    if (in_dataset)
      set_dataset(cfg.datasets.back(), key, value, ctx, base_dir);
    else
      set_global(cfg, key, value, ctx);
  }
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config_text(ss.str(), path.parent_path());
}

}  // namespace bsid
