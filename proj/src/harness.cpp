#include "ridgeboot/harness.hpp"

#include "ridgeboot/csv_io.hpp"
#include "ridgeboot/errors.hpp"
#include "ridgeboot/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace ridgeboot {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + std::string(key) + "' has an invalid value '" + std::string(text) +
                      "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("key '" + std::string(key) + "' expects true or false");
}

const std::set<std::string, std::less<>>& optional_keys() {
  static const std::set<std::string, std::less<>> keys = {"threads", "cv_per_design"};
  return keys;
}

const std::vector<std::string>& all_keys() {
  static const std::vector<std::string> keys = {
      "setting",     "n",           "p",           "eta",
      "N1",          "N2",          "B",           "level",
      "sigma",       "noise",       "cv_grid_min", "cv_grid_max",
      "cv_grid_size", "cv_folds",   "pilot_prefactor", "inference_prefactor",
      "seed",        "threads",     "cv_per_design"};
  return keys;
}

// Shortest text that parses back to the same double.
std::string short_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

struct Tally {
  std::array<std::size_t, 4> covered{};
  std::array<double, 4> width_sum{};
  std::size_t instances = 0;
  std::size_t skips = 0;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (setting.empty() || setting.find_first_of(",\n\r") != std::string::npos) {
    throw ConfigError("setting name must be nonempty and free of commas and newlines");
  }
  if (n < 2 || p < 1) throw ConfigError("need n >= 2 and p >= 1");
  if (p >= n) throw ConfigError("the normal interval needs p < n for its variance estimate");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be finite and >= 0");
  if (N1 < 1 || N2 < 1 || B < 1) throw ConfigError("N1, N2 and B must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
  try {
    noise_spec().validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  if (!(cv_grid.min_factor > 0.0) || !(cv_grid.max_factor >= cv_grid.min_factor) ||
      cv_grid.size < 1) {
    throw ConfigError("cv grid needs 0 < min <= max and size >= 1");
  }
  if (cv_folds < 2 || cv_folds > n) throw ConfigError("cv_folds must lie in [2, n]");
  if (!(pilot_prefactor > 0.0) || !(inference_prefactor > 0.0)) {
    throw ConfigError("penalty prefactors must be positive");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

Scale parse_scale(std::string_view text) {
  if (text == "desk") return Scale::desk;
  if (text == "full") return Scale::full;
  throw ConfigError("scale must be desk or full, got '" + std::string(text) + "'");
}

ExperimentConfig preset(std::string_view name, Scale scale) {
  ExperimentConfig cfg;
  cfg.setting = std::string(name);
  if (name == "setting1") {
    cfg.p = 45, cfg.eta = 0.5;
  } else if (name == "setting2") {
    cfg.p = 95, cfg.eta = 0.5;
  } else if (name == "setting3") {
    cfg.p = 45, cfg.eta = 1.0;
  } else if (name == "setting4") {
    cfg.p = 95, cfg.eta = 1.0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  cfg.n = 100;
  if (scale == Scale::full) {
    cfg.N1 = 100, cfg.N2 = 1000, cfg.B = 1000;
  } else {
    cfg.N1 = 20, cfg.N2 = 500, cfg.B = 500;
  }
  return cfg;
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> values;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(all_keys().begin(), all_keys().end(), key) == all_keys().end()) {
      throw ConfigError("unknown key '" + key + "'");
    }
    if (!values.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }
  for (const auto& key : all_keys()) {
    if (!values.count(key) && !optional_keys().count(key)) {
      throw ConfigError("missing required key '" + key + "'");
    }
  }
  ExperimentConfig cfg;
  const auto get = [&](const std::string& key) -> std::string_view { return values.at(key); };
  cfg.setting = std::string(get("setting"));
  cfg.n = parse_number<std::size_t>("n", get("n"));
  cfg.p = parse_number<std::size_t>("p", get("p"));
  cfg.eta = parse_number<double>("eta", get("eta"));
  cfg.N1 = parse_number<std::size_t>("N1", get("N1"));
  cfg.N2 = parse_number<std::size_t>("N2", get("N2"));
  cfg.B = parse_number<std::size_t>("B", get("B"));
  cfg.level = parse_number<double>("level", get("level"));
  cfg.sigma = parse_number<double>("sigma", get("sigma"));
  try {
    cfg.noise = NoiseSpec::parse_family(std::string(get("noise")));
  } catch (const Error& e) {
    throw ConfigError(std::string("key 'noise': ") + e.what());
  }
  cfg.cv_grid.min_factor = parse_number<double>("cv_grid_min", get("cv_grid_min"));
  cfg.cv_grid.max_factor = parse_number<double>("cv_grid_max", get("cv_grid_max"));
  cfg.cv_grid.size = parse_number<std::size_t>("cv_grid_size", get("cv_grid_size"));
  cfg.cv_folds = parse_number<std::size_t>("cv_folds", get("cv_folds"));
  cfg.pilot_prefactor = parse_number<double>("pilot_prefactor", get("pilot_prefactor"));
  cfg.inference_prefactor =
      parse_number<double>("inference_prefactor", get("inference_prefactor"));
  cfg.seed = parse_number<std::uint64_t>("seed", get("seed"));
  if (values.count("threads")) cfg.threads = parse_number<unsigned>("threads", get("threads"));
  if (values.count("cv_per_design")) {
    cfg.cv_per_design = parse_bool("cv_per_design", get("cv_per_design"));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "setting = " << c.setting << '\n'
     << "n = " << c.n << '\n'
     << "p = " << c.p << '\n'
     << "eta = " << short_double(c.eta) << '\n'
     << "N1 = " << c.N1 << '\n'
     << "N2 = " << c.N2 << '\n'
     << "B = " << c.B << '\n'
     << "level = " << short_double(c.level) << '\n'
     << "sigma = " << short_double(c.sigma) << '\n'
     << "noise = " << c.noise_spec().family_text() << '\n'
     << "cv_grid_min = " << short_double(c.cv_grid.min_factor) << '\n'
     << "cv_grid_max = " << short_double(c.cv_grid.max_factor) << '\n'
     << "cv_grid_size = " << c.cv_grid.size << '\n'
     << "cv_folds = " << c.cv_folds << '\n'
     << "pilot_prefactor = " << short_double(c.pilot_prefactor) << '\n'
     << "inference_prefactor = " << short_double(c.inference_prefactor) << '\n'
     << "seed = " << c.seed << '\n'
     << "threads = " << c.threads << '\n'
     << "cv_per_design = " << (c.cv_per_design ? "true" : "false") << '\n';
  return os.str();
}

void write_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file '" + path + "'");
  out << format_config(config);
  if (!out) throw IoError("failed writing config file '" + path + "'");
}

std::uint64_t setting_key(std::string_view setting) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : setting) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

DesignDraw draw_design(const ExperimentConfig& config, std::size_t d) {
  Rng rng(seed_split(config.seed, {setting_key(config.setting), d, 0, 0}));
  DesignDraw out{make_covariance(static_cast<Eigen::Index>(config.p), config.eta, rng), Matrix(),
                 make_beta(static_cast<Eigen::Index>(config.p)), 0};
  out.X = sample_design(static_cast<Eigen::Index>(config.n), out.covariance, rng);
  out.target_row = leverage_scores(out.X).argmax;
  return out;
}

Vector draw_response(const ExperimentConfig& config, const DesignDraw& design, std::size_t d,
                     std::size_t r) {
  Rng rng(seed_split(config.seed, {setting_key(config.setting), d, r + 1, 0}));
  return design.X * design.beta +
         sample_noise(config.noise_spec(), static_cast<Eigen::Index>(config.n), rng);
}

namespace {

Tally run_design(const ExperimentConfig& config, std::size_t d, std::span<const double> grid) {
  const std::uint64_t key = setting_key(config.setting);
  const DesignDraw design = draw_design(config, d);
  const SpectralRidge model(design.X);
  const Vector c = design.X.row(design.target_row).transpose();
  const double target = c.dot(design.beta);
  Rng fold_rng(seed_split(config.seed, {key, d, 0, 1}));
  const CrossValidator cv(design.X, config.cv_folds, fold_rng);

  struct Instance {
    double oracle_estimate;
    std::array<ConfidenceInterval, 3> intervals;  // ridge_rb, normal, ols_rb
  };
  std::vector<Instance> kept;
  kept.reserve(config.N2);
  std::vector<double> errors;
  std::vector<double> estimates;
  Tally tally;
  double shared_r_hat = 0.0;
  for (std::size_t r = 0; r < config.N2; ++r) {
    const Vector y = draw_response(config, design, d, r);
    try {
      double r_hat = shared_r_hat;
      if (!config.cv_per_design || r == 0) r_hat = cv.select(y, grid).r_hat;
      if (config.cv_per_design && r == 0) shared_r_hat = r_hat;
      const double pilot = config.pilot_prefactor * r_hat;
      const double rho = config.inference_prefactor * r_hat;
      Rng boot_rng(seed_split(config.seed, {key, d, r + 1, 1}));
      Rng ols_rng(seed_split(config.seed, {key, d, r + 1, 2}));
      Instance inst;
      inst.intervals[0] = ci_ridge_rb(model, y, c, rho, pilot, config.B, config.level, boot_rng);
      inst.intervals[1] = ci_normal(model, y, c, rho, config.level);
      inst.intervals[2] = ci_ols_rb(model, y, c, config.B, config.level, ols_rng);
      inst.oracle_estimate = inst.intervals[0].estimate;
      for (const auto& ci : inst.intervals) {
        if (!std::isfinite(ci.lower) || !std::isfinite(ci.upper)) {
          throw DegenerateDataError("nonfinite interval endpoint");
        }
      }
      estimates.push_back(inst.oracle_estimate);
      errors.push_back(inst.oracle_estimate - target);
      kept.push_back(inst);
    } catch (const Error&) {
      ++tally.skips;
    }
  }
  if (kept.empty()) return tally;
  const OracleLaw law = make_oracle_law(std::move(errors), std::move(estimates), config.level);
  for (const Instance& inst : kept) {
    const ConfidenceInterval oracle = law.interval_at(inst.oracle_estimate);
    tally.covered[0] += oracle.contains(target);
    tally.width_sum[0] += oracle.width();
    for (std::size_t m = 0; m < 3; ++m) {
      tally.covered[m + 1] += inst.intervals[m].contains(target);
      tally.width_sum[m + 1] += inst.intervals[m].width();
    }
  }
  tally.instances = kept.size();
  return tally;
}

}  // namespace

Table1Result run_table1(const ExperimentConfig& config) {
  config.validate();
  const std::vector<double> grid = make_cv_grid(config.n, config.cv_grid);
  std::vector<Tally> per_design(config.N1);
  parallel_for(config.N1, config.threads,
               [&](std::size_t d) { per_design[d] = run_design(config, d, grid); });

  Tally total;
  for (const Tally& t : per_design) {
    for (std::size_t m = 0; m < 4; ++m) {
      total.covered[m] += t.covered[m];
      total.width_sum[m] += t.width_sum[m];
    }
    total.instances += t.instances;
    total.skips += t.skips;
  }
  Table1Result out;
  out.setting = config.setting;
  out.seed = config.seed;
  out.skips = total.skips;
  for (std::size_t m = 0; m < 4; ++m) {
    MethodResult mr;
    mr.method = kTable1Methods[m];
    mr.covered = total.covered[m];
    mr.instances = total.instances;
    if (total.instances > 0) {
      const auto count = static_cast<double>(total.instances);
      mr.coverage = static_cast<double>(total.covered[m]) / count;
      mr.width = total.width_sum[m] / count;
    } else {
      mr.coverage = std::numeric_limits<double>::quiet_NaN();
      mr.width = std::numeric_limits<double>::quiet_NaN();
    }
    out.methods.push_back(mr);
  }
  return out;
}

std::string format_results(const std::vector<Table1Result>& results,
                           const ExperimentConfig& config) {
  std::ostringstream os;
  os << "# cv grid: " << config.cv_grid.size << " log-spaced penalties in ["
     << short_double(config.cv_grid.min_factor) << "*n, "
     << short_double(config.cv_grid.max_factor) << "*n], " << config.cv_folds
     << "-fold, ties to the smaller penalty"
     << (config.cv_per_design ? ", one selection per design" : ", one selection per response")
     << '\n'
     << "# penalties: pilot = " << short_double(config.pilot_prefactor)
     << "*r_hat, inference = " << short_double(config.inference_prefactor) << "*r_hat\n"
     << "# quantile rule: order statistic ceil(alpha*B) clamped to [1,B]; oracle uses the same "
        "rule over the N2 contrast errors of each design\n"
     << "# N1 = " << config.N1 << ", N2 = " << config.N2 << ", B = " << config.B
     << ", level = " << short_double(config.level) << ", sigma = " << short_double(config.sigma)
     << ", noise = " << config.noise_spec().family_text() << '\n'
     << "setting,method,coverage,width,instances,skips,seed\n";
  for (const Table1Result& r : results) {
    for (const MethodResult& m : r.methods) {
      os << r.setting << ',' << to_string(m.method) << ',' << format_double(m.coverage) << ','
         << format_double(m.width) << ',' << m.instances << ',' << r.skips << ',' << r.seed
         << '\n';
    }
  }
  return os.str();
}

void write_results(const std::vector<Table1Result>& results, const ExperimentConfig& config,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write results file '" + path + "'");
  out << format_results(results, config);
  if (!out) throw IoError("failed writing results file '" + path + "'");
}

}  // namespace ridgeboot
