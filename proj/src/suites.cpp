#include "ridgeboot/suites.hpp"

#include "ridgeboot/csv_io.hpp"
#include "ridgeboot/errors.hpp"
#include "ridgeboot/harness.hpp"
#include "ridgeboot/parallel.hpp"
#include "ridgeboot/tuning.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
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
T parse_value(const std::string& key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("key '" + key + "' has an invalid value '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto semi = text.find(';');
    out.emplace_back(trim(text.substr(0, semi)));
    if (semi == std::string_view::npos) break;
    text = text.substr(semi + 1);
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_value<T>(key, item));
  return out;
}

using Setter = std::function<void(SuiteConfig&, const std::string& key, std::string_view)>;

template <class T>
Setter scalar(T SuiteConfig::*field) {
  return [field](SuiteConfig& c, const std::string& key, std::string_view v) {
    c.*field = parse_value<T>(key, v);
  };
}

template <class T>
Setter list(std::vector<T> SuiteConfig::*field) {
  return [field](SuiteConfig& c, const std::string& key, std::string_view v) {
    c.*field = parse_list<T>(key, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"threads", scalar(&SuiteConfig::threads)},
      {"sweep_size", scalar(&SuiteConfig::sweep_size)},
      {"sweep_max_n", scalar(&SuiteConfig::sweep_max_n)},
      {"sweep_m", scalar(&SuiteConfig::sweep_m)},
      {"settings_m", scalar(&SuiteConfig::settings_m)},
      {"include_settings",
       [](SuiteConfig& c, const std::string& key, std::string_view v) {
         v = trim(v);
         if (v == "true" || v == "1") {
           c.include_settings = true;
         } else if (v == "false" || v == "0") {
           c.include_settings = false;
         } else {
           throw ConfigError("key '" + key + "' expects true or false");
         }
       }},
      {"mspe_sweep_reps", scalar(&SuiteConfig::mspe_sweep_reps)},
      {"mspe_sweep_m_ref", scalar(&SuiteConfig::mspe_sweep_m_ref)},
      {"mspe_reps", scalar(&SuiteConfig::mspe_reps)},
      {"mspe_m_ref", scalar(&SuiteConfig::mspe_m_ref)},
      {"mspe_nus", list(&SuiteConfig::mspe_nus)},
      {"mspe_n_grid", list(&SuiteConfig::mspe_n_grid)},
      {"mspe_trials", scalar(&SuiteConfig::mspe_trials)},
      {"d2_noises",
       [](SuiteConfig& c, const std::string&, std::string_view v) {
         c.d2_noises = split_list(v);
       }},
      {"d2_n_grid", list(&SuiteConfig::d2_n_grid)},
      {"d2_trials", scalar(&SuiteConfig::d2_trials)},
      {"d2_m_ref", scalar(&SuiteConfig::d2_m_ref)},
      {"events_eta", scalar(&SuiteConfig::events_eta)},
      {"events_gamma", scalar(&SuiteConfig::events_gamma)},
      {"events_bias_n", scalar(&SuiteConfig::events_bias_n)},
      {"events_variance_n", list(&SuiteConfig::events_variance_n)},
      {"events_trials", scalar(&SuiteConfig::events_trials)},
      {"events_calibration_trials", scalar(&SuiteConfig::events_calibration_trials)},
      {"t4_eta", scalar(&SuiteConfig::t4_eta)},
      {"t4_gamma", scalar(&SuiteConfig::t4_gamma)},
      {"t4_n_grid", list(&SuiteConfig::t4_n_grid)},
      {"t4_designs", scalar(&SuiteConfig::t4_designs)},
      {"t4_noise_reps", scalar(&SuiteConfig::t4_noise_reps)},
      {"wishart_n", scalar(&SuiteConfig::wishart_n)},
      {"wishart_samples", scalar(&SuiteConfig::wishart_samples)},
      {"svd_n", scalar(&SuiteConfig::svd_n)},
      {"svd_p", scalar(&SuiteConfig::svd_p)},
      {"svd_samples", scalar(&SuiteConfig::svd_samples)},
      {"lm_trials", scalar(&SuiteConfig::lm_trials)},
      {"lm_t", list(&SuiteConfig::lm_t)},
  };
  return table;
}

std::string format_param(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

/// Rate fit as a report: lhs = distance of the fitted slope from its target.
CheckReport rate_report(std::string name, const RateEstimate& rate, CheckConfig config) {
  const double half_band = 0.5 * (rate.band_hi - rate.band_lo);
  return make_report(std::move(name), std::abs(rate.fitted_slope - rate.target_slope), half_band,
                     0.0, config);
}

CheckReport strict_decrease_report(std::string name, double later, double earlier,
                                   CheckConfig config) {
  CheckReport r = make_report(std::move(name), later, earlier, 0.0, config);
  r.holds = later < earlier;
  return r;
}

struct SettingCase {
  Dataset data;
  Vector contrast;
  NoiseSpec noise;
  PenaltyPlan plan;
};

/// First design and first response of a study setting, penalties from CV.
SettingCase setting_case(const std::string& name, std::uint64_t seed) {
  ExperimentConfig cfg = preset(name, Scale::desk);
  cfg.seed = seed;
  const DesignDraw design = draw_design(cfg, 0);
  const Vector y = draw_response(cfg, design, 0, 0);
  Rng fold_rng(seed_split(cfg.seed, {setting_key(cfg.setting), 0, 0, 1}));
  const CrossValidator cv(design.X, cfg.cv_folds, fold_rng);
  SettingCase out{Dataset::simulated(design.X, y, design.beta, cfg.sigma),
                  design.X.row(design.target_row).transpose(), cfg.noise_spec(),
                  cv.select(y, make_cv_grid(cfg.n, cfg.cv_grid))};
  return out;
}

const std::array<std::string, 4> kSettings = {"setting1", "setting2", "setting3", "setting4"};

std::vector<CheckReport> theorem1_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  std::vector<CheckReport> out(cfg.sweep_size);
  parallel_for(cfg.sweep_size, cfg.threads, [&](std::size_t k) {
    const std::uint64_t case_seed = seed_split(seed, {1, k});
    const SweepCase sc = sweep_case(case_seed, cfg.sweep_max_n);
    CheckReport r = check_theorem1(sc.data, sc.contrast, sc.rho, sc.pilot_rho, sc.noise,
                                   {cfg.sweep_m, cfg.sweep_m, cfg.sweep_m},
                                   seed_split(case_seed, {1}));
    r.name = "theorem1_sweep_" + std::to_string(k);
    r.config.seed = case_seed;
    out[k] = std::move(r);
  });
  if (cfg.include_settings) {
    for (const auto& name : kSettings) {
      const SettingCase sc = setting_case(name, seed);
      CheckReport r = check_theorem1(sc.data, sc.contrast, sc.plan.inference_rho,
                                     sc.plan.pilot_rho, sc.noise,
                                     {cfg.settings_m, cfg.settings_m, cfg.settings_m},
                                     seed_split(seed, {2, setting_key(name)}));
      r.name = "theorem1_" + name;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<CheckReport> mspe_link_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  const auto run_sources = [](const Dataset& data, double pilot, const NoiseSpec& noise,
                               std::size_t reps, std::size_t m_ref, std::uint64_t child,
                               const std::string& suffix, std::vector<CheckReport>& sink) {
    const bool ols_ok = data.p() <= data.n() && SpectralRidge(data.X).full_column_rank();
    for (ResidualSource source :
         {ResidualSource::ridge, ResidualSource::ols, ResidualSource::perfect}) {
      if (source == ResidualSource::ols && !ols_ok) continue;
      CheckReport r = check_mspe_link(data, source, pilot, reps, m_ref, noise,
                                      seed_split(child, {static_cast<std::uint64_t>(source)}));
      r.name += suffix;
      r.config.seed = child;
      sink.push_back(std::move(r));
    }
  };
  std::vector<std::vector<CheckReport>> slots(cfg.sweep_size);
  parallel_for(cfg.sweep_size, cfg.threads, [&](std::size_t k) {
    const std::uint64_t case_seed = seed_split(seed, {1, k});
    const SweepCase sc = sweep_case(case_seed, cfg.sweep_max_n);
    run_sources(sc.data, sc.pilot_rho, sc.noise, cfg.mspe_sweep_reps, cfg.mspe_sweep_m_ref,
                case_seed, "_sweep_" + std::to_string(k), slots[k]);
  });
  std::vector<CheckReport> out;
  for (auto& slot : slots) {
    for (auto& r : slot) out.push_back(std::move(r));
  }
  if (cfg.include_settings) {
    for (const auto& name : kSettings) {
      const SettingCase sc = setting_case(name, seed);
      run_sources(sc.data, sc.plan.pilot_rho, sc.noise, cfg.mspe_reps, cfg.mspe_m_ref,
                  seed_split(seed, {2, setting_key(name)}), "_" + name, out);
    }
  }
  return out;
}

std::vector<CheckReport> rates_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  std::vector<CheckReport> out;
  RateOptions options;
  options.threads = cfg.threads;
  for (std::size_t k = 0; k < cfg.mspe_nus.size(); ++k) {
    const double nu = cfg.mspe_nus[k];
    const std::uint64_t child = seed_split(seed, {1, k});
    const RateEstimate rate = rate_mspe(nu, cfg.mspe_n_grid, cfg.mspe_trials, child, options);
    CheckConfig cc;
    cc.n = cfg.mspe_n_grid.back();
    cc.p = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(options.p_ratio * static_cast<double>(cc.n))));
    cc.eta = nu;
    cc.theta = theta_rule(nu);
    cc.seed = child;
    cc.reps = cfg.mspe_trials;
    out.push_back(rate_report("rate_mspe_nu=" + format_param(nu), rate, cc));
  }
  for (std::size_t k = 0; k < cfg.d2_noises.size(); ++k) {
    NoiseSpec noise{NoiseSpec::parse_family(cfg.d2_noises[k]), 1.0};
    if (std::holds_alternative<ScaledStudentT>(noise.family)) noise.sigma = 0.1;
    const std::uint64_t child = seed_split(seed, {2, k});
    const RateEstimate rate =
        rate_d2_empirical(noise, cfg.d2_n_grid, cfg.d2_trials, cfg.d2_m_ref, child, cfg.threads);
    CheckConfig cc;
    cc.n = cfg.d2_n_grid.back();
    cc.seed = child;
    cc.m_ref = cfg.d2_m_ref;
    cc.reps = cfg.d2_trials;
    const std::string tag = noise.family_text();
    out.push_back(rate_report("rate_d2_" + tag, rate, cc));
    for (std::size_t i = 1; i < rate.values.size(); ++i) {
      cc.n = cfg.d2_n_grid[i];
      out.push_back(strict_decrease_report("rate_d2_" + tag + "_decrease_n=" +
                                               std::to_string(cfg.d2_n_grid[i]),
                                           rate.values[i], rate.values[i - 1], cc));
    }
  }
  return out;
}

std::vector<CheckReport> design_events_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  std::vector<CheckReport> out;
  DesignEventOptions options;
  options.threads = cfg.threads;
  const double theta = theta_rule(cfg.events_eta);
  auto bias = check_design_events(cfg.events_eta, cfg.events_gamma, theta, cfg.events_bias_n,
                                  cfg.events_trials, seed_split(seed, {1}), options);
  bias.front().name += "_n=" + std::to_string(cfg.events_bias_n);
  out.push_back(bias.front());
  if (cfg.events_variance_n.empty()) return out;
  const std::size_t n0 =
      *std::min_element(cfg.events_variance_n.begin(), cfg.events_variance_n.end());
  options.kappa2 = calibrate_variance_constant(cfg.events_eta, cfg.events_gamma, n0,
                                               cfg.events_calibration_trials,
                                               seed_split(seed, {2}), options.p_ratio,
                                               cfg.threads);
  for (std::size_t n : cfg.events_variance_n) {
    const auto reports = check_design_events(cfg.events_eta, cfg.events_gamma, theta, n,
                                             cfg.events_trials, seed_split(seed, {3, n}),
                                             options);
    CheckReport r = reports.at(1);
    r.name += "_n=" + std::to_string(n);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> theorem4_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  Theorem4Options options;
  options.threads = cfg.threads;
  const double theta = theta_rule(cfg.t4_eta);
  const RateEstimate trend = check_theorem4(cfg.t4_eta, cfg.t4_gamma, theta, cfg.t4_n_grid,
                                            cfg.t4_designs, cfg.t4_noise_reps, seed, options);
  std::vector<CheckReport> out;
  CheckConfig cc;
  cc.eta = cfg.t4_eta;
  cc.gamma = cfg.t4_gamma;
  cc.theta = theta;
  cc.seed = seed;
  cc.m_psi = cc.m_phi = cfg.t4_noise_reps;
  cc.reps = cfg.t4_designs;
  for (std::size_t i = 0; i < trend.values.size(); ++i) {
    cc.n = cfg.t4_n_grid[i];
    cc.p = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                        options.p_ratio * static_cast<double>(cc.n))));
    if (i == 0) {
      CheckReport r = make_report("theorem4_median_n=" + std::to_string(cc.n), trend.values[0],
                                  std::numeric_limits<double>::infinity(), 0.0, cc);
      out.push_back(std::move(r));
    } else {
      out.push_back(strict_decrease_report("theorem4_decrease_n=" + std::to_string(cc.n),
                                           trend.values[i], trend.values[i - 1], cc));
    }
  }
  return out;
}

std::vector<CheckReport> appendix_suite(const SuiteConfig& cfg, std::uint64_t seed) {
  std::vector<CheckReport> out;
  Matrix sigma = Vector::LinSpaced(3, 1.0, 3.0).cwiseInverse().asDiagonal();
  out.push_back(wishart_square(sigma, cfg.wishart_n, cfg.wishart_samples, seed_split(seed, {1})));

  Rng rng(seed_split(seed, {2}));
  Matrix Z(20, 8);
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    for (Eigen::Index i = 0; i < Z.rows(); ++i) Z(i, j) = rng.normal();
  }
  const SignedSvd f = signed_svd(Z);
  const double recon = (f.H * f.L.asDiagonal() * f.G.transpose() - Z).norm() / Z.norm();
  CheckConfig cc;
  cc.n = 20;
  cc.p = 8;
  cc.seed = seed_split(seed, {2});
  out.push_back(make_report("signed_svd_reconstruction", recon, 1e-10, 0.0, cc));
  out.push_back(
      signed_svd_row_law(cfg.svd_n, cfg.svd_p, cfg.svd_samples, seed_split(seed, {3})));

  const std::vector<double> unit_t = {1.0};
  for (auto& r : lm_tail_check(Matrix::Identity(5, 5), unit_t, cfg.lm_trials,
                               seed_split(seed, {4}))) {
    r.name = "identity5_" + r.name;
    out.push_back(std::move(r));
  }
  Rng arng(seed_split(seed, {5}));
  Matrix G(8, 8);
  for (Eigen::Index j = 0; j < 8; ++j) {
    for (Eigen::Index i = 0; i < 8; ++i) G(i, j) = arng.normal();
  }
  const Matrix A = 0.5 * (G + G.transpose());
  for (auto& r : lm_tail_check(A, cfg.lm_t, cfg.lm_trials, seed_split(seed, {6}))) {
    r.name = "random8_" + r.name;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

SuiteConfig parse_suite_config(std::string_view text) {
  SuiteConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
    it->second(cfg, key, line.substr(eq + 1));
  }
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  return cfg;
}

SuiteConfig read_suite_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open suite config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_suite_config(buffer.str());
}

SweepCase sweep_case(std::uint64_t case_seed, std::size_t max_n) {
  if (max_n < 5) throw InputError("sweep needs max_n >= 5");
  Rng rng(case_seed);
  const auto log_uniform = [&](double lo, double hi) {
    return lo * std::exp(rng.uniform() * std::log(hi / lo));
  };
  const std::size_t n = 5 + rng.index(max_n - 4);
  const std::size_t p = 1 + rng.index(2 * n);
  const double eta = 2.0 * rng.uniform();
  const CovarianceModel cov = make_covariance(static_cast<Eigen::Index>(p), eta, rng);
  Vector beta(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = rng.normal();

  SweepCase out;
  switch (rng.index(3)) {
    case 0:
      out.noise.family = NormalNoise{};
      break;
    case 1:
      out.noise.family = ScaledStudentT{5.0};
      break;
    default:
      out.noise.family = TwoPointNoise{};
      break;
  }
  out.noise.sigma = log_uniform(0.05, 2.0);
  out.data = generate_dataset(static_cast<Eigen::Index>(n), cov, beta, out.noise, rng);
  if (rng.index(2) == 0) {
    out.contrast.resize(static_cast<Eigen::Index>(p));
    for (Eigen::Index j = 0; j < out.contrast.size(); ++j) out.contrast(j) = rng.normal();
  } else {
    out.contrast = out.data.X.row(static_cast<Eigen::Index>(rng.index(n))).transpose();
  }
  const auto nd = static_cast<double>(n);
  out.rho = log_uniform(1e-3 * nd, 10.0 * nd);
  out.pilot_rho = log_uniform(1e-3 * nd, 10.0 * nd);
  return out;
}

std::vector<CheckReport> run_suite(std::string_view suite, const SuiteConfig& config,
                                   std::uint64_t seed) {
  if (suite == "theorem1") return theorem1_suite(config, seed);
  if (suite == "mspe-link") return mspe_link_suite(config, seed);
  if (suite == "rates") return rates_suite(config, seed);
  if (suite == "design-events") return design_events_suite(config, seed);
  if (suite == "theorem4") return theorem4_suite(config, seed);
  if (suite == "appendix") return appendix_suite(config, seed);
  throw ConfigError("unknown suite '" + std::string(suite) + "'");
}

std::string format_reports(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  os << "name,lhs,rhs,margin,holds,n,p,eta,gamma,theta,seed\n";
  for (const CheckReport& r : reports) {
    os << r.name << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
       << format_double(r.margin) << ',' << (r.holds ? "true" : "false") << ',' << r.config.n
       << ',' << r.config.p << ',' << format_double(r.config.eta) << ','
       << format_double(r.config.gamma) << ',' << format_double(r.config.theta) << ','
       << r.config.seed << '\n';
  }
  return os.str();
}

void write_reports(const std::vector<CheckReport>& reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report file '" + path + "'");
  out << format_reports(reports);
  if (!out) throw IoError("failed writing report file '" + path + "'");
}

}  // namespace ridgeboot
