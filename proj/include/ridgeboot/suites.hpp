#pragma once

#include "ridgeboot/theory.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ridgeboot {

/// Sizes and parameters of the verification suites. Every field is an optional
/// `key = value` entry of a suite config file; lists use ';' separators.
struct SuiteConfig {
  unsigned threads = 1;

  // theorem1 and mspe-link: randomized small-n sweep plus the four study settings
  std::size_t sweep_size = 200;
  std::size_t sweep_max_n = 40;
  std::size_t sweep_m = 100000;
  std::size_t settings_m = 100000;
  bool include_settings = true;
  std::size_t mspe_sweep_reps = 20;
  std::size_t mspe_sweep_m_ref = 20000;
  std::size_t mspe_reps = 200;  // per study setting
  std::size_t mspe_m_ref = 100000;

  // rates
  std::vector<double> mspe_nus = {1.0, 2.0, 0.3};
  std::vector<std::size_t> mspe_n_grid = {64, 128, 256, 512, 1024};
  std::size_t mspe_trials = 20;
  std::vector<std::string> d2_noises = {"normal", "t:5"};
  std::vector<std::size_t> d2_n_grid = {100, 1000, 10000, 100000};
  std::size_t d2_trials = 20;
  std::size_t d2_m_ref = 1000000;

  // design-events
  double events_eta = 1.0;
  double events_gamma = 0.6;
  std::size_t events_bias_n = 400;
  std::vector<std::size_t> events_variance_n = {200, 400, 800};
  std::size_t events_trials = 100;
  std::size_t events_calibration_trials = 100;

  // theorem4
  double t4_eta = 1.0;
  double t4_gamma = 0.55;
  std::vector<std::size_t> t4_n_grid = {50, 100, 200};
  std::size_t t4_designs = 400;
  std::size_t t4_noise_reps = 1000;

  // appendix
  std::size_t wishart_n = 50;
  std::size_t wishart_samples = 10000;
  std::size_t svd_n = 10;
  std::size_t svd_p = 4;
  std::size_t svd_samples = 10000;
  std::size_t lm_trials = 100000;
  std::vector<double> lm_t = {0.5, 1.0, 2.0, 4.0};
};

SuiteConfig parse_suite_config(std::string_view text);
SuiteConfig read_suite_config(const std::string& path);

/// Suite names: theorem1, mspe-link, rates, design-events, theorem4, appendix.
std::vector<CheckReport> run_suite(std::string_view suite, const SuiteConfig& config,
                                   std::uint64_t seed);

/// Small random configuration of the theorem1 / mspe-link sweep, fully
/// determined by its own seed: n in [5, max_n], p in [1, 2n], Gaussian design
/// with random decay, Gaussian beta and contrast (or a row of X), noise family
/// drawn from {normal, t:5, two_point}, sigma and both penalties log-uniform.
struct SweepCase {
  Dataset data;
  Vector contrast;
  NoiseSpec noise;
  double rho = 0.0;
  double pilot_rho = 0.0;
};

SweepCase sweep_case(std::uint64_t case_seed, std::size_t max_n);

/// Report CSV: name,lhs,rhs,margin,holds,n,p,eta,gamma,theta,seed
std::string format_reports(const std::vector<CheckReport>& reports);
void write_reports(const std::vector<CheckReport>& reports, const std::string& path);

}  // namespace ridgeboot
