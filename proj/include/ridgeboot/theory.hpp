#pragma once

#include "ridgeboot/designs.hpp"
#include "ridgeboot/linmodel.hpp"
#include "ridgeboot/mallows.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ridgeboot {

/// Parameters a check was run with. NaN marks "not applicable".
struct CheckConfig {
  std::size_t n = 0;
  std::size_t p = 0;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::size_t m_psi = 0;
  std::size_t m_phi = 0;
  std::size_t m_ref = 0;
  std::size_t reps = 0;
};

/// One inequality lhs <= rhs (+ tolerance). margin = rhs - lhs.
struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool holds = false;
  CheckConfig config;
};

CheckReport make_report(std::string name, double lhs, double rhs, double tolerance,
                        const CheckConfig& config);

/// Log-log fit of a size-indexed quantity against a target exponent.
struct RateEstimate {
  std::vector<double> n_grid;
  std::vector<double> values;
  double fitted_slope = 0.0;
  double target_slope = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;

  bool within_band() const { return fitted_slope >= band_lo && fitted_slope <= band_hi; }
  bool strictly_decreasing() const;
};

/// Least-squares slope of log(y) on log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Sizes of the samples standing in for continuous laws.
struct SampleSizes {
  std::size_t m_psi = 100000;  // draws of the true normalized contrast law
  std::size_t m_phi = 100000;  // bootstrap draws
  std::size_t m_ref = 100000;  // reference draws approximating F0
};

/// Relative slack on the right-hand side of the two consistency bounds.
inline constexpr double kBoundSlack = 0.05;

/// Consistency bound for the residual bootstrap of one contrast:
///   d2^2(Psi/sqrt(v), Phi(F_hat)/sqrt(v)) <= d2^2(F0, F_hat)/sigma^2 + b^2/v,
/// with both laws on the left and F0 on the right replaced by samples.
/// `data` must be in simulation mode; `noise` is F0.
CheckReport check_theorem1(const Dataset& data, const Vector& c, double rho, double pilot_rho,
                           const NoiseSpec& noise, const SampleSizes& sizes, std::uint64_t seed);

/// Same bound for an arbitrary centered estimate of F0.
CheckReport check_theorem1_with(const Dataset& data, const Vector& c, double rho,
                                const EmpiricalDistribution& f_hat, const NoiseSpec& noise,
                                const SampleSizes& sizes, std::uint64_t seed);

enum class ResidualSource { ridge, ols, perfect };

/// E d2^2(F_hat, F0) <= 2 mspe + 2 E d2^2(F_n, F0) + 2 sigma^2/n over `reps`
/// fresh responses on the fixed design of `data`. `perfect` uses the true
/// errors as residuals.
CheckReport check_mspe_link(const Dataset& data, ResidualSource source, double pilot_rho,
                            std::size_t reps, std::size_t m_ref, const NoiseSpec& noise,
                            std::uint64_t seed);

struct RateOptions {
  double p_ratio = 0.5;
  double sigma = 1.0;
  unsigned threads = 1;
};

/// Mean exact MSPE of the pilot ridge fit at varrho = n^(1 - theta_rule(nu))
/// over Gaussian designs with eigenvalue decay nu; target slope -theta_rule(nu).
RateEstimate rate_mspe(double nu, std::span<const std::size_t> n_grid, std::size_t trials,
                       std::uint64_t seed, const RateOptions& options = {});

/// Mean d2^2(F_n, F0) per n; slope of log(value / log n) against log n,
/// target -1/2.
RateEstimate rate_d2_empirical(const NoiseSpec& noise, std::span<const std::size_t> n_grid,
                               std::size_t trials, std::size_t m_ref, std::uint64_t seed,
                               unsigned threads = 1);

/// Half-width of the acceptance band around a target slope.
inline constexpr double kRateBand = 0.15;

struct DesignEventSample {
  double max_bias_sq = 0.0;       // max_i b^2(X; X_i)
  double max_inv_variance = 0.0;  // max_i 1/v(X; X_i), sigma = 1
};

/// Per-design extremes over rows, for Gaussian designs with decay eta,
/// beta = 1/||1|| and rho = n^(1 - gamma). Requires 0 < gamma < min(eta, 1).
std::vector<DesignEventSample> sample_design_events(double eta, double gamma, std::size_t n,
                                                    std::size_t trials, std::uint64_t seed,
                                                    double p_ratio = 0.5, unsigned threads = 1);

/// Largest max_i 1/v(X; X_i) / n^(1 - gamma/eta) over a calibration batch.
double calibrate_variance_constant(double eta, double gamma, std::size_t n, std::size_t trials,
                                   std::uint64_t seed, double p_ratio = 0.5,
                                   unsigned threads = 1);

struct DesignEventOptions {
  double p_ratio = 0.5;
  double tau = 1.0;
  double kappa2 = std::numeric_limits<double>::quiet_NaN();  // NaN skips the variance event
  double min_frequency = 0.95;
  unsigned threads = 1;
};

/// Frequencies of
///   max_i b^2(X;X_i) <= 5||beta||^2 (tau+1) log(n+2) n^(-gamma)
///   max_i 1/v(X;X_i) <= kappa2 n^(1 - gamma/eta)
/// over `trials` designs. Each report has lhs = required frequency and
/// rhs = observed frequency.
std::vector<CheckReport> check_design_events(double eta, double gamma, double theta,
                                             std::size_t n, std::size_t trials,
                                             std::uint64_t seed,
                                             const DesignEventOptions& options = {});

/// E[Sigma_hat^2] = (1 + 1/n) Sigma^2 + (tr Sigma / n) Sigma for Sigma_hat = X'X/n.
Matrix wishart_square_closed_form(const Matrix& sigma, std::size_t n);

/// Frobenius-relative error of the Monte Carlo mean of Sigma_hat^2; holds at <= 2%.
CheckReport wishart_square(const Matrix& sigma, std::size_t n, std::size_t mc_samples,
                           std::uint64_t seed);

/// Z = H L G' with L positive decreasing and G's first row nonnegative.
struct SignedSvd {
  Matrix H;
  Vector L;
  Matrix G;
};

SignedSvd signed_svd(const Matrix& Z);

/// Mean of ||H_1||^2 over standard Gaussian n x p matrices against p/n; holds within 0.01.
CheckReport signed_svd_row_law(std::size_t n, std::size_t p, std::size_t samples,
                               std::uint64_t seed);

/// Empirical frequencies of the two Gaussian quadratic-form tail events per t,
/// each compared with exp(-t) + 3 binomial standard errors.
std::vector<CheckReport> lm_tail_check(const Matrix& A, std::span<const double> t_grid,
                                       std::size_t trials, std::uint64_t seed);

struct Theorem4Options {
  double p_ratio = 0.5;
  NoiseSpec noise{ScaledStudentT{5.0}, 0.1};
  unsigned threads = 1;
};

/// Median over designs of max_i d2^2 between the normalized true and bootstrap
/// laws of X_i'(b_rho - beta), per n. Requires eta/(1+eta) < gamma < min(eta, 1).
/// A NaN theta selects theta_rule(eta).
RateEstimate check_theorem4(double eta, double gamma, double theta,
                            std::span<const std::size_t> n_grid, std::size_t design_trials,
                            std::size_t noise_reps, std::uint64_t seed,
                            const Theorem4Options& options = {});

}  // namespace ridgeboot
