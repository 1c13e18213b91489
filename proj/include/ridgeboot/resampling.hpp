#pragma once

#include "ridgeboot/linmodel.hpp"
#include "ridgeboot/mallows.hpp"
#include "ridgeboot/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ridgeboot {

struct BootstrapDraws {
  std::vector<double> values;  // z_1, ..., z_B
  std::size_t B = 0;
  Vector contrast;
  double rho = 0.0;
  double pilot_rho = 0.0;
};

enum class CiMethod { ridge_rb, normal, ols_rb, oracle };

std::string_view to_string(CiMethod m);
CiMethod parse_ci_method(std::string_view text);

struct ConfidenceInterval {
  CiMethod method = CiMethod::ridge_rb;
  double level = 0.9;
  double lower = 0.0;
  double upper = 0.0;
  double estimate = 0.0;  // c' b_rho, the point the interval is built around

  double width() const { return upper - lower; }
  bool contains(double target) const { return lower <= target && target <= upper; }
};

/// Draws z_j = w' eps*_j, eps*_j an n-vector of i.i.d. draws from `residuals`.
/// Replicate j uses its own generator seeded by seed_split(seed, {j}), so the
/// sequence is the same whether replicates run serially or in parallel.
std::vector<double> plug_in_draws(const Vector& weights, const EmpiricalDistribution& residuals,
                                  std::size_t B, std::uint64_t seed);

/// Residual bootstrap of c'(b_rho - E b_rho) with residuals from a pilot fit
/// at `pilot_rho`. Penalty 0 selects least squares for either stage.
BootstrapDraws rb_contrast_draws(const SpectralRidge& model, const Vector& y, const Vector& c,
                                 double rho, double pilot_rho, std::size_t B, Rng& rng);
BootstrapDraws rb_contrast_draws(const Dataset& data, const Vector& c, double rho,
                                 double pilot_rho, std::size_t B, Rng& rng);

/// Order statistic at 1-based index ceil(alpha * B), clamped to [1, B].
double quantile(std::span<const double> values, double alpha);

/// [c'b - q_{(1+level)/2}, c'b - q_{(1-level)/2}] from bootstrap draws.
ConfidenceInterval interval_from_draws(CiMethod method, double estimate,
                                       std::span<const double> draws, double level);

ConfidenceInterval ci_ridge_rb(const SpectralRidge& model, const Vector& y, const Vector& c,
                               double rho, double pilot_rho, std::size_t B, double level,
                               Rng& rng);
ConfidenceInterval ci_ridge_rb(const Dataset& data, const Vector& c, double rho,
                               double pilot_rho, std::size_t B, double level, Rng& rng);

/// c'b_rho +- z_{(1+level)/2} * tau_hat with tau_hat^2 = sigma_hat^2 ||c'(X'X+rho I)^{-1}X'||^2
/// and sigma_hat^2 = RSS_ols / (n - p).
ConfidenceInterval ci_normal(const SpectralRidge& model, const Vector& y, const Vector& c,
                             double rho, double level);
ConfidenceInterval ci_normal(const Dataset& data, const Vector& c, double rho, double level);

ConfidenceInterval ci_ols_rb(const SpectralRidge& model, const Vector& y, const Vector& c,
                             std::size_t B, double level, Rng& rng);
ConfidenceInterval ci_ols_rb(const Dataset& data, const Vector& c, std::size_t B, double level,
                             Rng& rng);

/// Penalty chosen from one simulated response (may run cross-validation).
using RhoProvider = std::function<double(const Vector& y, Rng& rng)>;

/// Empirical law of c'(b_rho - beta) over simulated responses of one design.
struct OracleLaw {
  std::vector<double> errors;     // c'(b_rho - beta), one per response
  std::vector<double> estimates;  // c'b_rho, one per response
  double level = 0.9;
  double q_low = 0.0;   // quantile at (1 - level)/2
  double q_high = 0.0;  // quantile at (1 + level)/2

  ConfidenceInterval interval_at(double estimate) const;
};

OracleLaw make_oracle_law(std::vector<double> errors, std::vector<double> estimates,
                          double level);

/// Draws N2 responses Y = X beta + eps, picks rho per response through
/// `rho_provider`, and records the contrast errors.
OracleLaw oracle_law(const Matrix& X, const Vector& beta, const Sampler& noise,
                     const RhoProvider& rho_provider, const Vector& c, std::size_t N2,
                     double level, Rng& rng);

/// Oracle interval around the first simulated response's estimate.
ConfidenceInterval ci_oracle(const Matrix& X, const Vector& beta, const Sampler& noise,
                             const RhoProvider& rho_provider, const Vector& c, std::size_t N2,
                             double level, Rng& rng);

}  // namespace ridgeboot
