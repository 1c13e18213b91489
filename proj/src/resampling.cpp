#include "ridgeboot/resampling.hpp"

#include "ridgeboot/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace ridgeboot {

std::string_view to_string(CiMethod m) {
  switch (m) {
    case CiMethod::ridge_rb: return "ridge_rb";
    case CiMethod::normal: return "normal";
    case CiMethod::ols_rb: return "ols_rb";
    case CiMethod::oracle: return "oracle";
  }
  return "unknown";
}

CiMethod parse_ci_method(std::string_view text) {
  for (CiMethod m : {CiMethod::ridge_rb, CiMethod::normal, CiMethod::ols_rb, CiMethod::oracle}) {
    if (text == to_string(m)) return m;
  }
  throw InputError("unknown interval method '" + std::string(text) + "'");
}

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0, 1)");
}

void check_replicates(std::size_t B) {
  if (B == 0) throw InputError("number of bootstrap replicates must be positive");
}

}  // namespace

std::vector<double> plug_in_draws(const Vector& weights, const EmpiricalDistribution& residuals,
                                  std::size_t B, std::uint64_t seed) {
  check_replicates(B);
  const auto atoms = residuals.atoms();
  const std::size_t m = atoms.size();
  const Eigen::Index n = weights.size();
  std::vector<double> z(B);
  for (std::size_t j = 0; j < B; ++j) {
    Rng rng(seed_split(seed, {j}));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += weights(i) * atoms[rng.index(m)];
    z[j] = acc;
  }
  return z;
}

BootstrapDraws rb_contrast_draws(const SpectralRidge& model, const Vector& y, const Vector& c,
                                 double rho, double pilot_rho, std::size_t B, Rng& rng) {
  check_replicates(B);
  if (model.annihilates(c)) {
    throw DegenerateContrastError("contrast has zero variance: c is orthogonal to the row space");
  }
  const Vector weights = model.contrast_weights(c, rho);
  const RidgeFit pilot = model.fit(y, pilot_rho);
  const EmpiricalDistribution residuals = center_residuals(
      std::span<const double>(pilot.residuals.data(), static_cast<std::size_t>(pilot.residuals.size())));
  BootstrapDraws out;
  out.values = plug_in_draws(weights, residuals, B, rng());
  out.B = B;
  out.contrast = c;
  out.rho = rho;
  out.pilot_rho = pilot_rho;
  return out;
}

BootstrapDraws rb_contrast_draws(const Dataset& data, const Vector& c, double rho,
                                 double pilot_rho, std::size_t B, Rng& rng) {
  data.validate();
  return rb_contrast_draws(SpectralRidge(data.X), data.Y, c, rho, pilot_rho, B, rng);
}

double quantile(std::span<const double> values, double alpha) {
  if (values.empty()) throw InputError("quantile of an empty sequence");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  const auto B = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(alpha * B));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  return sorted[rank - 1];
}

ConfidenceInterval interval_from_draws(CiMethod method, double estimate,
                                       std::span<const double> draws, double level) {
  check_level(level);
  ConfidenceInterval ci;
  ci.method = method;
  ci.level = level;
  ci.estimate = estimate;
  ci.lower = estimate - quantile(draws, 0.5 * (1.0 + level));
  ci.upper = estimate - quantile(draws, 0.5 * (1.0 - level));
  return ci;
}

ConfidenceInterval ci_ridge_rb(const SpectralRidge& model, const Vector& y, const Vector& c,
                               double rho, double pilot_rho, std::size_t B, double level,
                               Rng& rng) {
  check_level(level);
  const BootstrapDraws draws = rb_contrast_draws(model, y, c, rho, pilot_rho, B, rng);
  const double estimate = c.dot(model.coefficients(y, rho));
  return interval_from_draws(CiMethod::ridge_rb, estimate, draws.values, level);
}

ConfidenceInterval ci_ridge_rb(const Dataset& data, const Vector& c, double rho,
                               double pilot_rho, std::size_t B, double level, Rng& rng) {
  data.validate();
  return ci_ridge_rb(SpectralRidge(data.X), data.Y, c, rho, pilot_rho, B, level, rng);
}

ConfidenceInterval ci_normal(const SpectralRidge& model, const Vector& y, const Vector& c,
                             double rho, double level) {
  check_level(level);
  if (model.p() >= model.n()) {
    throw UnestimableVarianceError("OLS noise estimate needs p <= n - 1");
  }
  if (!model.full_column_rank()) {
    throw SingularSystemError("OLS noise estimate needs a full-column-rank design");
  }
  const RidgeFit ols = model.fit(y, 0.0);
  const double sigma_sq =
      ols.residuals.squaredNorm() / static_cast<double>(model.n() - model.p());
  const double tau = std::sqrt(model.contrast_variance(c, rho, sigma_sq));
  const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + level));
  ConfidenceInterval ci;
  ci.method = CiMethod::normal;
  ci.level = level;
  ci.estimate = c.dot(model.coefficients(y, rho));
  ci.lower = ci.estimate - z * tau;
  ci.upper = ci.estimate + z * tau;
  return ci;
}

ConfidenceInterval ci_normal(const Dataset& data, const Vector& c, double rho, double level) {
  data.validate();
  return ci_normal(SpectralRidge(data.X), data.Y, c, rho, level);
}

ConfidenceInterval ci_ols_rb(const SpectralRidge& model, const Vector& y, const Vector& c,
                             std::size_t B, double level, Rng& rng) {
  check_level(level);
  if (model.p() > model.n() || !model.full_column_rank()) {
    throw SingularSystemError("least-squares bootstrap needs a full-column-rank design with p <= n");
  }
  const BootstrapDraws draws = rb_contrast_draws(model, y, c, 0.0, 0.0, B, rng);
  const double estimate = c.dot(model.coefficients(y, 0.0));
  return interval_from_draws(CiMethod::ols_rb, estimate, draws.values, level);
}

ConfidenceInterval ci_ols_rb(const Dataset& data, const Vector& c, std::size_t B, double level,
                             Rng& rng) {
  data.validate();
  return ci_ols_rb(SpectralRidge(data.X), data.Y, c, B, level, rng);
}

ConfidenceInterval OracleLaw::interval_at(double estimate) const {
  ConfidenceInterval ci;
  ci.method = CiMethod::oracle;
  ci.level = level;
  ci.estimate = estimate;
  ci.lower = estimate - q_high;
  ci.upper = estimate - q_low;
  return ci;
}

OracleLaw make_oracle_law(std::vector<double> errors, std::vector<double> estimates,
                          double level) {
  check_level(level);
  if (errors.empty()) throw InputError("oracle law needs at least one realization");
  if (errors.size() != estimates.size()) throw InputError("errors and estimates differ in length");
  OracleLaw law;
  law.level = level;
  law.q_low = quantile(errors, 0.5 * (1.0 - level));
  law.q_high = quantile(errors, 0.5 * (1.0 + level));
  law.errors = std::move(errors);
  law.estimates = std::move(estimates);
  return law;
}

OracleLaw oracle_law(const Matrix& X, const Vector& beta, const Sampler& noise,
                     const RhoProvider& rho_provider, const Vector& c, std::size_t N2,
                     double level, Rng& rng) {
  if (N2 == 0) throw InputError("oracle needs at least one simulated response");
  check_level(level);
  const SpectralRidge model(X);
  if (beta.size() != X.cols()) throw InputError("beta length must match the design");
  const Vector mean_response = X * beta;
  const double target = c.dot(beta);
  const std::uint64_t master = rng();
  std::vector<double> errors(N2);
  std::vector<double> estimates(N2);
  for (std::size_t r = 0; r < N2; ++r) {
    Rng draw(seed_split(master, {r, 0}));
    Vector y(X.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = mean_response(i) + noise(draw);
    Rng tune(seed_split(master, {r, 1}));
    const double rho = rho_provider(y, tune);
    estimates[r] = c.dot(model.coefficients(y, rho));
    errors[r] = estimates[r] - target;
  }
  return make_oracle_law(std::move(errors), std::move(estimates), level);
}

ConfidenceInterval ci_oracle(const Matrix& X, const Vector& beta, const Sampler& noise,
                             const RhoProvider& rho_provider, const Vector& c, std::size_t N2,
                             double level, Rng& rng) {
  const OracleLaw law = oracle_law(X, beta, noise, rho_provider, c, N2, level, rng);
  return law.interval_at(law.estimates.front());
}

}  // namespace ridgeboot
