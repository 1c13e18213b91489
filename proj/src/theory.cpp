#include "ridgeboot/theory.hpp"

#include "ridgeboot/errors.hpp"
#include "ridgeboot/parallel.hpp"
#include "ridgeboot/resampling.hpp"
#include "ridgeboot/tuning.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ridgeboot {

namespace {

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double squared(double x) { return x * x; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

std::size_t columns_for(std::size_t n, double p_ratio) {
  const auto p = static_cast<std::size_t>(std::llround(p_ratio * static_cast<double>(n)));
  return std::max<std::size_t>(1, p);
}

void require_simulated(const Dataset& data) {
  data.validate();
  if (!data.is_simulated()) throw PreconditionError("check needs a simulation-mode dataset");
  if (!(*data.sigma_true > 0.0)) throw PreconditionError("check needs a positive noise scale");
}

void require_matching_noise(const Dataset& data, const NoiseSpec& noise) {
  noise.validate();
  if (std::abs(noise.sigma - *data.sigma_true) > 1e-12 * std::max(1.0, noise.sigma)) {
    throw InputError("noise spec sigma does not match the dataset's sigma_true");
  }
}

std::string format_param(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

CheckReport make_report(std::string name, double lhs, double rhs, double tolerance,
                        const CheckConfig& config) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.holds = lhs <= rhs + tolerance;
  r.config = config;
  return r;
}

bool RateEstimate::strictly_decreasing() const {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) return false;
  }
  return !values.empty();
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope fit needs >= 2 paired points");
  const double k = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InputError("log-log fit needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

CheckReport check_theorem1_with(const Dataset& data, const Vector& c, double rho,
                                const EmpiricalDistribution& f_hat, const NoiseSpec& noise,
                                const SampleSizes& sizes, std::uint64_t seed) {
  require_simulated(data);
  require_matching_noise(data, noise);
  if (sizes.m_psi == 0 || sizes.m_phi == 0 || sizes.m_ref == 0) {
    throw InputError("sample sizes must be positive");
  }
  const SpectralRidge model(data.X);
  if (model.annihilates(c)) throw DegenerateContrastError("contrast has zero variance");
  const double sigma_sq = squared(noise.sigma);
  const Vector weights = model.contrast_weights(c, rho);
  const double variance = sigma_sq * weights.squaredNorm();
  const double bias = c.dot(model.bias_vector(*data.beta_true, rho));
  const double scale = 1.0 / std::sqrt(variance);

  const Sampler draw = noise.sampler();
  Rng psi_rng(seed_split(seed, {0}));
  std::vector<double> psi(sizes.m_psi);
  for (double& value : psi) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) acc += weights(i) * draw(psi_rng);
    value = (acc - bias) * scale;
  }
  std::vector<double> phi = plug_in_draws(weights, f_hat, sizes.m_phi, seed_split(seed, {1}));
  for (double& value : phi) value *= scale;

  const double lhs = squared(d2_empirical(EmpiricalDistribution::from_samples(std::move(psi)),
                                          EmpiricalDistribution::from_samples(std::move(phi))));
  Rng ref_rng(seed_split(seed, {2}));
  const double d2_noise = d2_to_reference(f_hat, draw, sizes.m_ref, ref_rng);
  const double rhs = squared(d2_noise) / sigma_sq + squared(bias) / variance;

  CheckConfig cfg;
  cfg.n = static_cast<std::size_t>(data.n());
  cfg.p = static_cast<std::size_t>(data.p());
  cfg.seed = seed;
  cfg.m_psi = sizes.m_psi;
  cfg.m_phi = sizes.m_phi;
  cfg.m_ref = sizes.m_ref;
  return make_report("theorem1", lhs, rhs, kBoundSlack * rhs, cfg);
}

CheckReport check_theorem1(const Dataset& data, const Vector& c, double rho, double pilot_rho,
                           const NoiseSpec& noise, const SampleSizes& sizes, std::uint64_t seed) {
  require_simulated(data);
  const RidgeFit pilot = SpectralRidge(data.X).fit(data.Y, pilot_rho);
  return check_theorem1_with(data, c, rho, center_residuals(as_span(pilot.residuals)), noise,
                             sizes, seed);
}

CheckReport check_mspe_link(const Dataset& data, ResidualSource source, double pilot_rho,
                            std::size_t reps, std::size_t m_ref, const NoiseSpec& noise,
                            std::uint64_t seed) {
  require_simulated(data);
  require_matching_noise(data, noise);
  if (reps == 0 || m_ref == 0) throw InputError("reps and m_ref must be positive");
  const SpectralRidge model(data.X);
  const Vector& beta = *data.beta_true;
  const double sigma_sq = squared(noise.sigma);
  const auto n = static_cast<double>(data.n());

  double mspe = 0.0;
  double rho = 0.0;
  std::string name;
  switch (source) {
    case ResidualSource::ridge:
      rho = pilot_rho;
      mspe = model.mspe(beta, rho, sigma_sq);
      name = "mspe_link_ridge";
      break;
    case ResidualSource::ols:
      if (data.p() > data.n() || !model.full_column_rank()) {
        throw SingularSystemError("least-squares residuals need a full-column-rank design");
      }
      mspe = model.mspe(beta, 0.0, sigma_sq);
      name = "mspe_link_ols";
      break;
    case ResidualSource::perfect:
      name = "mspe_link_perfect";
      break;
  }

  const Sampler draw = noise.sampler();
  Rng ref_rng(seed_split(seed, {0}));
  const EmpiricalDistribution reference = sample_reference(draw, m_ref, ref_rng);
  const Vector mean_response = data.X * beta;

  double lhs = 0.0;
  double empirical_term = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(seed_split(seed, {1, r}));
    Vector eps(data.n());
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = draw(rng);
    Vector residuals;
    if (source == ResidualSource::perfect) {
      residuals = eps;
    } else {
      residuals = model.fit(mean_response + eps, rho).residuals;
    }
    lhs += squared(d2_empirical(center_residuals(as_span(residuals)), reference));
    empirical_term += squared(d2_empirical(
        EmpiricalDistribution::from_samples(std::vector<double>(eps.data(), eps.data() + eps.size())),
        reference));
  }
  lhs /= static_cast<double>(reps);
  empirical_term /= static_cast<double>(reps);
  const double rhs = 2.0 * mspe + 2.0 * empirical_term + 2.0 * sigma_sq / n;

  CheckConfig cfg;
  cfg.n = static_cast<std::size_t>(data.n());
  cfg.p = static_cast<std::size_t>(data.p());
  cfg.seed = seed;
  cfg.m_ref = m_ref;
  cfg.reps = reps;
  return make_report(std::move(name), lhs, rhs, kBoundSlack * rhs, cfg);
}

RateEstimate rate_mspe(double nu, std::span<const std::size_t> n_grid, std::size_t trials,
                       std::uint64_t seed, const RateOptions& options) {
  if (n_grid.size() < 2 || trials == 0) throw InputError("rate fit needs >= 2 sizes and trials");
  const double theta = theta_rule(nu);
  std::vector<double> values(n_grid.size() * trials);
  parallel_for(values.size(), options.threads, [&](std::size_t job) {
    const std::size_t k = job / trials;
    const std::size_t t = job % trials;
    const std::size_t n = n_grid[k];
    const std::size_t p = columns_for(n, options.p_ratio);
    Rng rng(seed_split(seed, {n, t}));
    const CovarianceModel cov = make_covariance(static_cast<Eigen::Index>(p), nu, rng);
    const Matrix X = sample_design(static_cast<Eigen::Index>(n), cov, rng);
    const Vector beta = make_beta(static_cast<Eigen::Index>(p));
    values[job] = mspe_exact(X, beta, exponent_to_penalty(n, theta), squared(options.sigma));
  });
  RateEstimate est;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    est.n_grid.push_back(static_cast<double>(n_grid[k]));
    double mean = 0.0;
    for (std::size_t t = 0; t < trials; ++t) mean += values[k * trials + t];
    est.values.push_back(mean / static_cast<double>(trials));
  }
  est.fitted_slope = loglog_slope(est.n_grid, est.values);
  est.target_slope = -theta;
  est.band_lo = est.target_slope - kRateBand;
  est.band_hi = est.target_slope + kRateBand;
  return est;
}

RateEstimate rate_d2_empirical(const NoiseSpec& noise, std::span<const std::size_t> n_grid,
                               std::size_t trials, std::size_t m_ref, std::uint64_t seed,
                               unsigned threads) {
  if (n_grid.size() < 2 || trials == 0) throw InputError("rate fit needs >= 2 sizes and trials");
  for (std::size_t n : n_grid) {
    if (n < 2) throw InputError("rate fit needs n >= 2 so that log n > 0");
  }
  const Sampler draw = noise.sampler();
  std::vector<double> values(n_grid.size() * trials);
  parallel_for(values.size(), threads, [&](std::size_t job) {
    const std::size_t k = job / trials;
    const std::size_t t = job % trials;
    Rng rng(seed_split(seed, {n_grid[k], t}));
    std::vector<double> sample(n_grid[k]);
    for (double& x : sample) x = draw(rng);
    const double d = d2_to_reference(EmpiricalDistribution::from_samples(std::move(sample)), draw,
                                     m_ref, rng);
    values[job] = d * d;
  });
  RateEstimate est;
  std::vector<double> normalized;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    const auto n = static_cast<double>(n_grid[k]);
    est.n_grid.push_back(n);
    double mean = 0.0;
    for (std::size_t t = 0; t < trials; ++t) mean += values[k * trials + t];
    mean /= static_cast<double>(trials);
    est.values.push_back(mean);
    normalized.push_back(mean / std::log(n));
  }
  est.fitted_slope = loglog_slope(est.n_grid, normalized);
  est.target_slope = -0.5;
  est.band_lo = est.target_slope - kRateBand;
  est.band_hi = est.target_slope + kRateBand;
  return est;
}

namespace {

void require_event_window(double eta, double gamma) {
  if (!(gamma > 0.0) || !(gamma < std::min(eta, 1.0))) {
    throw PreconditionError("design events need 0 < gamma < min(eta, 1)");
  }
}

}  // namespace

std::vector<DesignEventSample> sample_design_events(double eta, double gamma, std::size_t n,
                                                    std::size_t trials, std::uint64_t seed,
                                                    double p_ratio, unsigned threads) {
  require_event_window(eta, gamma);
  if (trials == 0 || n < 3) throw InputError("design events need n >= 3 and trials >= 1");
  const std::size_t p = columns_for(n, p_ratio);
  if (p + 2 > n) throw PreconditionError("design events need p <= n - 2");
  const double rho = exponent_to_penalty(n, gamma);
  std::vector<DesignEventSample> out(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(seed_split(seed, {n, t}));
    const CovarianceModel cov = make_covariance(static_cast<Eigen::Index>(p), eta, rng);
    const Matrix X = sample_design(static_cast<Eigen::Index>(n), cov, rng);
    const Vector beta = make_beta(static_cast<Eigen::Index>(p));
    const SpectralRidge model(X);
    const Vector row_bias = X * model.bias_vector(beta, rho);
    // v(X; X_i) / sigma^2 = || e_i' U diag(s^2/(s^2+rho)) U' ||^2
    const Vector keep = model.singular_values().array().square() /
                        (model.singular_values().array().square() + rho);
    const Vector row_variance = (model.U() * keep.asDiagonal()).rowwise().squaredNorm();
    out[t].max_bias_sq = row_bias.array().square().maxCoeff();
    out[t].max_inv_variance = row_variance.cwiseInverse().maxCoeff();
  });
  return out;
}

double calibrate_variance_constant(double eta, double gamma, std::size_t n, std::size_t trials,
                                   std::uint64_t seed, double p_ratio, unsigned threads) {
  const auto samples = sample_design_events(eta, gamma, n, trials, seed, p_ratio, threads);
  const double scale = std::pow(static_cast<double>(n), 1.0 - gamma / eta);
  double kappa = 0.0;
  for (const auto& s : samples) kappa = std::max(kappa, s.max_inv_variance / scale);
  return kappa;
}

std::vector<CheckReport> check_design_events(double eta, double gamma, double theta,
                                             std::size_t n, std::size_t trials,
                                             std::uint64_t seed,
                                             const DesignEventOptions& options) {
  const auto samples =
      sample_design_events(eta, gamma, n, trials, seed, options.p_ratio, options.threads);
  const auto nd = static_cast<double>(n);
  const double beta_sq = 1.0;  // ||1/||1|| ||^2
  const double bias_bound =
      5.0 * beta_sq * (options.tau + 1.0) * std::log(nd + 2.0) * std::pow(nd, -gamma);
  CheckConfig cfg;
  cfg.n = n;
  cfg.p = columns_for(n, options.p_ratio);
  cfg.eta = eta;
  cfg.gamma = gamma;
  cfg.theta = theta;
  cfg.seed = seed;
  cfg.reps = trials;

  std::size_t bias_hits = 0;
  for (const auto& s : samples) bias_hits += s.max_bias_sq <= bias_bound;
  std::vector<CheckReport> out;
  out.push_back(make_report("bias_event_frequency", options.min_frequency,
                            static_cast<double>(bias_hits) / static_cast<double>(trials), 0.0,
                            cfg));
  if (!std::isnan(options.kappa2)) {
    const double bound = options.kappa2 * std::pow(nd, 1.0 - gamma / eta);
    std::size_t hits = 0;
    for (const auto& s : samples) hits += s.max_inv_variance <= bound;
    out.push_back(make_report("variance_event_frequency", options.min_frequency,
                              static_cast<double>(hits) / static_cast<double>(trials), 0.0, cfg));
  }
  return out;
}

Matrix wishart_square_closed_form(const Matrix& sigma, std::size_t n) {
  if (sigma.rows() != sigma.cols()) throw InputError("covariance must be square");
  if (n == 0) throw InputError("sample size must be positive");
  const auto nd = static_cast<double>(n);
  return (1.0 + 1.0 / nd) * sigma * sigma + (sigma.trace() / nd) * sigma;
}

CheckReport wishart_square(const Matrix& sigma, std::size_t n, std::size_t mc_samples,
                           std::uint64_t seed) {
  if (mc_samples == 0) throw InputError("need at least one Monte Carlo sample");
  if (!sigma.isApprox(sigma.transpose())) throw InputError("covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    throw InputError("covariance must be positive semidefinite");
  }
  const Matrix root = eig.eigenvectors() *
                      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                      eig.eigenvectors().transpose();
  const Eigen::Index p = sigma.rows();
  const auto nd = static_cast<double>(n);
  Rng rng(seed);
  Matrix mean = Matrix::Zero(p, p);
  Matrix Z(static_cast<Eigen::Index>(n), p);
  for (std::size_t s = 0; s < mc_samples; ++s) {
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < Z.rows(); ++i) Z(i, j) = rng.normal();
    }
    const Matrix X = Z * root;
    const Matrix sigma_hat = X.transpose() * X / nd;
    mean += sigma_hat * sigma_hat;
  }
  mean /= static_cast<double>(mc_samples);
  const Matrix closed = wishart_square_closed_form(sigma, n);
  CheckConfig cfg;
  cfg.n = n;
  cfg.p = static_cast<std::size_t>(p);
  cfg.seed = seed;
  cfg.reps = mc_samples;
  return make_report("wishart_square", (mean - closed).norm() / closed.norm(), 0.02, 0.0, cfg);
}

SignedSvd signed_svd(const Matrix& Z) {
  if (Z.rows() < Z.cols() || Z.cols() < 1) throw InputError("signed SVD needs n >= p >= 1");
  if (!Z.allFinite()) throw InputError("matrix has nonfinite entries");
  Eigen::JacobiSVD<Matrix> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double tol = static_cast<double>(Z.rows()) * std::numeric_limits<double>::epsilon() * s(0);
  if (!(s(s.size() - 1) > tol)) throw SingularSystemError("signed SVD needs a full-rank matrix");
  SignedSvd out{svd.matrixU(), s, svd.matrixV()};
  for (Eigen::Index j = 0; j < out.G.cols(); ++j) {
    if (std::signbit(out.G(0, j))) {
      out.G.col(j) = -out.G.col(j);
      out.H.col(j) = -out.H.col(j);
    }
    if (out.G(0, j) == 0.0) out.G(0, j) = 0.0;  // normalizes -0 to +0
  }
  return out;
}

CheckReport signed_svd_row_law(std::size_t n, std::size_t p, std::size_t samples,
                               std::uint64_t seed) {
  if (samples == 0 || p == 0 || n < p) throw InputError("row-law check needs n >= p >= 1");
  Rng rng(seed);
  Matrix Z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  double mean = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
      for (Eigen::Index i = 0; i < Z.rows(); ++i) Z(i, j) = rng.normal();
    }
    mean += signed_svd(Z).H.row(0).squaredNorm();
  }
  mean /= static_cast<double>(samples);
  const double target = static_cast<double>(p) / static_cast<double>(n);
  CheckConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.seed = seed;
  cfg.reps = samples;
  return make_report("signed_svd_row_mean", std::abs(mean - target), 0.01, 0.0, cfg);
}

std::vector<CheckReport> lm_tail_check(const Matrix& A, std::span<const double> t_grid,
                                       std::size_t trials, std::uint64_t seed) {
  if (A.rows() != A.cols() || A.rows() < 1) throw InputError("quadratic form needs a square matrix");
  if (!A.isApprox(A.transpose(), 1e-12) && !(A.norm() == 0.0)) {
    throw InputError("quadratic form needs a symmetric matrix");
  }
  if (trials == 0) throw InputError("need at least one trial");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw InputError("tail levels must be positive");
  }
  const double trace = A.trace();
  const double frob = A.norm();
  const double op = A.rows() ? Eigen::SelfAdjointEigenSolver<Matrix>(A, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .cwiseAbs()
                                   .maxCoeff()
                             : 0.0;
  std::vector<std::size_t> upper(t_grid.size(), 0);
  std::vector<std::size_t> lower(t_grid.size(), 0);
  Rng rng(seed);
  Vector z(A.rows());
  for (std::size_t s = 0; s < trials; ++s) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    const double q = z.dot(A * z);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      const double t = t_grid[k];
      upper[k] += q > trace + 2.0 * frob * std::sqrt(t) + 2.0 * op * t;
      lower[k] += q < trace - 2.0 * frob * std::sqrt(t);
    }
  }
  std::vector<CheckReport> out;
  CheckConfig cfg;
  cfg.n = static_cast<std::size_t>(A.rows());
  cfg.seed = seed;
  cfg.reps = trials;
  const auto T = static_cast<double>(trials);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double bound = std::exp(-t_grid[k]);
    const double slack = 3.0 * std::sqrt(bound * (1.0 - bound) / T);
    const std::string suffix = "_t=" + format_param(t_grid[k]);
    out.push_back(make_report("lm_upper_tail" + suffix, static_cast<double>(upper[k]) / T,
                              bound + slack, 0.0, cfg));
    out.push_back(make_report("lm_lower_tail" + suffix, static_cast<double>(lower[k]) / T,
                              bound + slack, 0.0, cfg));
  }
  return out;
}

RateEstimate check_theorem4(double eta, double gamma, double theta,
                            std::span<const std::size_t> n_grid, std::size_t design_trials,
                            std::size_t noise_reps, std::uint64_t seed,
                            const Theorem4Options& options) {
  if (!(gamma > eta / (1.0 + eta)) || !(gamma < std::min(eta, 1.0))) {
    throw PreconditionError("simultaneous consistency needs eta/(1+eta) < gamma < min(eta, 1)");
  }
  if (n_grid.empty() || design_trials == 0 || noise_reps == 0) {
    throw InputError("need a nonempty size grid, designs and noise draws");
  }
  if (std::isnan(theta)) theta = theta_rule(eta);
  options.noise.validate();
  const double sigma = options.noise.sigma;
  const Sampler draw = options.noise.sampler();
  const auto m = static_cast<Eigen::Index>(noise_reps);

  std::vector<double> maxima(n_grid.size() * design_trials);
  parallel_for(maxima.size(), options.threads, [&](std::size_t job) {
    const std::size_t k = job / design_trials;
    const std::size_t t = job % design_trials;
    const std::size_t n = n_grid[k];
    const std::size_t p = columns_for(n, options.p_ratio);
    const auto ni = static_cast<Eigen::Index>(n);
    Rng rng(seed_split(seed, {n, t}));
    const CovarianceModel cov = make_covariance(static_cast<Eigen::Index>(p), eta, rng);
    const Matrix X = sample_design(ni, cov, rng);
    const Vector beta = make_beta(static_cast<Eigen::Index>(p));
    Vector y = X * beta;
    for (Eigen::Index i = 0; i < ni; ++i) y(i) += draw(rng);

    const SpectralRidge model(X);
    const double rho = exponent_to_penalty(n, gamma);
    const double pilot = exponent_to_penalty(n, theta);
    const EmpiricalDistribution f_hat =
        center_residuals(as_span(model.fit(y, pilot).residuals));
    const auto atoms = f_hat.atoms();

    // Column i holds the weights of contrast X_i: A = U diag(s^2/(s^2+rho)) U'.
    const Vector keep = model.singular_values().array().square() /
                        (model.singular_values().array().square() + rho);
    const Matrix A = model.U() * keep.asDiagonal() * model.U().transpose();
    const Vector row_bias = X * model.bias_vector(beta, rho);

    Matrix noise(m, ni);
    Matrix resampled(m, ni);
    for (Eigen::Index j = 0; j < ni; ++j) {
      for (Eigen::Index r = 0; r < m; ++r) noise(r, j) = draw(rng);
    }
    for (Eigen::Index j = 0; j < ni; ++j) {
      for (Eigen::Index r = 0; r < m; ++r) resampled(r, j) = atoms[rng.index(atoms.size())];
    }
    const Matrix psi = noise * A;
    const Matrix phi = resampled * A;

    double worst = 0.0;
    std::vector<double> a(noise_reps);
    std::vector<double> b(noise_reps);
    for (Eigen::Index i = 0; i < ni; ++i) {
      const double scale = 1.0 / (sigma * A.col(i).norm());
      for (Eigen::Index r = 0; r < m; ++r) {
        a[r] = (psi(r, i) - row_bias(i)) * scale;
        b[r] = phi(r, i) * scale;
      }
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      worst = std::max(worst, squared(detail::d2_equal_count(a, b)));
    }
    maxima[job] = worst;
  });

  RateEstimate est;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    est.n_grid.push_back(static_cast<double>(n_grid[k]));
    est.values.push_back(median(std::vector<double>(
        maxima.begin() + static_cast<std::ptrdiff_t>(k * design_trials),
        maxima.begin() + static_cast<std::ptrdiff_t>((k + 1) * design_trials))));
  }
  est.fitted_slope = est.n_grid.size() >= 2 ? loglog_slope(est.n_grid, est.values) : 0.0;
  est.target_slope = 0.0;
  est.band_lo = -std::numeric_limits<double>::infinity();
  est.band_hi = 0.0;
  return est;
}

}  // namespace ridgeboot
