#include "ridgeboot/linmodel.hpp"

#include "ridgeboot/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

namespace ridgeboot {

namespace {

void require_finite(const Matrix& M, const char* what) {
  if (!M.allFinite()) throw InputError(std::string(what) + " has nonfinite entries");
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InputError(std::string(what) + " has nonfinite entries");
}

void require_length(const Vector& v, Eigen::Index len, const char* what) {
  if (v.size() != len) {
    throw InputError(std::string(what) + " has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(len));
  }
}

}  // namespace

Dataset Dataset::observed(Matrix X, Vector Y) {
  Dataset d{std::move(X), std::move(Y), std::nullopt, std::nullopt};
  d.validate();
  return d;
}

Dataset Dataset::simulated(Matrix X, Vector Y, Vector beta, double sigma) {
  Dataset d{std::move(X), std::move(Y), std::move(beta), sigma};
  d.validate();
  return d;
}

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw InputError("design must be at least 1x1");
  require_length(Y, X.rows(), "response");
  require_finite(X, "design");
  require_finite(Y, "response");
  if (beta_true.has_value() != sigma_true.has_value()) {
    throw InputError("beta_true and sigma_true must be given together");
  }
  if (beta_true) {
    require_length(*beta_true, X.cols(), "beta_true");
    require_finite(*beta_true, "beta_true");
    if (!std::isfinite(*sigma_true) || *sigma_true < 0.0) {
      throw InputError("sigma_true must be finite and nonnegative");
    }
  }
}

SpectralRidge::SpectralRidge(const Matrix& X) : n_(X.rows()), p_(X.cols()) {
  if (n_ < 1 || p_ < 1) throw InputError("design must be at least 1x1");
  require_finite(X, "design");

  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double tol = static_cast<double>(std::max(n_, p_)) *
                     std::numeric_limits<double>::epsilon() * (s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  s_ = s.head(r);
  U_ = svd.matrixU().leftCols(r);
  V_ = svd.matrixV().leftCols(r);
}

void SpectralRidge::check_penalty(double rho) const {
  if (!std::isfinite(rho) || rho < 0.0) throw InputError("penalty must be finite and >= 0");
  if (rho == 0.0 && !full_column_rank()) {
    throw SingularSystemError("zero penalty needs a full-column-rank design (rank " +
                              std::to_string(rank()) + " < p = " + std::to_string(p_) + ")");
  }
}

Vector SpectralRidge::coefficients(const Vector& y, double rho) const {
  require_length(y, n_, "response");
  check_penalty(rho);
  const Vector filter = s_.array() / (s_.array().square() + rho);
  return V_ * (filter.asDiagonal() * (U_.transpose() * y));
}

RidgeFit SpectralRidge::fit(const Vector& y, double rho) const {
  RidgeFit f;
  f.rho = rho;
  f.coefficients = coefficients(y, rho);
  const Vector filter = s_.array().square() / (s_.array().square() + rho);
  f.fitted = U_ * (filter.asDiagonal() * (U_.transpose() * y));
  f.residuals = y - f.fitted;
  return f;
}

Vector SpectralRidge::contrast_weights(const Vector& c, double rho) const {
  require_length(c, p_, "contrast");
  check_penalty(rho);
  const Vector filter = s_.array() / (s_.array().square() + rho);
  return U_ * (filter.asDiagonal() * (V_.transpose() * c));
}

Vector SpectralRidge::bias_vector(const Vector& beta, double rho) const {
  require_length(beta, p_, "beta");
  check_penalty(rho);
  const Vector keep = s_.array().square() / (s_.array().square() + rho);
  return beta - V_ * (keep.asDiagonal() * (V_.transpose() * beta));
}

double SpectralRidge::contrast_variance(const Vector& c, double rho, double sigma_sq) const {
  if (!std::isfinite(sigma_sq) || sigma_sq < 0.0) throw InputError("sigma_sq must be >= 0");
  return sigma_sq * contrast_weights(c, rho).squaredNorm();
}

double SpectralRidge::contrast_bias_sq(const Vector& c, const Vector& beta, double rho) const {
  require_length(c, p_, "contrast");
  const double b = c.dot(bias_vector(beta, rho));
  return b * b;
}

ContrastDiagnostics SpectralRidge::diagnostics(const Vector& c, const Vector& beta, double rho,
                                               double sigma_sq) const {
  ContrastDiagnostics d;
  d.variance = contrast_variance(c, rho, sigma_sq);
  d.bias_sq = contrast_bias_sq(c, beta, rho);
  d.ratio = d.variance > 0.0 ? d.bias_sq / d.variance : 0.0;
  return d;
}

double SpectralRidge::mspe(const Vector& beta, double varrho, double sigma_sq) const {
  require_length(beta, p_, "beta");
  check_penalty(varrho);
  if (!std::isfinite(sigma_sq) || sigma_sq < 0.0) throw InputError("sigma_sq must be >= 0");
  const auto s2 = s_.array().square();
  const Vector w = V_.transpose() * beta;
  const double bias =
      (s2 * (varrho / (s2 + varrho)).square() * w.array().square()).sum();
  const double variance = sigma_sq * (s2 / (s2 + varrho)).square().sum();
  return (bias + variance) / static_cast<double>(n_);
}

Vector SpectralRidge::leverage() const {
  if (!full_column_rank() || p_ > n_) {
    throw SingularSystemError("leverage scores need a full-column-rank design");
  }
  return U_.rowwise().squaredNorm();
}

bool SpectralRidge::annihilates(const Vector& c) const {
  require_length(c, p_, "contrast");
  const double scale = c.norm();
  if (scale == 0.0) return true;
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() *
                     std::sqrt(static_cast<double>(p_)) * scale;
  return (V_.transpose() * c).norm() <= tol;
}

RidgeFit ridge_fit(const Dataset& data, double rho) {
  data.validate();
  return SpectralRidge(data.X).fit(data.Y, rho);
}

RidgeFit ols_fit(const Dataset& data) {
  data.validate();
  if (data.p() > data.n()) {
    throw SingularSystemError("least squares needs p <= n (p = " + std::to_string(data.p()) +
                              ", n = " + std::to_string(data.n()) + ")");
  }
  return SpectralRidge(data.X).fit(data.Y, 0.0);
}

LeverageScores leverage_scores(const Matrix& X) {
  LeverageScores out;
  out.scores = SpectralRidge(X).leverage();
  const double top = out.scores.maxCoeff();
  Eigen::Index best = 0;
  while (out.scores(best) < top - kLeverageTieTolerance) ++best;
  out.argmax = best;
  return out;
}

double contrast_variance(const Matrix& X, const Vector& c, double rho, double sigma_sq) {
  return SpectralRidge(X).contrast_variance(c, rho, sigma_sq);
}

double contrast_bias_sq(const Matrix& X, const Vector& c, const Vector& beta, double rho) {
  return SpectralRidge(X).contrast_bias_sq(c, beta, rho);
}

Vector bias_vector(const Matrix& X, const Vector& beta, double rho) {
  return SpectralRidge(X).bias_vector(beta, rho);
}

ContrastDiagnostics contrast_diagnostics(const Matrix& X, const Vector& c, const Vector& beta,
                                         double rho, double sigma_sq) {
  return SpectralRidge(X).diagnostics(c, beta, rho, sigma_sq);
}

double mspe_exact(const Matrix& X, const Vector& beta, double varrho, double sigma_sq) {
  return SpectralRidge(X).mspe(beta, varrho, sigma_sq);
}

double theta_rule(double nu) {
  if (!std::isfinite(nu) || nu <= 0.0) throw InputError("decay exponent must be positive");
  if (nu < 0.5) return 2.0 * nu / 3.0;
  if (nu == 0.5) return 1.0 / 3.0;
  return nu / (nu + 1.0);
}

}  // namespace ridgeboot
