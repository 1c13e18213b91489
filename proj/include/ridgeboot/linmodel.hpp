#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace ridgeboot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Design, response and (in simulation mode) the generating parameters.
struct Dataset {
  Matrix X;
  Vector Y;
  std::optional<Vector> beta_true;
  std::optional<double> sigma_true;

  static Dataset observed(Matrix X, Vector Y);
  static Dataset simulated(Matrix X, Vector Y, Vector beta, double sigma);

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  bool is_simulated() const { return beta_true.has_value(); }

  /// Throws InputError when shapes, finiteness or the paired optionals are off.
  void validate() const;
};

struct RidgeFit {
  double rho = 0.0;
  Vector coefficients;
  Vector residuals;
  Vector fitted;
};

struct ContrastDiagnostics {
  double variance = 0.0;  // v_rho(X; c)
  double bias_sq = 0.0;   // (c' delta(X))^2
  double ratio = 0.0;     // bias_sq / variance, zero when variance is zero
};

/// Thin SVD of a design, X = U diag(s) V'. Every ridge quantity for any
/// penalty is a diagonal reweighting in this basis, so one factorization per
/// design serves the whole penalty grid.
///
/// Singular values below max(n, p) * eps * s_max are dropped; `rank()` is the
/// count kept. Penalty zero is allowed only when rank() == p (full column rank).
class SpectralRidge {
 public:
  explicit SpectralRidge(const Matrix& X);

  Eigen::Index n() const { return n_; }
  Eigen::Index p() const { return p_; }
  Eigen::Index rank() const { return s_.size(); }
  bool full_column_rank() const { return rank() == p_; }

  const Matrix& U() const { return U_; }
  const Vector& singular_values() const { return s_; }
  const Matrix& V() const { return V_; }

  /// Solves (X'X + rho I) b = X'y.
  Vector coefficients(const Vector& y, double rho) const;
  RidgeFit fit(const Vector& y, double rho) const;

  /// Row vector c'(X'X + rho I)^{-1} X', returned as a length-n column.
  Vector contrast_weights(const Vector& c, double rho) const;

  /// delta(X) = [I - (X'X + rho I)^{-1} X'X] beta.
  Vector bias_vector(const Vector& beta, double rho) const;

  double contrast_variance(const Vector& c, double rho, double sigma_sq) const;
  double contrast_bias_sq(const Vector& c, const Vector& beta, double rho) const;
  ContrastDiagnostics diagnostics(const Vector& c, const Vector& beta, double rho,
                                  double sigma_sq) const;

  /// Exact conditional MSPE (1/n) E||X(b_hat - beta)||^2 of the ridge
  /// estimator at penalty `varrho`, split as squared bias plus variance.
  double mspe(const Vector& beta, double varrho, double sigma_sq) const;

  /// Diagonal of the hat matrix. Requires full column rank.
  Vector leverage() const;

  /// True when c has no component in the row space of X, which makes
  /// c'(X'X + rho I)^{-1} X' vanish for every rho.
  bool annihilates(const Vector& c) const;

 private:
  void check_penalty(double rho) const;

  Eigen::Index n_ = 0;
  Eigen::Index p_ = 0;
  Matrix U_;
  Vector s_;
  Matrix V_;
};

RidgeFit ridge_fit(const Dataset& data, double rho);
RidgeFit ols_fit(const Dataset& data);

/// Scores this close to the maximum count as tied for the argmax.
inline constexpr double kLeverageTieTolerance = 1e-12;

struct LeverageScores {
  Vector scores;
  Eigen::Index argmax = 0;  // smallest index among ties
};
LeverageScores leverage_scores(const Matrix& X);

double contrast_variance(const Matrix& X, const Vector& c, double rho, double sigma_sq);
double contrast_bias_sq(const Matrix& X, const Vector& c, const Vector& beta, double rho);
Vector bias_vector(const Matrix& X, const Vector& beta, double rho);
ContrastDiagnostics contrast_diagnostics(const Matrix& X, const Vector& c, const Vector& beta,
                                         double rho, double sigma_sq);

/// Exact conditional MSPE of ridge at raw penalty `varrho`:
///   (1/n)||X(E[b_varrho|X] - beta)||^2 + (sigma^2/n) sum_i (l_i/(l_i + varrho/n))^2,
/// l_i the eigenvalues of X'X/n.
double mspe_exact(const Matrix& X, const Vector& beta, double varrho, double sigma_sq);

/// Pilot exponent for a sample-eigenvalue decay nu: 2nu/3 below 1/2,
/// nu/(nu+1) above; both give 1/3 at nu = 1/2.
double theta_rule(double nu);

}  // namespace ridgeboot
