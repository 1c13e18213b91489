#pragma once

#include "ridgeboot/linmodel.hpp"
#include "ridgeboot/mallows.hpp"
#include "ridgeboot/rng.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ridgeboot {

/// Sigma = Q diag(lambda) Q' with lambda_j = j^(-eta).
struct CovarianceModel {
  Eigen::Index p = 0;
  double eta = 0.0;
  Vector eigenvalues;
  Matrix eigenbasis;

  Matrix covariance() const;
  Matrix sqrt_covariance() const;
};

/// Eigenbasis is the Q factor of a seeded p x p standard Gaussian matrix, with
/// columns flipped so that R has a nonnegative diagonal.
CovarianceModel make_covariance(Eigen::Index p, double eta, Rng& rng);

/// n rows drawn i.i.d. from N(0, Sigma), as Z * Sigma^(1/2).
Matrix sample_design(Eigen::Index n, const CovarianceModel& cov, Rng& rng);

struct ScaledStudentT {
  double dof = 5.0;
};
struct NormalNoise {};
/// +sigma or -sigma with probability 1/2 each.
struct TwoPointNoise {};
/// Uniform draw from the atoms after they are standardized to mean 0, SD sigma.
struct CustomAtoms {
  std::vector<double> atoms;
};

using NoiseFamily = std::variant<ScaledStudentT, NormalNoise, TwoPointNoise, CustomAtoms>;

struct NoiseSpec {
  NoiseFamily family = ScaledStudentT{};
  double sigma = 0.1;

  /// Throws MomentConditionError for t with dof <= 4, InputError otherwise.
  void validate() const;
  double sample(Rng& rng) const;
  Sampler sampler() const;

  /// "t:5", "normal", "two_point", "custom:a;b;c"
  std::string family_text() const;
  static NoiseFamily parse_family(const std::string& text);
};

Vector sample_noise(const NoiseSpec& spec, Eigen::Index n, Rng& rng);

enum class BetaStyle { uniform_unit, custom };

/// uniform_unit gives 1/||1||. The custom style returns `custom` unchanged.
Vector make_beta(Eigen::Index p, BetaStyle style = BetaStyle::uniform_unit,
                 const Vector& custom = Vector());

/// Simulation-mode dataset Y = X beta + eps with X and eps independent.
Dataset generate_dataset(Eigen::Index n, const CovarianceModel& cov, const Vector& beta,
                         const NoiseSpec& spec, Rng& rng);

/// Negative least-squares slope of log(lambda_i) on log(i) over the leading
/// half (at least three) of the eigenvalues at or above 1e-12. The trailing
/// sample eigenvalues sit below the population profile when p/n is not small.
double estimate_decay(std::span<const double> eigenvalues);

/// Eigenvalues of X'X/n in decreasing order, first min(n, p) of them.
std::vector<double> sample_eigenvalues(const Matrix& X);

}  // namespace ridgeboot
