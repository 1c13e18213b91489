#include "ridgeboot/tuning.hpp"

#include "ridgeboot/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace ridgeboot {

PenaltyPair penalty_pair(double r_hat) {
  if (!std::isfinite(r_hat) || r_hat <= 0.0) throw InputError("base penalty must be positive");
  return {5.0 * r_hat, 0.1 * r_hat};
}

double exponent_to_penalty(std::size_t n, double exponent) {
  if (n == 0) throw InputError("sample size must be positive");
  if (!std::isfinite(exponent) || exponent <= 0.0) throw InputError("exponent must be positive");
  return std::pow(static_cast<double>(n), 1.0 - exponent);
}

std::vector<double> make_cv_grid(std::size_t n, const CvGridSpec& spec) {
  if (n == 0) throw InputError("sample size must be positive");
  if (spec.size == 0) throw InputError("grid size must be positive");
  if (!(spec.min_factor > 0.0) || !(spec.max_factor >= spec.min_factor) ||
      !std::isfinite(spec.max_factor)) {
    throw InputError("grid bounds must satisfy 0 < min <= max");
  }
  const double lo = std::log(spec.min_factor * static_cast<double>(n));
  const double hi = std::log(spec.max_factor * static_cast<double>(n));
  std::vector<double> grid(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    const double t = spec.size == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(spec.size - 1);
    grid[i] = std::exp(lo + t * (hi - lo));
  }
  return grid;
}

CrossValidator::CrossValidator(const Matrix& X, std::size_t folds, Rng& rng) : n_(X.rows()) {
  if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
  const auto n = static_cast<std::size_t>(X.rows());
  if (n < folds) throw InputError("cross-validation would leave a fold with zero rows");

  permutation_.resize(n);
  std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(permutation_[i - 1], permutation_[rng.index(i)]);

  const std::size_t base = n / folds;
  folds_.resize(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t begin = f * base;
    const std::size_t end = f + 1 == folds ? n : begin + base;
    Fold& fold = folds_[f];
    for (std::size_t k = 0; k < n; ++k) {
      const auto row = static_cast<Eigen::Index>(permutation_[k]);
      (k >= begin && k < end ? fold.hold : fold.train).push_back(row);
    }
    const Matrix train = X(fold.train, Eigen::all);
    const SpectralRidge model(train);
    fold.train_u_t = model.U().transpose();
    fold.train_s = model.singular_values();
    fold.hold_times_v = X(fold.hold, Eigen::all) * model.V();
  }
}

std::vector<double> CrossValidator::scores(const Vector& y, std::span<const double> grid) const {
  if (y.size() != n_) throw InputError("response length does not match the design");
  if (grid.empty()) throw InputError("penalty grid is empty");
  for (double r : grid) {
    if (!std::isfinite(r) || r <= 0.0) throw InputError("penalty grid values must be positive");
  }
  std::vector<double> out(grid.size(), 0.0);
  for (const Fold& fold : folds_) {
    const Vector projected = fold.train_u_t * y(fold.train);
    const Vector y_hold = y(fold.hold);
    const auto n_hold = static_cast<double>(fold.hold.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Vector filtered =
          (fold.train_s.array() / (fold.train_s.array().square() + grid[g])) * projected.array();
      out[g] += (y_hold - fold.hold_times_v * filtered).squaredNorm() / n_hold;
    }
  }
  for (double& s : out) s /= static_cast<double>(folds_.size());
  return out;
}

PenaltyPlan CrossValidator::select(const Vector& y, std::span<const double> grid) const {
  PenaltyPlan plan;
  plan.grid.assign(grid.begin(), grid.end());
  plan.cv_scores = scores(y, grid);
  std::size_t best = plan.grid.size();
  for (std::size_t g = 0; g < plan.grid.size(); ++g) {
    const double s = plan.cv_scores[g];
    if (!std::isfinite(s)) continue;
    if (best == plan.grid.size() || s < plan.cv_scores[best] ||
        (s == plan.cv_scores[best] && plan.grid[g] < plan.grid[best])) {
      best = g;
    }
  }
  if (best == plan.grid.size()) throw DegenerateDataError("every cross-validation score is nonfinite");
  plan.r_hat = plan.grid[best];
  const PenaltyPair pair = penalty_pair(plan.r_hat);
  plan.pilot_rho = pair.pilot_rho;
  plan.inference_rho = pair.inference_rho;
  return plan;
}

PenaltyPlan cv_select(const Dataset& data, std::span<const double> grid, std::size_t folds,
                      Rng& rng) {
  data.validate();
  return CrossValidator(data.X, folds, rng).select(data.Y, grid);
}

}  // namespace ridgeboot
