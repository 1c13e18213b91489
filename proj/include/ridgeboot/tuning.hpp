#pragma once

#include "ridgeboot/linmodel.hpp"
#include "ridgeboot/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ridgeboot {

struct PenaltyPlan {
  double r_hat = 0.0;
  double pilot_rho = 0.0;      // 5 * r_hat
  double inference_rho = 0.0;  // 0.1 * r_hat
  std::vector<double> grid;
  std::vector<double> cv_scores;  // mean held-out squared error per grid value
};

struct PenaltyPair {
  double pilot_rho = 0.0;
  double inference_rho = 0.0;
};

/// Pilot and inference penalties (5 r, 0.1 r).
PenaltyPair penalty_pair(double r_hat);

/// n * n^(-exponent): the raw penalty whose per-observation scale is n^(-exponent).
double exponent_to_penalty(std::size_t n, double exponent);

/// Log-spaced grid bounds, expressed as multiples of n.
struct CvGridSpec {
  double min_factor = 1e-4;
  double max_factor = 1e2;
  std::size_t size = 30;
};

std::vector<double> make_cv_grid(std::size_t n, const CvGridSpec& spec = {});

/// K-fold cross-validation for ridge with fold factorizations cached, so many
/// responses on one design share the SVD work. Folds are contiguous blocks of a
/// seeded Fisher-Yates permutation; the last fold takes the remainder.
class CrossValidator {
 public:
  CrossValidator(const Matrix& X, std::size_t folds, Rng& rng);

  std::size_t folds() const { return folds_.size(); }
  const std::vector<std::size_t>& permutation() const { return permutation_; }

  /// Mean over folds of ||y_hold - X_hold b_r(train)||^2 / n_hold per grid value.
  std::vector<double> scores(const Vector& y, std::span<const double> grid) const;

  /// Minimizing grid value (smallest penalty on ties) and the derived pair.
  PenaltyPlan select(const Vector& y, std::span<const double> grid) const;

 private:
  struct Fold {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> hold;
    Matrix train_u_t;      // U' of the training block, k x n_train
    Vector train_s;
    Matrix hold_times_v;   // X_hold V, n_hold x k
  };
  Eigen::Index n_ = 0;
  std::vector<std::size_t> permutation_;
  std::vector<Fold> folds_;
};

PenaltyPlan cv_select(const Dataset& data, std::span<const double> grid, std::size_t folds,
                      Rng& rng);

}  // namespace ridgeboot
