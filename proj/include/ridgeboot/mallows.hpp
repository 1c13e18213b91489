#pragma once

#include "ridgeboot/rng.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ridgeboot {

/// Uniform-weight distribution on finitely many atoms, kept sorted.
class EmpiricalDistribution {
 public:
  /// Sorts a copy of `samples`. Throws InputError on empty or nonfinite input.
  static EmpiricalDistribution from_samples(std::vector<double> samples);

  std::span<const double> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool centered() const { return centered_; }

  double mean() const;
  double second_moment() const;

 private:
  friend EmpiricalDistribution center_residuals(std::span<const double> residuals);
  EmpiricalDistribution(std::vector<double> sorted_atoms, bool centered)
      : atoms_(std::move(sorted_atoms)), centered_(centered) {}

  std::vector<double> atoms_;
  bool centered_ = false;
};

/// Distribution putting mass 1/n on each residual minus the residual mean.
EmpiricalDistribution center_residuals(std::span<const double> residuals);

/// Exact Mallows-l2 (Wasserstein-2) distance between two uniform empirical
/// laws, via the monotone quantile coupling.
double d2_empirical(const EmpiricalDistribution& F, const EmpiricalDistribution& G);

namespace detail {
/// sqrt((1/m) sum (x_(i) - y_(i))^2); sizes must match.
double d2_equal_count(std::span<const double> x, std::span<const double> y);
/// Integrates the squared quantile difference over the merged grid
/// {i/m} U {j/k}, walking both atom lists in units of 1/(m k).
double d2_merged_grid(std::span<const double> x, std::span<const double> y);
}  // namespace detail

using Sampler = std::function<double(Rng&)>;

/// Empirical law of m_ref draws from `sampler`.
EmpiricalDistribution sample_reference(const Sampler& sampler, std::size_t m_ref, Rng& rng);

/// d2 between F and an m_ref-draw proxy of a continuous reference law.
/// Deterministic given the generator state.
double d2_to_reference(const EmpiricalDistribution& F, const Sampler& sampler, std::size_t m_ref,
                       Rng& rng);

}  // namespace ridgeboot
