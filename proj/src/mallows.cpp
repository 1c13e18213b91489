#include "ridgeboot/mallows.hpp"

#include "ridgeboot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace ridgeboot {

namespace {

void require_usable(std::span<const double> values, const char* what) {
  if (values.empty()) throw InputError(std::string(what) + " is empty");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + " has nonfinite entries");
  }
}

}  // namespace

EmpiricalDistribution EmpiricalDistribution::from_samples(std::vector<double> samples) {
  require_usable(samples, "sample");
  std::sort(samples.begin(), samples.end());
  return EmpiricalDistribution(std::move(samples), false);
}

double EmpiricalDistribution::mean() const {
  double s = 0.0;
  for (double a : atoms_) s += a;
  return s / static_cast<double>(atoms_.size());
}

double EmpiricalDistribution::second_moment() const {
  double s = 0.0;
  for (double a : atoms_) s += a * a;
  return s / static_cast<double>(atoms_.size());
}

EmpiricalDistribution center_residuals(std::span<const double> residuals) {
  require_usable(residuals, "residuals");
  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(residuals.size());
  std::vector<double> atoms(residuals.size());
  std::transform(residuals.begin(), residuals.end(), atoms.begin(),
                 [mean](double r) { return r - mean; });
  std::sort(atoms.begin(), atoms.end());
  return EmpiricalDistribution(std::move(atoms), true);
}

namespace detail {

double d2_equal_count(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw InputError("equal-count d2 needs equal sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double d2_merged_grid(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw InputError("d2 needs nonempty distributions");
  // Atom i of x covers [i*k, (i+1)*k) and atom j of y covers [j*m, (j+1)*m)
  // in units of 1/(m k).
  const std::uint64_t m = x.size();
  const std::uint64_t k = y.size();
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint64_t pos = 0;
  double acc = 0.0;
  while (i < m && j < k) {
    const std::uint64_t end_x = (i + 1) * k;
    const std::uint64_t end_y = (j + 1) * m;
    const std::uint64_t end = std::min(end_x, end_y);
    const double d = x[i] - y[j];
    acc += static_cast<double>(end - pos) * d * d;
    pos = end;
    if (end == end_x) ++i;
    if (end == end_y) ++j;
  }
  return std::sqrt(acc / static_cast<double>(m * k));
}

}  // namespace detail

double d2_empirical(const EmpiricalDistribution& F, const EmpiricalDistribution& G) {
  if (F.size() == G.size()) return detail::d2_equal_count(F.atoms(), G.atoms());
  return detail::d2_merged_grid(F.atoms(), G.atoms());
}

EmpiricalDistribution sample_reference(const Sampler& sampler, std::size_t m_ref, Rng& rng) {
  if (m_ref == 0) throw InputError("reference sample size must be positive");
  std::vector<double> draws(m_ref);
  for (auto& d : draws) d = sampler(rng);
  return EmpiricalDistribution::from_samples(std::move(draws));
}

double d2_to_reference(const EmpiricalDistribution& F, const Sampler& sampler, std::size_t m_ref,
                       Rng& rng) {
  return d2_empirical(F, sample_reference(sampler, m_ref, rng));
}

}  // namespace ridgeboot
