#include "ridgeboot/designs.hpp"
#include "ridgeboot/errors.hpp"
#include "ridgeboot/tuning.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace ridgeboot;

namespace {

Dataset gaussian_dataset(Eigen::Index n, Eigen::Index p, const Vector& beta, double sigma,
                         Rng& rng) {
  Matrix X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = rng.normal();
  }
  Vector y = X * beta;
  for (Eigen::Index i = 0; i < n; ++i) y(i) += sigma * rng.normal();
  return Dataset::observed(std::move(X), std::move(y));
}

// Held-out error computed from scratch with a dense solve per fold.
std::vector<double> brute_force_scores(const Dataset& d, const std::vector<std::size_t>& perm,
                                       std::size_t folds, const std::vector<double>& grid) {
  const std::size_t n = static_cast<std::size_t>(d.n());
  const std::size_t block = n / folds;
  std::vector<double> out;
  for (double r : grid) {
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      const std::size_t begin = f * block;
      const std::size_t end = f + 1 == folds ? n : begin + block;
      std::vector<Eigen::Index> train;
      std::vector<Eigen::Index> hold;
      for (std::size_t k = 0; k < n; ++k) {
        const auto row = static_cast<Eigen::Index>(perm[k]);
        (k >= begin && k < end ? hold : train).push_back(row);
      }
      const Matrix Xt = d.X(train, Eigen::all);
      const Vector yt = d.Y(train);
      const Matrix A = Xt.transpose() * Xt + r * Matrix::Identity(d.p(), d.p());
      const Vector b = A.lu().solve(Xt.transpose() * yt);
      const Vector res = d.Y(hold) - d.X(hold, Eigen::all) * b;
      total += res.squaredNorm() / static_cast<double>(hold.size());
    }
    out.push_back(total / static_cast<double>(folds));
  }
  return out;
}

}  // namespace

TEST_CASE("prefactor mapping") {
  const PenaltyPair one = penalty_pair(1.0);
  CHECK(one.pilot_rho == 5.0);
  CHECK(one.inference_rho == doctest::Approx(0.1));
  const PenaltyPair two = penalty_pair(2.0);
  CHECK(two.pilot_rho == 10.0);
  CHECK(two.inference_rho == doctest::Approx(0.2));
  const PenaltyPair small = penalty_pair(0.04);
  CHECK(small.pilot_rho == doctest::Approx(0.2));
  CHECK(small.inference_rho == doctest::Approx(0.004));
  CHECK(penalty_pair(3.0).pilot_rho > two.pilot_rho);
  CHECK(penalty_pair(3.0).inference_rho > two.inference_rho);
  CHECK_THROWS_AS(penalty_pair(0.0), InputError);
}

TEST_CASE("exponent to penalty") {
  CHECK(exponent_to_penalty(100, 1.0) == doctest::Approx(1.0));
  CHECK(exponent_to_penalty(100, 0.5) == doctest::Approx(10.0));
  CHECK(exponent_to_penalty(10000, 2.0) == doctest::Approx(1e-4));
  CHECK(exponent_to_penalty(10000, 0.5) == doctest::Approx(100.0));
}

TEST_CASE("default grid spans 1e-4 n to 1e2 n on a log scale") {
  const auto grid = make_cv_grid(200);
  REQUIRE(grid.size() == 30);
  CHECK(grid.front() == doctest::Approx(0.02));
  CHECK(grid.back() == doctest::Approx(20000.0));
  for (std::size_t k = 2; k < grid.size(); ++k) {
    CHECK(grid[k] / grid[k - 1] == doctest::Approx(grid[1] / grid[0]));
  }
}

TEST_CASE("cross-validation scores match a dense per-fold solve") {
  Rng rng(1);
  const Dataset d = gaussian_dataset(37, 6, Vector::Ones(6), 0.5, rng);
  const std::vector<double> grid = {1e-3, 0.5, 4.0, 50.0};
  Rng cv_rng(2);
  const CrossValidator cv(d.X, 5, cv_rng);
  const auto fast = cv.scores(d.Y, grid);
  const auto slow = brute_force_scores(d, cv.permutation(), 5, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-9));
  }
  const PenaltyPlan plan = cv.select(d.Y, grid);
  const auto best = std::min_element(plan.cv_scores.begin(), plan.cv_scores.end());
  CHECK(plan.r_hat == grid[static_cast<std::size_t>(best - plan.cv_scores.begin())]);
  CHECK(plan.pilot_rho == 5.0 * plan.r_hat);
  CHECK(plan.inference_rho == 0.1 * plan.r_hat);
}

TEST_CASE("fold permutation is a seeded permutation") {
  Rng rng(3);
  const Dataset d = gaussian_dataset(23, 3, Vector::Ones(3), 1.0, rng);
  Rng a(4);
  Rng b(4);
  const CrossValidator ca(d.X, 5, a);
  const CrossValidator cb(d.X, 5, b);
  CHECK(ca.permutation() == cb.permutation());
  auto sorted = ca.permutation();
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) CHECK(sorted[k] == k);
  CHECK(ca.folds() == 5);
  const auto grid = make_cv_grid(23);
  CHECK(ca.scores(d.Y, grid) == cb.scores(d.Y, grid));
}

TEST_CASE("noiseless data selects the smallest penalty") {
  Rng rng(5);
  const Dataset d = gaussian_dataset(60, 8, Vector::Ones(8), 0.0, rng);
  std::vector<double> grid = {1e-9, 1e-3, 1.0, 100.0};
  Rng cv_rng(6);
  CHECK(cv_select(d, grid, 5, cv_rng).r_hat == 1e-9);
}

TEST_CASE("pure noise selects the largest penalty") {
  const std::vector<double> grid = {1e-4, 1e6};
  int large = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Dataset d = gaussian_dataset(200, 50, Vector::Zero(50), 1.0, rng);
    large += cv_select(d, grid, 5, rng).r_hat == 1e6;
  }
  CHECK(large >= 95);
}

TEST_CASE("cross-validation input errors") {
  Rng rng(7);
  const Dataset d = gaussian_dataset(4, 2, Vector::Ones(2), 1.0, rng);
  const std::vector<double> grid = {1.0};
  CHECK_THROWS_AS(cv_select(d, grid, 5, rng), InputError);
  CHECK_THROWS_AS(cv_select(d, grid, 1, rng), InputError);
  CHECK_THROWS_AS(cv_select(d, std::vector<double>{}, 2, rng), InputError);
  const std::vector<double> bad = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS(cv_select(d, bad, 2, rng));
}

TEST_CASE("pilot residual SD on the simulation settings") {
  struct Setting {
    Eigen::Index p;
    double eta;
  };
  for (const Setting s : {Setting{45, 0.5}, Setting{95, 0.5}, Setting{45, 1.0}, Setting{95, 1.0}}) {
    int inside = 0;
    std::vector<double> sds;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed_split(seed, {static_cast<std::uint64_t>(s.p), s.eta > 0.75}));
      const CovarianceModel cov = make_covariance(s.p, s.eta, rng);
      const NoiseSpec noise{ScaledStudentT{5.0}, 0.1};
      const Dataset d = generate_dataset(100, cov, make_beta(s.p), noise, rng);
      const PenaltyPlan plan = cv_select(d, make_cv_grid(100), 5, rng);
      const Vector r = ridge_fit(d, plan.pilot_rho).residuals;
      const double sd = std::sqrt((r.array() - r.mean()).square().mean());
      sds.push_back(sd);
      inside += sd >= 0.08 && sd <= 0.13;
    }
    std::nth_element(sds.begin(), sds.begin() + 50, sds.end());
    CAPTURE(s.p);
    CAPTURE(s.eta);
    MESSAGE("p = " << s.p << ", eta = " << s.eta << ": pilot residual SD in [0.8, 1.3] sigma for "
                   << inside << " of 100 seeds, median " << sds[50]);
    CHECK(sds[50] >= 0.08);
    CHECK(sds[50] <= 0.13);
    WARN(inside >= 90);
  }
}
