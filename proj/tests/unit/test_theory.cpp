#include "ridgeboot/errors.hpp"
#include "ridgeboot/suites.hpp"
#include "ridgeboot/theory.hpp"
#include "ridgeboot/tuning.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ridgeboot;

namespace {

Dataset small_dataset(Eigen::Index n, Eigen::Index p, double eta, const Vector& beta,
                      const NoiseSpec& noise, std::uint64_t seed) {
  Rng rng(seed);
  const CovarianceModel cov = make_covariance(p, eta, rng);
  return generate_dataset(n, cov, beta, noise, rng);
}

}  // namespace

TEST_CASE("report margin and tolerance") {
  const CheckReport r = make_report("x", 1.0, 0.98, 0.05, CheckConfig{});
  CHECK(r.margin == doctest::Approx(-0.02));
  CHECK(r.holds);
  CHECK_FALSE(make_report("y", 1.0, 0.9, 0.05, CheckConfig{}).holds);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x = {10, 100, 1000, 10000};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.7));
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.7).epsilon(1e-12));
  std::vector<double> scaled;
  for (double v : y) scaled.push_back(v * 123.4);
  CHECK(std::abs(loglog_slope(x, scaled) - loglog_slope(x, y)) < 1e-12);
  CHECK_THROWS_AS(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), InputError);
}

TEST_CASE("consistency bound with the true error law as residual law") {
  const NoiseSpec noise{NormalNoise{}, 1.0};
  const Dataset d = small_dataset(20, 5, 1.0, Vector::Zero(5), noise, 1);
  Rng rng(2);
  const Vector errors = sample_noise(noise, 100000, rng);
  const auto f_hat =
      center_residuals(std::vector<double>(errors.data(), errors.data() + errors.size()));
  const SampleSizes sizes{100000, 100000, 100000};
  const CheckReport r =
      check_theorem1_with(d, d.X.row(0).transpose(), 1.0, f_hat, noise, sizes, 3);
  CHECK(r.lhs < 2e-3);
  CHECK(r.rhs < 2e-3);
}

TEST_CASE("consistency bound on small random configurations") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NoiseSpec noise{ScaledStudentT{5.0}, 0.5};
    const Dataset d = small_dataset(30, 10, 0.8, make_beta(10), noise, seed);
    const CheckReport r = check_theorem1(d, d.X.row(static_cast<Eigen::Index>(seed)).transpose(),
                                         0.5, 5.0, noise, SampleSizes{20000, 20000, 20000}, seed);
    CAPTURE(seed);
    CHECK(r.holds);
    CHECK(r.lhs >= 0.0);
  }
}

TEST_CASE("consistency bound preconditions and reproducibility") {
  const NoiseSpec noise{NormalNoise{}, 1.0};
  const Dataset d = small_dataset(20, 4, 1.0, make_beta(4), noise, 4);
  const SampleSizes sizes{2000, 2000, 2000};
  const Vector c = d.X.row(1).transpose();
  const CheckReport a = check_theorem1(d, c, 1.0, 5.0, noise, sizes, 9);
  const CheckReport b = check_theorem1(d, c, 1.0, 5.0, noise, sizes, 9);
  CHECK(a.lhs == b.lhs);
  CHECK(a.rhs == b.rhs);
  CHECK_THROWS_AS(check_theorem1(Dataset::observed(d.X, d.Y), c, 1.0, 5.0, noise, sizes, 9),
                  PreconditionError);
  CHECK_THROWS_AS(
      check_theorem1(d, c, 1.0, 5.0, NoiseSpec{NormalNoise{}, 2.0}, sizes, 9), InputError);
}

TEST_CASE("prediction-error link for ridge, least squares and the true errors") {
  const NoiseSpec noise{ScaledStudentT{5.0}, 0.1};
  const Dataset d = small_dataset(20, 8, 0.5, make_beta(8), noise, 5);
  for (ResidualSource source : {ResidualSource::ridge, ResidualSource::ols,
                                ResidualSource::perfect}) {
    const CheckReport r = check_mspe_link(d, source, 2.0, 50, 20000, noise, 6);
    CAPTURE(static_cast<int>(source));
    CHECK(r.holds);
  }
}

TEST_CASE("mspe rate on a short grid") {
  const std::vector<std::size_t> grid = {64, 128, 256, 512};
  const RateEstimate r = rate_mspe(1.0, grid, 5, 7);
  CHECK(r.target_slope == doctest::Approx(-0.5));
  CHECK(r.band_lo == doctest::Approx(-0.65));
  CHECK(r.band_hi == doctest::Approx(-0.35));
  CHECK(r.strictly_decreasing());
  CHECK(r.values.size() == 4);
  const RateEstimate again = rate_mspe(1.0, grid, 5, 7);
  CHECK(again.values == r.values);
  CHECK(rate_mspe(0.3, grid, 2, 7).target_slope == doctest::Approx(-0.2));
}

TEST_CASE("empirical-law distance shrinks with n") {
  const std::vector<std::size_t> grid = {100, 1000, 10000};
  const RateEstimate r = rate_d2_empirical(NoiseSpec{NormalNoise{}, 1.0}, grid, 5, 100000, 8);
  CHECK(r.target_slope == -0.5);
  CHECK(r.strictly_decreasing());
  CHECK_THROWS_AS(rate_d2_empirical(NoiseSpec{NormalNoise{}, 1.0}, std::vector<std::size_t>{1, 10},
                                    2, 100, 8),
                  InputError);
}

TEST_CASE("design events") {
  const auto reports = check_design_events(1.0, 0.6, 0.5, 100, 10, 9);
  REQUIRE(!reports.empty());
  CHECK(reports.front().rhs >= 0.0);
  CHECK(reports.front().rhs <= 1.0);
  CHECK_THROWS_AS(check_design_events(1.0, 1.0, 0.5, 100, 10, 9), PreconditionError);
  CHECK_THROWS_AS(check_design_events(0.5, 0.7, 0.5, 100, 10, 9), PreconditionError);
  const double kappa = calibrate_variance_constant(1.0, 0.6, 100, 10, 9);
  CHECK(kappa > 0.0);
  DesignEventOptions options;
  options.kappa2 = kappa;
  const auto both = check_design_events(1.0, 0.6, 0.5, 100, 10, 9, options);
  CHECK(both.size() == reports.size() + 1);
  CHECK(both.back().rhs == 1.0);
}

TEST_CASE("Wishart second moment") {
  CHECK(wishart_square_closed_form(Matrix::Identity(2, 2), 1).isApprox(4.0 * Matrix::Identity(2, 2)));
  Matrix sigma = Matrix::Zero(3, 3);
  sigma.diagonal() << 1.0, 0.5, 1.0 / 3.0;
  CHECK(wishart_square_closed_form(2.0 * sigma, 50)
            .isApprox(4.0 * wishart_square_closed_form(sigma, 50)));
  const CheckReport r = wishart_square(sigma, 50, 10000, 10);
  CHECK(r.holds);
  CHECK(r.lhs <= 0.02);
  CHECK_THROWS_AS(wishart_square(-sigma, 50, 10, 10), InputError);
}

TEST_CASE("signed SVD") {
  Matrix Z = Matrix::Zero(5, 3);
  Z.diagonal() << 3.0, 2.0, 0.5;
  const SignedSvd s = signed_svd(Z);
  CHECK(s.H.isApprox(Matrix::Identity(5, 3)));
  CHECK(s.L.isApprox(Vector(Z.diagonal())));
  CHECK(s.G.isApprox(Matrix::Identity(3, 3)));

  Rng rng(11);
  Matrix R(20, 8);
  for (Eigen::Index j = 0; j < 8; ++j) {
    for (Eigen::Index i = 0; i < 20; ++i) R(i, j) = rng.normal();
  }
  const SignedSvd f = signed_svd(R);
  CHECK((f.H * f.L.asDiagonal() * f.G.transpose() - R).norm() <= 1e-10 * R.norm());
  CHECK((f.H.transpose() * f.H - Matrix::Identity(8, 8)).norm() < 1e-10);
  CHECK((f.G.transpose() * f.G - Matrix::Identity(8, 8)).norm() < 1e-10);
  CHECK(f.G.row(0).minCoeff() >= 0.0);
  for (Eigen::Index k = 1; k < 8; ++k) CHECK(f.L(k) <= f.L(k - 1));

  CHECK_THROWS_AS(signed_svd(Matrix::Zero(4, 2)), SingularSystemError);
  CHECK(signed_svd_row_law(10, 4, 10000, 12).holds);
}

TEST_CASE("quadratic-form tail bounds") {
  const std::vector<double> t = {0.5, 1.0, 2.0, 4.0};
  for (const CheckReport& r : lm_tail_check(Matrix::Zero(3, 3), t, 1000, 13)) {
    CHECK(r.lhs == 0.0);
    CHECK(r.holds);
  }
  Rng rng(14);
  Matrix A(8, 8);
  for (Eigen::Index j = 0; j < 8; ++j) {
    for (Eigen::Index i = 0; i < 8; ++i) A(i, j) = rng.normal();
  }
  const Matrix S = 0.5 * (A + A.transpose());
  for (const CheckReport& r : lm_tail_check(S, t, 20000, 15)) CHECK(r.holds);
  for (const CheckReport& r : lm_tail_check(Matrix::Identity(5, 5), std::vector<double>{1.0},
                                            100000, 16)) {
    CHECK(r.holds);
  }
}

TEST_CASE("simultaneous consistency window and trend") {
  CHECK_THROWS_AS(check_theorem4(1.0, 0.4, NAN, std::vector<std::size_t>{20, 40}, 2, 10, 1),
                  PreconditionError);
  CHECK_THROWS_AS(check_theorem4(1.0, 1.0, NAN, std::vector<std::size_t>{20, 40}, 2, 10, 1),
                  PreconditionError);
  const RateEstimate r =
      check_theorem4(1.0, 0.55, NAN, std::vector<std::size_t>{30, 60}, 3, 200, 17);
  CHECK(r.values.size() == 2);
  for (double v : r.values) CHECK(v > 0.0);
}

TEST_CASE("shipped quick suite config parses") {
  const SuiteConfig c = read_suite_config(std::string(RIDGEBOOT_CONFIG_DIR) + "/suites_quick.cfg");
  CHECK(c.sweep_size == 20);
  CHECK(c.d2_n_grid == std::vector<std::size_t>{100, 1000, 10000});
  CHECK(c.t4_designs == 40);
  CHECK(c.mspe_nus == SuiteConfig{}.mspe_nus);
}
