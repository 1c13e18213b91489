#include "ridgeboot/designs.hpp"

#include "ridgeboot/errors.hpp"

#include <boost/random/chi_squared_distribution.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ridgeboot {

Matrix CovarianceModel::covariance() const {
  return eigenbasis * eigenvalues.asDiagonal() * eigenbasis.transpose();
}

Matrix CovarianceModel::sqrt_covariance() const {
  return eigenbasis * eigenvalues.cwiseSqrt().asDiagonal() * eigenbasis.transpose();
}

CovarianceModel make_covariance(Eigen::Index p, double eta, Rng& rng) {
  if (p < 1) throw InputError("covariance dimension must be positive");
  if (!std::isfinite(eta) || eta < 0.0) throw InputError("decay exponent must be >= 0");
  CovarianceModel cov;
  cov.p = p;
  cov.eta = eta;
  cov.eigenvalues.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    cov.eigenvalues(j) = std::pow(static_cast<double>(j + 1), -eta);
  }

  Matrix G(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) G(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix& R = qr.matrixQR();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  cov.eigenbasis = std::move(Q);
  return cov;
}

Matrix sample_design(Eigen::Index n, const CovarianceModel& cov, Rng& rng) {
  if (n < 1) throw InputError("row count must be positive");
  Matrix Z(n, cov.p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < cov.p; ++j) Z(i, j) = rng.normal();
  }
  return Z * cov.sqrt_covariance();
}

void NoiseSpec::validate() const {
  if (!std::isfinite(sigma) || sigma < 0.0) throw InputError("noise sigma must be >= 0");
  if (const auto* t = std::get_if<ScaledStudentT>(&family)) {
    if (!std::isfinite(t->dof) || t->dof <= 4.0) {
      throw MomentConditionError("t noise needs dof > 4 for a finite fourth moment");
    }
  }
  if (const auto* c = std::get_if<CustomAtoms>(&family)) {
    if (c->atoms.size() < 2) throw InputError("custom noise needs at least two atoms");
    double lo = c->atoms.front();
    double hi = lo;
    for (double a : c->atoms) {
      if (!std::isfinite(a)) throw InputError("custom noise atoms must be finite");
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    if (lo == hi) throw InputError("custom noise atoms must not all be equal");
  }
}

namespace {

struct StandardizedAtoms {
  std::vector<double> values;
};

StandardizedAtoms standardize(const std::vector<double>& atoms, double sigma) {
  double mean = 0.0;
  for (double a : atoms) mean += a;
  mean /= static_cast<double>(atoms.size());
  double var = 0.0;
  for (double a : atoms) var += (a - mean) * (a - mean);
  var /= static_cast<double>(atoms.size());
  StandardizedAtoms out;
  out.values.reserve(atoms.size());
  const double scale = sigma / std::sqrt(var);
  for (double a : atoms) out.values.push_back((a - mean) * scale);
  return out;
}

}  // namespace

double NoiseSpec::sample(Rng& rng) const {
  struct Visitor {
    Rng& rng;
    double sigma;
    double operator()(const ScaledStudentT& t) const {
      // t = N / sqrt(chi2_dof / dof), rescaled from variance dof/(dof-2) to sigma^2.
      const double z = rng.normal();
      boost::random::chi_squared_distribution<double> chi2(t.dof);
      const double draw = z / std::sqrt(chi2(rng) / t.dof);
      return draw * sigma / std::sqrt(t.dof / (t.dof - 2.0));
    }
    double operator()(const NormalNoise&) const { return sigma * rng.normal(); }
    double operator()(const TwoPointNoise&) const {
      return (rng() >> 63) ? sigma : -sigma;
    }
    double operator()(const CustomAtoms& c) const {
      return standardize(c.atoms, sigma).values[rng.index(c.atoms.size())];
    }
  };
  return std::visit(Visitor{rng, sigma}, family);
}

Sampler NoiseSpec::sampler() const {
  validate();
  if (const auto* c = std::get_if<CustomAtoms>(&family)) {
    auto values = standardize(c->atoms, sigma).values;
    return [values = std::move(values)](Rng& rng) { return values[rng.index(values.size())]; };
  }
  return [spec = *this](Rng& rng) { return spec.sample(rng); };
}

std::string NoiseSpec::family_text() const {
  struct Visitor {
    std::string operator()(const ScaledStudentT& t) const {
      std::ostringstream os;
      os.precision(17);
      os << "t:" << t.dof;
      return os.str();
    }
    std::string operator()(const NormalNoise&) const { return "normal"; }
    std::string operator()(const TwoPointNoise&) const { return "two_point"; }
    std::string operator()(const CustomAtoms& c) const {
      std::ostringstream os;
      os.precision(17);
      os << "custom:";
      for (std::size_t i = 0; i < c.atoms.size(); ++i) os << (i ? ";" : "") << c.atoms[i];
      return os.str();
    }
  };
  return std::visit(Visitor{}, family);
}

NoiseFamily NoiseSpec::parse_family(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw InputError("bad number '" + s + "' in noise family");
    return v;
  };
  if (text == "normal") return NormalNoise{};
  if (text == "two_point") return TwoPointNoise{};
  if (text.rfind("t:", 0) == 0) return ScaledStudentT{number(text.substr(2))};
  if (text.rfind("custom:", 0) == 0) {
    CustomAtoms c;
    std::stringstream ss(text.substr(7));
    std::string item;
    while (std::getline(ss, item, ';')) c.atoms.push_back(number(item));
    return c;
  }
  throw InputError("unknown noise family '" + text + "' (expected t:<dof>, normal, two_point, custom:a;b;...)");
}

Vector sample_noise(const NoiseSpec& spec, Eigen::Index n, Rng& rng) {
  if (n < 1) throw InputError("noise length must be positive");
  const Sampler draw = spec.sampler();
  Vector eps(n);
  for (Eigen::Index i = 0; i < n; ++i) eps(i) = draw(rng);
  return eps;
}

Vector make_beta(Eigen::Index p, BetaStyle style, const Vector& custom) {
  if (p < 1) throw InputError("coefficient dimension must be positive");
  if (style == BetaStyle::custom) {
    if (custom.size() != p || !custom.allFinite()) {
      throw InputError("custom beta must be a finite length-p vector");
    }
    return custom;
  }
  return Vector::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
}

Dataset generate_dataset(Eigen::Index n, const CovarianceModel& cov, const Vector& beta,
                         const NoiseSpec& spec, Rng& rng) {
  if (beta.size() != cov.p) throw InputError("beta length must match covariance dimension");
  Matrix X = sample_design(n, cov, rng);
  Vector eps = sample_noise(spec, n, rng);
  Vector Y = X * beta + eps;
  return Dataset::simulated(std::move(X), std::move(Y), beta, spec.sigma);
}

double estimate_decay(std::span<const double> eigenvalues) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] >= 1e-12)) continue;
    lx.push_back(std::log(static_cast<double>(i + 1)));
    ly.push_back(std::log(eigenvalues[i]));
  }
  if (lx.size() < 3) throw InsufficientDataError("decay fit needs at least 3 usable eigenvalues");
  const std::size_t keep = std::max<std::size_t>(3, (lx.size() + 1) / 2);
  lx.resize(keep);
  ly.resize(keep);
  const double k = static_cast<double>(keep);
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return -sxy / sxx;
}

std::vector<double> sample_eigenvalues(const Matrix& X) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::BDCSVD<Matrix> svd(X);
  const Vector& s = svd.singularValues();
  std::vector<double> out;
  const Eigen::Index count = std::min(n, p);
  out.reserve(count);
  for (Eigen::Index i = 0; i < count; ++i) out.push_back(s(i) * s(i) / static_cast<double>(n));
  return out;
}

}  // namespace ridgeboot
