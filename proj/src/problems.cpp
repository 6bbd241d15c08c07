#include "qdopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qdopt/error.hpp"

namespace qdopt {

namespace {

double root4(double x) { return std::sqrt(x * x * x * x + 3.0); }
double root4_d(double x) { return 2.0 * x * x * x / root4(x); }
double cbrt2(double x) { return std::cbrt(x * x + 2.0); }
double cbrt2_d(double x) {
  const double c = cbrt2(x);
  return 2.0 * x / (3.0 * c * c);
}
double ratio(double x) { return x * x / std::sqrt(x * x + 1.0); }
double ratio_d(double x) {
  const double s = x * x + 1.0;
  return x * (x * x + 2.0) / (s * std::sqrt(s));
}
double cos2(double x) {
  const double c = std::cos(x);
  return c * c;
}
double sin2(double x) {
  const double s = std::sin(x);
  return s * s;
}

}  // namespace

ScalarFamily::ScalarFamily(int family) : family_(family) {
  if (family < 1 || family > 10) throw Error(ErrorCode::InvalidArgument, "family index must be in 1..10");
}

double ScalarFamily::value_at(double x) const {
  switch (family_) {
    case 1: return 0.2 * root4(x) + 0.7 * cos2(x);
    case 2: return 2.0 * std::sin(x) - 0.1 * cbrt2(x);
    case 3: return 0.3 * ratio(x);
    case 4: return -0.1 * root4(x) - std::sin(x);
    case 5: return -0.2 * ratio(x) + 2.0 * sin2(x);
    case 6: return -0.1 * root4(x) - 0.1 * ratio(x);
    case 7: return -std::sin(x) - 1.0;
    case 8: return x * x + 0.3 * cos2(x);
    case 9: return 2.0 * sin2(x) + 0.2 * cbrt2(x);
    default: return -0.1 * cbrt2(x);
  }
}

double ScalarFamily::derivative_at(double x) const {
  const double s2x = std::sin(2.0 * x);
  switch (family_) {
    case 1: return 0.2 * root4_d(x) - 0.7 * s2x;
    case 2: return 2.0 * std::cos(x) - 0.1 * cbrt2_d(x);
    case 3: return 0.3 * ratio_d(x);
    case 4: return -0.1 * root4_d(x) - std::cos(x);
    case 5: return -0.2 * ratio_d(x) + 2.0 * s2x;
    case 6: return -0.1 * root4_d(x) - 0.1 * ratio_d(x);
    case 7: return -std::cos(x);
    case 8: return 2.0 * x - 0.3 * s2x;
    case 9: return 2.0 * s2x + 0.2 * cbrt2_d(x);
    default: return -0.1 * cbrt2_d(x);
  }
}

QuadraticCost::QuadraticCost(Eigen::MatrixXd a, Eigen::VectorXd b, double c)
    : a_(std::move(a)), b_(std::move(b)), c_(c) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) throw Error(ErrorCode::DimensionMismatch, "quadratic cost");
}

double QuadraticCost::value(std::span<const double> x) const {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), b_.size());
  return 0.5 * v.dot(a_ * v) - b_.dot(v) + c_;
}

void QuadraticCost::gradient(std::span<const double> x, std::span<double> out) const {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), b_.size());
  Eigen::Map<Eigen::VectorXd> g(out.data(), b_.size());
  g = a_ * v - b_;
}

double ProblemSuite::average_value(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& f : agents) total += f->value(x);
  return total / static_cast<double>(agents.size());
}

void ProblemSuite::average_gradient(std::span<const double> x, std::span<double> out) const {
  std::vector<double> g(dim);
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& f : agents) {
    f->gradient(x, g);
    for (std::size_t c = 0; c < dim; ++c) out[c] += g[c];
  }
  for (std::size_t c = 0; c < dim; ++c) out[c] /= static_cast<double>(agents.size());
}

ProblemSuite paper_suite(std::size_t n) {
  if (n == 0 || n % 10 != 0) throw Error(ErrorCode::IndivisibleCount, "agent count must be a positive multiple of 10");
  ProblemSuite suite;
  suite.name = "paper-suite";
  suite.dim = 1;
  const std::size_t block = n / 10;
  std::vector<std::shared_ptr<const CostFunction>> families;
  for (int f = 1; f <= 10; ++f) families.push_back(std::make_shared<ScalarFamily>(f));
  for (std::size_t a = 0; a < n; ++a) suite.agents.push_back(families[a / block]);
  return suite;
}

namespace {

void finish_quadratic_suite(ProblemSuite& suite, const Eigen::MatrixXd& hessian_sum, const Eigen::VectorXd& linear_sum) {
  const double n = static_cast<double>(suite.agents.size());
  Eigen::MatrixXd h = hessian_sum / n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigensolverFailure, "quadratic suite Hessian");
  double lf = 0.0;
  for (const auto& f : suite.agents) {
    const auto& q = static_cast<const QuadraticCost&>(*f);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> local(q.hessian(), Eigen::EigenvaluesOnly);
    lf = std::max(lf, local.eigenvalues().cwiseAbs().maxCoeff());
  }
  suite.smoothness = lf;
  suite.analytic = true;
  const double nu = eig.eigenvalues().minCoeff();
  if (nu > 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    suite.pl_constant = nu;
    Eigen::VectorXd x = h.ldlt().solve(linear_sum / n);
    suite.x_star_hint = x;
    suite.f_star = suite.average_value(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
}

}  // namespace

ProblemSuite least_squares_suite(std::size_t n, std::size_t m, double ell2, std::uint64_t seed) {
  if (n == 0 || m == 0) throw Error(ErrorCode::InvalidArgument, "least-squares suite needs n, m >= 1");
  if (!(ell2 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ell2 must be nonnegative");
  ProblemSuite suite;
  suite.name = "least-squares";
  suite.dim = m;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto md = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd hessian_sum = Eigen::MatrixXd::Zero(md, md);
  Eigen::VectorXd linear_sum = Eigen::VectorXd::Zero(md);
  const double reg = ell2 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd u(md);
    for (Eigen::Index c = 0; c < md; ++c) u(c) = normal(rng);
    const double z = normal(rng);
    // (u^T x - z)^2 + reg |x|^2 = 0.5 x^T A x - b^T x + c
    Eigen::MatrixXd a = 2.0 * (u * u.transpose() + reg * Eigen::MatrixXd::Identity(md, md));
    Eigen::VectorXd b = 2.0 * z * u;
    hessian_sum += a;
    linear_sum += b;
    suite.agents.push_back(std::make_shared<QuadraticCost>(std::move(a), std::move(b), z * z));
  }
  finish_quadratic_suite(suite, hessian_sum, linear_sum);
  return suite;
}

ProblemSuite scalar_quadratic_suite(std::span<const double> curvatures, std::span<const double> centers) {
  if (curvatures.size() != centers.size() || curvatures.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "curvatures and centers must have equal nonzero length");
  }
  ProblemSuite suite;
  suite.name = "quadratic";
  suite.dim = 1;
  Eigen::MatrixXd hessian_sum = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd linear_sum = Eigen::VectorXd::Zero(1);
  for (std::size_t i = 0; i < curvatures.size(); ++i) {
    const double a = curvatures[i];
    const double c = centers[i];
    hessian_sum(0, 0) += a;
    linear_sum(0) += a * c;
    suite.agents.push_back(std::make_shared<QuadraticCost>(Eigen::MatrixXd::Constant(1, 1, a),
                                                           Eigen::VectorXd::Constant(1, a * c), 0.5 * a * c * c));
  }
  finish_quadratic_suite(suite, hessian_sum, linear_sum);
  return suite;
}

ProblemSuite random_quadratic_suite(std::size_t n, std::uint64_t seed, double curvature_lo, double curvature_hi,
                                    double center_range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> curv(curvature_lo, curvature_hi);
  std::uniform_real_distribution<double> center(-center_range, center_range);
  std::vector<double> a(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = curv(rng);
    c[i] = center(rng);
  }
  return scalar_quadratic_suite(a, c);
}

namespace {

struct Probe {
  const ProblemSuite& suite;
  double operator()(double x) const { return suite.average_value(std::span<const double>(&x, 1)); }
};

// Golden-section search for a minimum on [a, b].
std::pair<double, double> golden_section(const Probe& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

OptimumEstimate global_optimum_oracle(const ProblemSuite& suite, Box interval, std::size_t grid_points) {
  if (suite.dim != 1) {
    if (suite.analytic && suite.f_star && suite.x_star_hint) return {*suite.f_star, *suite.x_star_hint};
    throw Error(ErrorCode::UnsupportedDimension, "grid oracle supports only one-dimensional problems");
  }
  if (grid_points < 3 || !(interval.hi > interval.lo)) throw Error(ErrorCode::InvalidArgument, "oracle grid");
  const Probe f{suite};
  const double step = (interval.hi - interval.lo) / static_cast<double>(grid_points - 1);
  std::vector<double> values(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) values[i] = f(interval.lo + step * static_cast<double>(i));

  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const bool left = i == 0 || values[i] <= values[i - 1];
    const bool right = i + 1 == grid_points || values[i] <= values[i + 1];
    if (left && right) minima.push_back(i);
  }
  std::stable_sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  if (minima.size() > 5) minima.resize(5);

  double best_x = interval.lo + step * static_cast<double>(minima.front());
  double best_f = values[minima.front()];
  for (std::size_t idx : minima) {
    const double a = interval.lo + step * static_cast<double>(idx == 0 ? 0 : idx - 1);
    const double b = interval.lo + step * static_cast<double>(std::min(idx + 1, grid_points - 1));
    auto [x, fx] = golden_section(f, a, b);
    if (fx < best_f || (fx == best_f && x < best_x)) {
      best_f = fx;
      best_x = x;
    }
  }
  return {best_f, Eigen::VectorXd::Constant(1, best_x)};
}

double estimate_smoothness(const ProblemSuite& suite, Box box, std::size_t samples, std::uint64_t seed) {
  const std::size_t m = suite.dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> point(box.lo, box.hi);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> decade(0.0, 4.0);
  std::vector<double> x(m), y(m), gx(m), gy(m);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    // Separations are log-uniform so both local curvature and global variation are probed.
    const double spread = (box.hi - box.lo) * std::pow(10.0, -decade(rng));
    double dist2 = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      x[c] = point(rng);
      y[c] = x[c] + spread * unit(rng);
      dist2 += (x[c] - y[c]) * (x[c] - y[c]);
    }
    if (dist2 == 0.0) continue;
    for (const auto& f : suite.agents) {
      f->gradient(x, gx);
      f->gradient(y, gy);
      double diff2 = 0.0;
      for (std::size_t c = 0; c < m; ++c) diff2 += (gx[c] - gy[c]) * (gx[c] - gy[c]);
      best = std::max(best, std::sqrt(diff2 / dist2));
    }
  }
  return 1.2 * best;
}

double estimate_pl_constant(const ProblemSuite& suite, double f_star, Box box, std::size_t samples,
                            std::uint64_t seed) {
  const std::size_t m = suite.dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> point(box.lo, box.hi);
  std::vector<double> x(m), g(m);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t c = 0; c < m; ++c) x[c] = point(rng);
    const double gap = suite.average_value(x) - f_star;
    if (gap < 1e-12) continue;
    suite.average_gradient(x, g);
    double norm2 = 0.0;
    for (double v : g) norm2 += v * v;
    best = std::min(best, norm2 / (2.0 * gap));
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::InvalidArgument, "no sample above the optimum");
  return 0.8 * best;
}

void complete_suite(ProblemSuite& suite, Box box, std::size_t samples, std::uint64_t seed) {
  if (!suite.f_star) {
    auto opt = global_optimum_oracle(suite);
    suite.f_star = opt.f_star;
    suite.x_star_hint = opt.x_star;
  }
  if (!suite.smoothness) suite.smoothness = estimate_smoothness(suite, box, samples, seed);
  if (!suite.pl_constant) suite.pl_constant = estimate_pl_constant(suite, *suite.f_star, box, samples, seed + 1);
}

}  // namespace qdopt
