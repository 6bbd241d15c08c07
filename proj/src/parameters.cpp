#include "qdopt/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qdopt/error.hpp"

namespace qdopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMuHigh = 1.0 - 1e-12;

double sq(double v) { return v * v; }

void require_problem_constants(double lipschitz, double pl) {
  if (!(lipschitz > 0.0) || !(pl > 0.0) || !std::isfinite(lipschitz) || !std::isfinite(pl)) {
    throw Error(ErrorCode::InvalidArgument, "L_f and nu must be positive and finite");
  }
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

// Smallest mu in (lo, hi] with omega(mu) <= target, assuming omega nonincreasing and omega(hi) <= target.
template <typename F>
double smallest_feasible_mu(F omega, double lo, double hi, double target) {
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (omega(mid) <= target) hi = mid;
    else lo = mid;
  }
  return hi;
}

struct GridAxis {
  double lo;
  double hi;
  std::size_t points;
  double at(std::size_t i) const {
    return points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  double step() const { return points == 1 ? 0.0 : (hi - lo) / static_cast<double>(points - 1); }
};

}  // namespace

std::string describe(const Violation& v) {
  return v.condition + " (lhs = " + fmt(v.lhs) + ", rhs = " + fmt(v.rhs) + ")";
}

PerronResult perron(const Eigen::Matrix3d& phi, double tol, std::size_t max_iter) {
  PerronResult out;
  if ((phi.array() < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "matrix must be nonnegative");
  // Power iteration driven by repeated squaring of the normalized matrix, so the subdominant
  // components decay doubly exponentially; a plain power step with phi finishes each round.
  Eigen::Matrix3d m = phi / phi.maxCoeff();
  Eigen::Vector3d v = Eigen::Vector3d::Ones() / 3.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Eigen::Vector3d next = m * v;
    next = phi * next;
    next /= next.sum();
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = next;
    out.iterations = it;
    if (change <= tol) {
      out.converged = true;
      break;
    }
    m = m * m;
    m /= m.maxCoeff();
  }
  const Eigen::Vector3d image = phi * v;
  const Eigen::Vector3d ratios = image.cwiseQuotient(v);
  out.rho = ratios.maxCoeff();
  out.rho_low = ratios.minCoeff();
  out.zeta = v;
  return out;
}

double matrix_power_bound(const Eigen::Matrix3d& phi, double h, double rho, std::size_t k_max) {
  Eigen::Matrix3d scaled = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d step = phi / rho;
  double worst = 0.0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(scaled);
    worst = std::max(worst, svd.singularValues()(0) / h);
    scaled = step * scaled;
  }
  return worst;
}

double GtCertificate::sigma9(double s0) const { return envelope * envelope * s0 * s0; }

namespace {

// Everything that does not depend on mu or the quantizer level.
GtCertificate gt_core(const GtInputs& in, const LaplacianSpectrum& spec) {
  require_problem_constants(in.lipschitz, in.pl);
  if (!(in.c3_fraction > 0.0 && in.c3_fraction < 1.0)) throw Error(ErrorCode::InvalidArgument, "c3 fraction");
  GtCertificate c;
  c.inputs = in;
  c.rho_l = spec.rho;
  c.rho_min_l = spec.rho_min;
  c.max_degree = spec.max_degree;
  c.beta_max = std::sqrt(2.0) / (2.0 * spec.rho);
  c.sigma.fill(kNaN);
  c.chi.fill(kNaN);
  c.delta_terms.fill(kNaN);
  c.theta.setConstant(kNaN);
  c.phi.setConstant(kNaN);
  c.lmi_slack.setConstant(kNaN);
  c.varrho = c.c1 = c.c2 = c.c3 = c.c4 = c.delta_max = c.sigma1 = kNaN;
  c.iota = c.rho_bar = c.h = kNaN;
  c.envelope = c.vartheta1 = c.vartheta2 = c.omega_x = c.omega_u = c.levels_min = kNaN;

  const double beta = in.beta, delta = in.delta, lf = in.lipschitz, nu = in.pl;
  if (!(beta > 0.0 && beta < c.beta_max)) {
    c.violations.push_back({"beta in (0, sqrt(2)/(2 rho(L)))", beta, c.beta_max});
    return c;
  }
  c.varrho = consensus_contraction(spec, beta);
  const double gap = 1.0 - sq(c.varrho);
  c.c3 = in.c3_fraction * gap;
  c.c4 = 1.0 / (16.0 * sq(lf));
  c.c2 = std::min(1.0 / 6.0, c.c4 * nu) / sq(lf);
  c.c1 = (gap - c.c3) * gap / (1.0 + sq(c.varrho));
  c.delta_terms = {c.c1 * std::sqrt(c.c2) / 4.0, 1.0 / (4.0 * lf), 2.0 / nu, 1.0 / (8.0 + 2.0 * lf),
                   std::sqrt(c.c1) / (8.0 * lf)};
  c.delta_max = *std::min_element(c.delta_terms.begin(), c.delta_terms.end());
  if (!(delta > 0.0 && delta < c.delta_max)) {
    c.violations.push_back({"delta in (0, min{c1 sqrt(c2)/4, 1/(4L), 2/nu, 1/(8+2L), sqrt(c1)/(8L)})", delta,
                            c.delta_max});
    if (!(delta > 0.0) || !(1.0 - 2.0 * delta * lf > 0.0)) return c;
  }

  const double rho = spec.rho;
  c.sigma1 = gap / (2.0 * sq(c.varrho));
  const double inv1 = 1.0 + 1.0 / c.sigma1;
  const double shrink = 1.0 - 2.0 * delta * lf;
  auto& chi = c.chi;
  chi[0] = (1.0 + c.sigma1) * sq(c.varrho);
  chi[1] = 2.0 * sq(delta) * inv1;
  chi[2] = inv1 * 8.0 * sq(lf) * (sq(beta) * sq(rho) + 2.0 * sq(delta) * sq(lf) / shrink);
  chi[3] = (1.0 + c.sigma1) * sq(c.varrho) + inv1 * 8.0 * sq(lf) * sq(delta);
  chi[4] = inv1 * 8.0 * sq(lf) * 2.0 * delta * (2.0 - delta * nu) / shrink;
  chi[5] = 0.5 * delta * sq(lf);
  chi[6] = 1.0 - 0.5 * delta * nu;
  c.phi << chi[0], chi[1], 0.0, chi[2], chi[3], chi[4], chi[5], 0.0, chi[6];

  c.iota = std::min(c.c3 / 2.0, delta * nu / 4.0);
  c.rho_bar = 1.0 - c.iota;
  const double theta2 = c.c1 * c.c4 / 2.0;
  const double theta1 = std::min({c.c1 * c.c2 / 4.0, c.c1 / (24.0 * sq(lf)), nu * theta2 / (2.0 * sq(lf))});
  c.theta << theta1, 1.0, theta2;
  c.lmi_slack = (1.0 - c.iota) * c.theta - c.phi * c.theta;
  if (c.lmi_slack.minCoeff() < -1e-12) {
    Eigen::Index worst = 0;
    c.lmi_slack.minCoeff(&worst);
    c.violations.push_back({"Phi Theta <= (1 - iota) Theta (row " + std::to_string(worst + 1) + ")",
                            (c.phi * c.theta)(worst), (1.0 - c.iota) * c.theta(worst)});
  }
  c.perron = perron(c.phi);
  if (c.perron.rho > c.rho_bar + 1e-12) c.violations.push_back({"rho(Phi) <= 1 - iota", c.perron.rho, c.rho_bar});
  c.h = 3.0 * c.perron.zeta.maxCoeff() / c.perron.zeta.minCoeff();

  auto& s = c.sigma;
  s[5] = inv1 * 2.0 * sq(beta) * sq(rho);
  s[2] = s[5] * std::sqrt(1.0 + sq(1.0 + 4.0 * sq(lf)));
  s[6] = std::sqrt(3.0) * std::max(beta * rho, delta);
  s[7] = std::max(1.0 - 0.5 * delta * nu, 0.5 * delta * sq(lf));
  const double tail = std::sqrt(2.0 + 8.0 * s[7] / (delta * shrink));
  s[3] = s[6] * tail;
  s[8] = std::sqrt(2.0) * std::max(std::sqrt(sq(beta) * sq(rho) + 4.0 * sq(lf) * sq(delta)), 2.0 * lf * beta * rho);
  s[4] = s[8] * tail;
  return c;
}

struct GtOmega {
  double envelope, vartheta1, vartheta2;
};

GtOmega gt_omega(const GtCertificate& c, double mu) {
  const double env = std::sqrt(c.h * c.sigma[2] / (4.0 * sq(mu) * (sq(mu) - c.rho_bar)));
  const double base = (1.0 + 2.0 * c.inputs.beta * c.max_degree) / (2.0 * mu);
  return {env, c.sigma[3] * env + base - 0.5, (env + 1.0 / (2.0 * mu)) * c.sigma[4] + base - 0.5};
}

void gt_finish(GtCertificate& c) {
  const double mu = c.inputs.mu;
  if (std::isnan(c.h)) return;
  if (!(mu < 1.0 && sq(mu) > c.rho_bar)) {
    c.violations.push_back({"mu in (sqrt(rho_bar), 1)", mu, std::sqrt(c.rho_bar)});
    return;
  }
  const GtOmega w = gt_omega(c, mu);
  c.envelope = w.envelope;
  c.vartheta1 = w.vartheta1;
  c.vartheta2 = w.vartheta2;
  c.omega_x = w.vartheta1 + 0.5;
  c.omega_u = w.vartheta2 + 0.5;
  c.levels_min = std::max(w.vartheta1, w.vartheta2);
  c.levels_min_int = c.levels_min >= 9.0e18 ? std::numeric_limits<std::int64_t>::max()
                                             : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(c.levels_min)));
  if (!(static_cast<double>(c.inputs.levels) >= c.levels_min)) {
    c.violations.push_back({"K >= max(vartheta1, vartheta2)", static_cast<double>(c.inputs.levels), c.levels_min});
  }
}

}  // namespace

GtCertificate gt_analyze(const GtInputs& in, const LaplacianSpectrum& spec) {
  if (in.levels < 1) throw Error(ErrorCode::InvalidArgument, "quantizer level must be >= 1");
  GtCertificate c = gt_core(in, spec);
  gt_finish(c);
  return c;
}

GtCertificate gt_certify(const GtInputs& in, const LaplacianSpectrum& spec) {
  GtCertificate c = gt_analyze(in, spec);
  if (!c.feasible()) throw Error(ErrorCode::InfeasibleParameters, describe(c.violations.front()));
  return c;
}

double gt_delta_max(double lipschitz, double pl, const LaplacianSpectrum& spec, double beta, double c3_fraction) {
  GtInputs in;
  in.lipschitz = lipschitz;
  in.pl = pl;
  in.beta = beta;
  in.delta = 0.0;
  in.c3_fraction = c3_fraction;
  return gt_core(in, spec).delta_max;
}

S0Floor gt_s0_floor_terms(const GtCertificate& c, double cx, double cu, double grad_inf, double lambda0_norm) {
  const double denom = 2.0 * static_cast<double>(c.inputs.levels) + 1.0;
  const double mu = c.inputs.mu;
  S0Floor out;
  out.terms = {2.0 * (cx + c.inputs.delta * cu) / denom, 2.0 * grad_inf / denom,
               std::sqrt(4.0 * lambda0_norm * sq(mu) * (sq(mu) - c.rho_bar) / c.sigma[2])};
  out.value = *std::max_element(out.terms.begin(), out.terms.end());
  return out;
}

S0Floor gt_s0_floor(const GtCertificate& c, const ProblemSuite& problem, const AgentMatrix& x0, double f_star) {
  const AgentMatrix u0 = local_gradients(problem, x0);
  const AgentMatrix shifted = x0 - c.inputs.delta * u0;
  const AgentMatrix g_shift = local_gradients(problem, shifted);
  const double lambda0 = lambda_metric(x0, &u0, problem, f_star).lambda_norm;
  return gt_s0_floor_terms(c, x0.cwiseAbs().maxCoeff(), u0.cwiseAbs().maxCoeff(), g_shift.cwiseAbs().maxCoeff(),
                           lambda0);
}

namespace {

struct GtSearchResult {
  bool found = false;
  double score = std::numeric_limits<double>::infinity();
  double a = 0.0, b = 0.0;
  GtPoint point;
};

// Grid over beta = beta_max 10^-a and delta = delta_max(beta) 10^-b.
template <typename Score>
GtSearchResult gt_grid_search(double lipschitz, double pl, const LaplacianSpectrum& spec, SearchBudget budget,
                              Score score) {
  GridAxis ax{1e-4, 8.0, budget.grid};
  GridAxis bx{1e-4, 8.0, budget.grid};
  GtSearchResult best;
  const double beta_max = std::sqrt(2.0) / (2.0 * spec.rho);
  for (int round = 0; round <= budget.refinements; ++round) {
    for (std::size_t i = 0; i < ax.points; ++i) {
      const double beta = beta_max * std::pow(10.0, -ax.at(i));
      GtInputs in;
      in.lipschitz = lipschitz;
      in.pl = pl;
      in.beta = beta;
      in.delta = 0.0;
      const double dmax = gt_core(in, spec).delta_max;
      for (std::size_t j = 0; j < bx.points; ++j) {
        in.delta = dmax * std::pow(10.0, -bx.at(j));
        GtCertificate c = gt_core(in, spec);
        if (!c.feasible() || std::isnan(c.h)) continue;
        double mu = 0.0;
        const double s = score(c, mu);
        if (s < best.score) {
          best.found = true;
          best.score = s;
          best.a = ax.at(i);
          best.b = bx.at(j);
          best.point = {beta, in.delta, mu};
        }
      }
    }
    if (!best.found) break;
    const double da = 2.0 * ax.step(), db = 2.0 * bx.step();
    ax = {std::max(1e-6, best.a - da), best.a + da, budget.grid};
    bx = {std::max(1e-6, best.b - db), best.b + db, budget.grid};
  }
  return best;
}

}  // namespace

std::pair<double, GtPoint> gt_min_threshold(double lipschitz, double pl, const LaplacianSpectrum& spec,
                                            SearchBudget budget) {
  require_problem_constants(lipschitz, pl);
  auto result = gt_grid_search(lipschitz, pl, spec, budget, [](const GtCertificate& c, double& mu) {
    mu = kMuHigh;
    const GtOmega w = gt_omega(c, mu);
    return std::max(w.vartheta1, w.vartheta2);
  });
  if (!result.found) throw Error(ErrorCode::NotFound, "no admissible (beta, delta) on the search grid");
  return {result.score, result.point};
}

GtPoint gt_feasible_low_rate(double lipschitz, double pl, const LaplacianSpectrum& spec, std::int64_t levels,
                             SearchBudget budget) {
  require_problem_constants(lipschitz, pl);
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "quantizer level must be >= 1");
  const double target = static_cast<double>(levels) + 0.5;
  double closest = std::numeric_limits<double>::infinity();
  auto result = gt_grid_search(lipschitz, pl, spec, budget, [&](const GtCertificate& c, double& mu) {
    auto omega = [&](double m) {
      const GtOmega w = gt_omega(c, m);
      return std::max(w.vartheta1, w.vartheta2) + 0.5;
    };
    const double top = omega(kMuHigh);
    closest = std::min(closest, top);
    if (!(top <= target)) return std::numeric_limits<double>::infinity();
    mu = smallest_feasible_mu(omega, std::sqrt(c.rho_bar), kMuHigh, target);
    return mu;
  });
  if (!result.found || !std::isfinite(result.score)) {
    throw Error(ErrorCode::NotFound, "no (beta, delta, mu) with Omega <= " + fmt(target) +
                                         "; smallest max(Omega_x, Omega_u) found = " + fmt(closest));
  }
  GtInputs in;
  in.lipschitz = lipschitz;
  in.pl = pl;
  in.beta = result.point.beta;
  in.delta = result.point.delta;
  in.mu = result.point.mu;
  in.levels = levels;
  gt_certify(in, spec);
  return result.point;
}

double PiCertificate::epsilon9(double s0) const {
  const double mu = inputs.mu;
  const double nm = static_cast<double>(agents * inputs.dimension);
  return nm * eps[1] * s0 * s0 / (4.0 * eps[9] * sq(mu) * (sq(mu) - eps[2]));
}

namespace {

struct Kappas {
  double k1, k2, k3, epsilon, eta1, eta2, gamma1, gamma2, sigma_max;
};

Kappas pi_kappas(double lf, double nu, const LaplacianSpectrum& spec, const PiMargins& m) {
  if (!(m.kappa1 > 1.0 && m.kappa2 > 1.0 && m.kappa3 > 1.0 && m.epsilon > 0.0 && m.epsilon < 1.0 && m.gamma > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "margins must keep every open inequality strict");
  }
  const double rho = spec.rho, rl = spec.rho_min, l2 = sq(lf);
  Kappas k{};
  k.k1 = m.kappa1 * 5.0 / rl;
  k.k2 = m.kappa2 * std::max({6.0 * l2 * sq(k.k1 + 1.0) * sq(k.k1) * rho, 4.0 + 6.0 * l2 * sq(k.k1) + l2,
                              6.0 * l2 * sq(k.k1 + 1.0), 1.0 + (3.0 * l2 + 8.0) / rl});
  k.k3 = m.kappa3 * k.k2;
  k.epsilon = m.epsilon * std::min(k.k2 / 2.0 - 2.0 - 3.0 * l2 * sq(k.k1) - l2 / 2.0, k.k2 - 1.0 - (3.0 * l2 + 8.0) / rl);
  k.eta1 = sq(k.k3) * rho + 2.0 / rl + 2.0 * sq(k.k3) * rho +
           3.0 * sq(k.k3) * l2 * ((k.k1 + 1.0) / sq(k.k2) + 1.5 * rho);
  k.eta2 = 4.0 * sq(k.k1) * sq(k.k3) * sq(rho) + 2.0 * (sq(k.k3) * (k.k1 + 1.0) * rho + 1.0 + sq(k.k3)) +
           3.0 * sq(k.k1) * l2 * ((k.k1 + 1.0) * rho + 1.5 * sq(k.k3) * sq(rho));
  k.gamma1 = m.gamma * k.eta1;
  k.gamma2 = m.gamma * k.eta2;
  k.sigma_max = std::min({k.epsilon / k.gamma1, k.epsilon / k.gamma2, 2.0 / nu, 1.0 / (4.0 * lf)});
  return k;
}

// Everything except the mu-dependent threshold.
PiCertificate pi_core(const PiInputs& in, const LaplacianSpectrum& spec) {
  require_problem_constants(in.lipschitz, in.pl);
  if (in.dimension < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  PiCertificate c;
  c.inputs = in;
  c.agents = spec.size();
  c.rho_l = spec.rho;
  c.rho_min_l = spec.rho_min;
  c.max_degree = spec.max_degree;
  const Kappas k = pi_kappas(in.lipschitz, in.pl, spec, in.margins);
  c.kappa1 = k.k1;
  c.kappa2 = k.k2;
  c.kappa3 = k.k3;
  c.epsilon = k.epsilon;
  c.eta1 = k.eta1;
  c.eta2 = k.eta2;
  c.gamma1 = k.gamma1;
  c.gamma2 = k.gamma2;
  c.sigma_max = k.sigma_max;
  c.omega = c.levels_min = kNaN;

  const double xi = in.xi, phi = in.phi, sigma = in.sigma, lf = in.lipschitz, l2 = sq(lf), nu = in.pl;
  const double rho = spec.rho, rl = spec.rho_min;
  if (!(k.epsilon > 0.0)) c.violations.push_back({"varepsilon > 0", k.epsilon, 0.0});
  if (!(sigma > 0.0 && sigma < k.sigma_max)) {
    c.violations.push_back({"sigma in (0, min{eps/gamma1, eps/gamma2, 2/nu, 1/(4L)})", sigma, k.sigma_max});
  }
  if (!(phi >= sigma * k.k2)) c.violations.push_back({"phi >= sigma kappa2", phi, sigma * k.k2});
  if (!(phi <= sigma * k.k3)) c.violations.push_back({"phi <= sigma kappa3", phi, sigma * k.k3});
  if (!(xi >= 5.0 * phi / rl)) c.violations.push_back({"xi >= 5 phi / rho_min(L)", xi, 5.0 * phi / rl});
  if (!(xi <= k.k1 * phi)) c.violations.push_back({"xi <= kappa1 phi", xi, k.k1 * phi});
  if (!(sigma > 0.0 && phi > 0.0 && xi > 0.0)) {
    c.eps.fill(kNaN);
    c.alpha.fill(kNaN);
    return c;
  }

  const double sp = xi + phi;
  auto& a = c.alpha;
  a[0] = phi - 8.0 * sigma / rl - 6.0 * sq(sigma) * sq(phi) * l2 * sq(sp) / std::pow(phi, 5) - 3.0 * sigma * l2 / rl;
  a[1] = sq(phi) * rho + 2.0 * sq(sigma) / rl + 2.0 * sq(phi) * rho +
         3.0 * sq(phi) * l2 * (sq(sigma) * sp / std::pow(phi, 3) + 1.5 * rho);
  a[2] = xi * rl - 4.5 * phi - sigma - 6.0 * sq(sigma) * sq(xi) * l2 * sq(sp) / std::pow(phi, 5) * rho -
         3.0 * sigma * l2 * sq(xi) / sq(phi);
  a[3] = 4.0 * sq(xi) * sq(rho) + 2.0 * (phi * sp * rho + sq(sigma) + sq(phi)) +
         3.0 * sq(xi) * l2 * (sq(sigma) * sp / std::pow(phi, 3) * rho + 1.5 * sq(rho));

  auto& e = c.eps;
  e[0] = std::max({sq(xi) * sq(rho), std::pow(phi, 3) * rho / sp, xi * phi * sq(rho)});
  e[1] = xi * rho + 2.0 * phi * rho + 4.0 * sq(xi) * sq(rho) + 2.0 * (phi * sp * rho + sq(sigma) + sq(phi) + 2.0 * phi);
  e[5] = a[0] - a[1];
  e[7] = a[2] - a[3];
  e[6] = e[7] - 0.5 * sigma * l2;
  e[3] = std::min({e[5], e[6], 0.5 * sigma * nu});
  e[4] = std::max((xi * rl + phi) / (xi * rl), 1.0 + 2.0 * xi / phi);
  e[2] = 1.0 - e[3] / e[4];
  e[9] = std::min((xi * rl - phi) / (xi * rl), 1.0);
  e[8] = kNaN;

  if (!(e[5] > sq(sigma) * (k.gamma1 - k.eta1))) {
    c.violations.push_back({"epsilon6 > sigma^2 (gamma1 - eta1)", e[5], sq(sigma) * (k.gamma1 - k.eta1)});
  }
  if (!(e[7] > sq(sigma) * (k.gamma2 - k.eta2))) {
    c.violations.push_back({"epsilon8 > sigma^2 (gamma2 - eta2)", e[7], sq(sigma) * (k.gamma2 - k.eta2)});
  }
  if (!(e[6] > 0.0)) c.violations.push_back({"epsilon7 > 0", e[6], 0.0});
  if (!(e[2] > 0.0 && e[2] < 1.0)) c.violations.push_back({"epsilon3 in (0, 1)", e[2], 1.0});
  if (!(e[9] > 0.0)) c.violations.push_back({"epsilon10 > 0", e[9], 0.0});
  return c;
}

double pi_omega(const PiCertificate& c, double mu) {
  const double nm = static_cast<double>(c.agents * c.inputs.dimension);
  return c.eps[0] * std::sqrt(c.eps[1] * nm / (4.0 * sq(mu) * (sq(mu) - c.eps[2]))) +
         (1.0 + 2.0 * c.inputs.xi * c.max_degree) / (2.0 * mu);
}

void pi_finish(PiCertificate& c) {
  const double mu = c.inputs.mu;
  if (std::isnan(c.eps[2]) || !(c.eps[2] > 0.0 && c.eps[2] < 1.0)) return;
  if (!(mu < 1.0 && sq(mu) > c.eps[2])) {
    c.violations.push_back({"mu in (sqrt(epsilon3), 1)", mu, std::sqrt(c.eps[2])});
    return;
  }
  c.omega = pi_omega(c, mu);
  c.levels_min = c.omega - 0.5;
  c.levels_min_int = c.levels_min >= 9.0e18 ? std::numeric_limits<std::int64_t>::max()
                                            : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(c.levels_min)));
  if (!(static_cast<double>(c.inputs.levels) >= c.levels_min)) {
    c.violations.push_back({"K >= epsilon1 sqrt(epsilon2 n m / (4 mu^2 (mu^2 - epsilon3))) + (1 + 2 xi d)/(2 mu) - 1/2",
                            static_cast<double>(c.inputs.levels), c.levels_min});
  }
}

}  // namespace

PiCertificate pi_analyze(const PiInputs& in, const LaplacianSpectrum& spec) {
  if (in.levels < 1) throw Error(ErrorCode::InvalidArgument, "quantizer level must be >= 1");
  PiCertificate c = pi_core(in, spec);
  pi_finish(c);
  return c;
}

PiCertificate pi_certify(const PiInputs& in, const LaplacianSpectrum& spec) {
  PiCertificate c = pi_analyze(in, spec);
  if (!c.feasible()) throw Error(ErrorCode::InfeasibleParameters, describe(c.violations.front()));
  return c;
}

S0Floor pi_s0_floor_terms(const PiCertificate& c, double cx, double cu, double cg, double w0) {
  const double mu = c.inputs.mu;
  const double nm = static_cast<double>(c.agents * c.inputs.dimension);
  S0Floor out;
  out.terms = {(cx + c.inputs.phi * cu + c.inputs.sigma * cg) / (static_cast<double>(c.inputs.levels) + 0.5),
               std::sqrt(4.0 * sq(mu) * (sq(mu) - c.eps[2]) * std::max(w0, 0.0) / (c.eps[1] * nm))};
  out.value = std::max(out.terms[0], out.terms[1]);
  return out;
}

S0Floor pi_s0_floor(const PiCertificate& c, const LaplacianSpectrum& spec, const ProblemSuite& problem,
                    const AgentMatrix& x0, const AgentMatrix& u0, double f_star) {
  const AgentMatrix g0 = local_gradients(problem, x0);
  PiGains gains{c.inputs.xi, c.inputs.phi, c.inputs.sigma};
  const double w0 = pi_lyapunov(x0, u0, g0, gains, spec, problem, f_star).w;
  return pi_s0_floor_terms(c, x0.cwiseAbs().maxCoeff(), u0.cwiseAbs().maxCoeff(), g0.cwiseAbs().maxCoeff(), w0);
}

PiInputs pi_inputs_for(double lipschitz, double pl, const LaplacianSpectrum& spec, std::size_t dimension, double sigma,
                       double mu, std::int64_t levels, PiRatios ratios, PiMargins margins) {
  require_problem_constants(lipschitz, pl);
  if (!(ratios.phi_position >= 0.0 && ratios.phi_position <= 1.0 && ratios.xi_position >= 0.0 &&
        ratios.xi_position <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "ratio positions must lie in [0, 1]");
  }
  const Kappas k = pi_kappas(lipschitz, pl, spec, margins);
  PiInputs in;
  in.lipschitz = lipschitz;
  in.pl = pl;
  in.sigma = sigma;
  in.phi = sigma * (k.k2 + ratios.phi_position * (k.k3 - k.k2));
  const double xi_lo = 5.0 * in.phi / spec.rho_min;
  in.xi = xi_lo + ratios.xi_position * (k.k1 * in.phi - xi_lo);
  in.mu = mu;
  in.levels = levels;
  in.dimension = dimension;
  in.margins = margins;
  return in;
}

PiPoint pi_feasible_low_rate(double lipschitz, double pl, const LaplacianSpectrum& spec, std::size_t dimension,
                             PiRatios ratios, std::int64_t levels, SearchBudget budget) {
  require_problem_constants(lipschitz, pl);
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "quantizer level must be >= 1");
  const double target = static_cast<double>(levels) + 0.5;
  const double sigma_max = pi_kappas(lipschitz, pl, spec, PiMargins{}).sigma_max;
  GridAxis ax{1e-4, 12.0, budget.grid};
  bool found = false;
  double best_mu = std::numeric_limits<double>::infinity();
  double best_a = 0.0;
  double closest = std::numeric_limits<double>::infinity();
  PiInputs best_in;
  for (int round = 0; round <= budget.refinements; ++round) {
    for (std::size_t i = 0; i < ax.points; ++i) {
      const double sigma = sigma_max * std::pow(10.0, -ax.at(i));
      PiInputs in = pi_inputs_for(lipschitz, pl, spec, dimension, sigma, kMuHigh, levels, ratios);
      PiCertificate c = pi_core(in, spec);
      if (!c.feasible() || !(sq(kMuHigh) > c.eps[2])) continue;
      auto omega = [&](double m) { return pi_omega(c, m); };
      const double top = omega(kMuHigh);
      closest = std::min(closest, top);
      if (!(top <= target)) continue;
      const double mu = smallest_feasible_mu(omega, std::sqrt(c.eps[2]), kMuHigh, target);
      if (mu < best_mu) {
        found = true;
        best_mu = mu;
        best_a = ax.at(i);
        best_in = in;
        best_in.mu = mu;
      }
    }
    if (!found) break;
    const double da = 2.0 * ax.step();
    ax = {std::max(1e-6, best_a - da), best_a + da, budget.grid};
  }
  if (!found) {
    throw Error(ErrorCode::NotFound, "no (sigma, mu) with Omega <= " + fmt(target) +
                                         "; smallest Omega found = " + fmt(closest));
  }
  pi_certify(best_in, spec);
  return {best_in.xi, best_in.phi, best_in.sigma, best_in.mu};
}

}  // namespace qdopt

namespace qdopt {

Report certificate_report(const GtCertificate& c) {
  Report r{{"beta", c.inputs.beta},       {"delta", c.inputs.delta},     {"mu", c.inputs.mu},
           {"levels", static_cast<double>(c.inputs.levels)},              {"lipschitz", c.inputs.lipschitz},
           {"pl", c.inputs.pl},           {"rho_l", c.rho_l},            {"rho_min_l", c.rho_min_l},
           {"max_degree", c.max_degree},  {"beta_max", c.beta_max},      {"varrho", c.varrho},
           {"c1", c.c1},                  {"c2", c.c2},                  {"c3", c.c3},
           {"c4", c.c4},                  {"delta_max", c.delta_max},    {"sigma1", c.sigma1}};
  for (int i = 2; i <= 8; ++i) r.emplace_back("sigma" + std::to_string(i), c.sigma[static_cast<std::size_t>(i)]);
  for (int i = 1; i <= 7; ++i) r.emplace_back("chi" + std::to_string(i), c.chi[static_cast<std::size_t>(i - 1)]);
  r.emplace_back("iota", c.iota);
  r.emplace_back("rho_bar", c.rho_bar);
  for (int i = 0; i < 3; ++i) r.emplace_back("theta" + std::to_string(i + 1), c.theta(i));
  for (int i = 0; i < 3; ++i) r.emplace_back("lmi_slack" + std::to_string(i + 1), c.lmi_slack(i));
  r.emplace_back("rho_phi", c.perron.rho);
  r.emplace_back("h", c.h);
  r.emplace_back("envelope", c.envelope);
  r.emplace_back("vartheta1", c.vartheta1);
  r.emplace_back("vartheta2", c.vartheta2);
  r.emplace_back("omega_x", c.omega_x);
  r.emplace_back("omega_u", c.omega_u);
  r.emplace_back("levels_min", c.levels_min);
  r.emplace_back("levels_min_int", static_cast<double>(c.levels_min_int));
  r.emplace_back("feasible", c.feasible() ? 1.0 : 0.0);
  return r;
}

Report certificate_report(const PiCertificate& c) {
  Report r{{"xi", c.inputs.xi},
           {"phi", c.inputs.phi},
           {"sigma", c.inputs.sigma},
           {"mu", c.inputs.mu},
           {"levels", static_cast<double>(c.inputs.levels)},
           {"lipschitz", c.inputs.lipschitz},
           {"pl", c.inputs.pl},
           {"agents", static_cast<double>(c.agents)},
           {"dimension", static_cast<double>(c.inputs.dimension)},
           {"rho_l", c.rho_l},
           {"rho_min_l", c.rho_min_l},
           {"max_degree", c.max_degree},
           {"kappa1", c.kappa1},
           {"kappa2", c.kappa2},
           {"kappa3", c.kappa3},
           {"epsilon", c.epsilon},
           {"eta1", c.eta1},
           {"eta2", c.eta2},
           {"gamma1", c.gamma1},
           {"gamma2", c.gamma2},
           {"sigma_max", c.sigma_max}};
  for (int i = 1; i <= 10; ++i) r.emplace_back("eps" + std::to_string(i), c.eps[static_cast<std::size_t>(i - 1)]);
  for (int i = 1; i <= 4; ++i) r.emplace_back("alpha" + std::to_string(i), c.alpha[static_cast<std::size_t>(i - 1)]);
  r.emplace_back("omega", c.omega);
  r.emplace_back("levels_min", c.levels_min);
  r.emplace_back("levels_min_int", static_cast<double>(c.levels_min_int));
  r.emplace_back("feasible", c.feasible() ? 1.0 : 0.0);
  return r;
}

LemmaCheck verify_lemmas(std::size_t samples, std::uint64_t seed, std::size_t graphs, std::size_t max_agents,
                         std::size_t k_max) {
  LemmaCheck out;
  out.graphs = graphs;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(3, std::max<std::size_t>(3, max_agents));
  std::uniform_real_distribution<double> prob_dist(0.2, 0.8);
  std::uniform_real_distribution<double> lf_dist(0.5, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t gi = 0; gi < graphs; ++gi) {
    const std::size_t n = size_dist(rng);
    const UndirectedGraph g = random_connected_graph(n, prob_dist(rng), rng());
    const LaplacianSpectrum spec = spectrum(g);
    const double lf = lf_dist(rng);
    const double nu = lf * (0.05 + 0.95 * unit(rng));
    for (std::size_t si = 0; si < samples; ++si) {
      GtInputs in;
      in.lipschitz = lf;
      in.pl = nu;
      in.mu = 0.999999;
      const double beta_max = std::sqrt(2.0) / (2.0 * spec.rho);
      in.beta = beta_max * std::pow(10.0, -3.0 * unit(rng)) * (1.0 - 1e-9);
      const double dmax = gt_delta_max(lf, nu, spec, in.beta);
      in.delta = dmax * std::pow(10.0, -3.0 * unit(rng)) * (1.0 - 1e-9);
      const GtCertificate c = gt_analyze(in, spec);
      ++out.samples;
      const double slack = c.lmi_slack.minCoeff();
      out.worst_slack = out.samples == 1 ? slack : std::min(out.worst_slack, slack);
      if (!(slack >= -1e-12)) ++out.lmi_failures;
      const double ratio = matrix_power_bound(c.phi, c.h, c.perron.rho, k_max);
      out.worst_power_ratio = std::max(out.worst_power_ratio, ratio);
      if (!(ratio <= 1.0 + 1e-10)) ++out.power_failures;
    }
  }
  return out;
}

}  // namespace qdopt
