#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdopt/graph.hpp"
#include "qdopt/optimizer.hpp"

namespace qdopt {

struct Violation {
  std::string condition;
  double lhs = 0.0;
  double rhs = 0.0;
};

std::string describe(const Violation& v);

struct PerronResult {
  double rho = 0.0;      // Collatz-Wielandt upper bound at the converged vector
  double rho_low = 0.0;  // matching lower bound
  Eigen::Vector3d zeta = Eigen::Vector3d::Zero();
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration for a nonnegative primitive 3x3 matrix.
PerronResult perron(const Eigen::Matrix3d& phi, double tol = 1e-12, std::size_t max_iter = 100000);

// Worst ||Phi^k||_2 / (h rho^k) over k = 0..k_max.
double matrix_power_bound(const Eigen::Matrix3d& phi, double h, double rho, std::size_t k_max);

struct GtInputs {
  double lipschitz = 1.0;  // L_f
  double pl = 0.5;         // nu
  double beta = 0.01;
  double delta = 0.01;
  double mu = 0.999;
  std::int64_t levels = 1;
  double c3_fraction = 0.5;  // c3 = fraction * (1 - varrho^2)
};

struct GtCertificate {
  GtInputs inputs;
  double rho_l = 0.0;
  double rho_min_l = 0.0;
  double max_degree = 0.0;
  double beta_max = 0.0;
  double varrho = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double delta_max = 0.0;
  std::array<double, 5> delta_terms{};
  double sigma1 = 0.0;
  std::array<double, 9> sigma{};  // sigma[2]..sigma[8] populated; sigma[0], sigma[1] unused
  std::array<double, 7> chi{};    // chi_1..chi_7
  double iota = 0.0;
  double rho_bar = 0.0;
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  Eigen::Matrix3d phi = Eigen::Matrix3d::Zero();
  Eigen::Vector3d lmi_slack = Eigen::Vector3d::Zero();  // (1 - iota) Theta - Phi Theta
  PerronResult perron;
  double h = 0.0;
  double envelope = 0.0;  // sqrt(h sigma2 / (4 mu^2 (mu^2 - rho_bar)))
  double vartheta1 = 0.0, vartheta2 = 0.0;
  double omega_x = 0.0, omega_u = 0.0;
  double levels_min = 0.0;  // max(vartheta1, vartheta2)
  std::int64_t levels_min_int = 0;
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  double sigma9(double s0) const;
};

GtCertificate gt_analyze(const GtInputs& in, const LaplacianSpectrum& spec);
GtCertificate gt_certify(const GtInputs& in, const LaplacianSpectrum& spec);  // throws InfeasibleParameters

// Upper end of the admissible step-size interval for a given beta (NaN if beta is out of range).
double gt_delta_max(double lipschitz, double pl, const LaplacianSpectrum& spec, double beta, double c3_fraction = 0.5);

struct S0Floor {
  std::vector<double> terms;
  double value = 0.0;
};

S0Floor gt_s0_floor_terms(const GtCertificate& cert, double cx, double cu, double grad_inf, double lambda0_norm);
S0Floor gt_s0_floor(const GtCertificate& cert, const ProblemSuite& problem, const AgentMatrix& x0, double f_star);

struct SearchBudget {
  std::size_t grid = 64;
  int refinements = 2;
};

struct GtPoint {
  double beta = 0.0;
  double delta = 0.0;
  double mu = 0.0;
};

// Returns the point with the smallest feasible mu; throws NotFound otherwise.
GtPoint gt_feasible_low_rate(double lipschitz, double pl, const LaplacianSpectrum& spec, std::int64_t levels,
                             SearchBudget budget = {});
// Smallest max(vartheta1, vartheta2) found over the same search space with mu -> 1.
std::pair<double, GtPoint> gt_min_threshold(double lipschitz, double pl, const LaplacianSpectrum& spec,
                                            SearchBudget budget = {});

struct PiMargins {
  double kappa1 = 1.01;
  double kappa2 = 1.01;
  double kappa3 = 2.0;
  double epsilon = 0.99;
  double gamma = 1.01;
};

struct PiInputs {
  double lipschitz = 1.0;
  double pl = 0.5;
  double xi = 0.00235;
  double phi = 0.002;
  double sigma = 0.001;
  double mu = 0.999;
  std::int64_t levels = 1;
  std::size_t dimension = 1;  // m
  PiMargins margins;
};

struct PiCertificate {
  PiInputs inputs;
  std::size_t agents = 0;
  double rho_l = 0.0;
  double rho_min_l = 0.0;
  double max_degree = 0.0;
  double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0;
  double epsilon = 0.0;
  double eta1 = 0.0, eta2 = 0.0, gamma1 = 0.0, gamma2 = 0.0;
  double sigma_max = 0.0;
  std::array<double, 10> eps{};   // eps[0] = epsilon_1 ... eps[9] = epsilon_10
  std::array<double, 4> alpha{};  // alpha_1..alpha_4
  double omega = 0.0;             // Omega-bar = threshold + 1/2
  double levels_min = 0.0;
  std::int64_t levels_min_int = 0;
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  double rate() const { return eps[2]; }
  double epsilon9(double s0) const;
};

PiCertificate pi_analyze(const PiInputs& in, const LaplacianSpectrum& spec);
PiCertificate pi_certify(const PiInputs& in, const LaplacianSpectrum& spec);  // throws InfeasibleParameters

S0Floor pi_s0_floor_terms(const PiCertificate& cert, double cx, double cu, double cg, double w0);
S0Floor pi_s0_floor(const PiCertificate& cert, const LaplacianSpectrum& spec, const ProblemSuite& problem,
                    const AgentMatrix& x0, const AgentMatrix& u0, double f_star);

// Position of phi inside [sigma kappa2, sigma kappa3] and of xi inside [5 phi / rho_min, kappa1 phi].
struct PiRatios {
  double phi_position = 0.5;
  double xi_position = 0.5;
};

struct PiPoint {
  double xi = 0.0;
  double phi = 0.0;
  double sigma = 0.0;
  double mu = 0.0;
};

PiInputs pi_inputs_for(double lipschitz, double pl, const LaplacianSpectrum& spec, std::size_t dimension, double sigma,
                       double mu, std::int64_t levels, PiRatios ratios = {}, PiMargins margins = {});
PiPoint pi_feasible_low_rate(double lipschitz, double pl, const LaplacianSpectrum& spec, std::size_t dimension,
                             PiRatios ratios, std::int64_t levels, SearchBudget budget = {});

// Flat name/value listing in a fixed order, used for the key-value and JSON reports.
using Report = std::vector<std::pair<std::string, double>>;
Report certificate_report(const GtCertificate& c);
Report certificate_report(const PiCertificate& c);

struct LemmaCheck {
  std::size_t graphs = 0;
  std::size_t samples = 0;
  std::size_t lmi_failures = 0;
  std::size_t power_failures = 0;
  double worst_slack = 0.0;        // most negative LMI slack seen
  double worst_power_ratio = 0.0;  // largest ||Phi^k|| / (h rho^k)
};

// Samples (beta, delta) inside their admissible ranges on random connected graphs and checks the
// contraction inequality and the matrix power bound of every certificate.
LemmaCheck verify_lemmas(std::size_t samples, std::uint64_t seed, std::size_t graphs = 20, std::size_t max_agents = 30,
                         std::size_t k_max = 200);

}  // namespace qdopt
