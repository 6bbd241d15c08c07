#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdopt {

class CostFunction {
 public:
  virtual ~CostFunction() = default;
  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;
};

// The ten scalar nonconvex families, numbered 1..10.
class ScalarFamily final : public CostFunction {
 public:
  explicit ScalarFamily(int family);
  int family() const { return family_; }
  std::size_t dimension() const override { return 1; }
  double value(std::span<const double> x) const override { return value_at(x[0]); }
  void gradient(std::span<const double> x, std::span<double> out) const override { out[0] = derivative_at(x[0]); }
  double value_at(double x) const;
  double derivative_at(double x) const;

 private:
  int family_;
};

// f(x) = 0.5 x^T A x - b^T x + c with symmetric A.
class QuadraticCost final : public CostFunction {
 public:
  QuadraticCost(Eigen::MatrixXd a, Eigen::VectorXd b, double c);
  std::size_t dimension() const override { return static_cast<std::size_t>(b_.size()); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  const Eigen::MatrixXd& hessian() const { return a_; }
  const Eigen::VectorXd& linear() const { return b_; }
  double constant() const { return c_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  double c_;
};

struct ProblemSuite {
  std::string name;
  std::vector<std::shared_ptr<const CostFunction>> agents;
  std::size_t dim = 1;
  std::optional<double> f_star;
  std::optional<Eigen::VectorXd> x_star_hint;
  std::optional<double> smoothness;   // L_f, exact or estimated
  std::optional<double> pl_constant;  // nu, exact or estimated
  bool analytic = false;              // f_star, L_f, nu known in closed form

  std::size_t size() const { return agents.size(); }
  double average_value(std::span<const double> x) const;
  void average_gradient(std::span<const double> x, std::span<double> out) const;
};

ProblemSuite paper_suite(std::size_t n = 100);
ProblemSuite least_squares_suite(std::size_t n, std::size_t m, double ell2, std::uint64_t seed);
// f_i(x) = a_i (x - c_i)^2 / 2 in one dimension.
ProblemSuite scalar_quadratic_suite(std::span<const double> curvatures, std::span<const double> centers);
ProblemSuite random_quadratic_suite(std::size_t n, std::uint64_t seed, double curvature_lo = 0.5,
                                    double curvature_hi = 2.0, double center_range = 2.0);

struct Box {
  double lo = -20.0;
  double hi = 20.0;
};

struct OptimumEstimate {
  double f_star;
  Eigen::VectorXd x_star;
};

OptimumEstimate global_optimum_oracle(const ProblemSuite& suite, Box interval = {}, std::size_t grid_points = 200001);

double estimate_smoothness(const ProblemSuite& suite, Box box, std::size_t samples, std::uint64_t seed);
double estimate_pl_constant(const ProblemSuite& suite, double f_star, Box box, std::size_t samples,
                            std::uint64_t seed);

// Fills f_star/x_star_hint and the L_f, nu estimates when they are not known analytically.
void complete_suite(ProblemSuite& suite, Box box = {-10.0, 10.0}, std::size_t samples = 20000, std::uint64_t seed = 1);

}  // namespace qdopt
