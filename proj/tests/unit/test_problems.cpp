#include <doctest.h>

#include <cmath>
#include <vector>

#include "golden.hpp"
#include "qdopt/error.hpp"
#include "qdopt/problems.hpp"

using namespace qdopt;

TEST_CASE("scalar families match reference values and derivatives") {
  const auto g = load_golden("paper_suite.json");
  const auto points = g["points"].get<std::vector<double>>();
  for (int fam = 1; fam <= 10; ++fam) {
    const ScalarFamily f(fam);
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double v = g["values"][fam - 1][p].get<double>();
      const double dv = g["derivatives"][fam - 1][p].get<double>();
      CHECK(f.value_at(points[p]) == doctest::Approx(v).epsilon(1e-13));
      CHECK(f.derivative_at(points[p]) == doctest::Approx(dv).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("families have matching finite-difference gradients") {
  for (int fam = 1; fam <= 10; ++fam) {
    const ScalarFamily f(fam);
    for (double x = -9.5; x < 10.0; x += 0.37) {
      const double h = 1e-6;
      const double fd = (f.value_at(x + h) - f.value_at(x - h)) / (2 * h);
      CHECK(f.derivative_at(x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("paper suite layout") {
  const auto s = paper_suite(100);
  CHECK(s.size() == 100);
  CHECK(dynamic_cast<const ScalarFamily&>(*s.agents[0]).family() == 1);
  CHECK(dynamic_cast<const ScalarFamily&>(*s.agents[9]).family() == 1);
  CHECK(dynamic_cast<const ScalarFamily&>(*s.agents[10]).family() == 2);
  CHECK(dynamic_cast<const ScalarFamily&>(*s.agents[99]).family() == 10);
  const auto t = paper_suite(20);
  CHECK(dynamic_cast<const ScalarFamily&>(*t.agents[1]).family() == 1);
  CHECK(dynamic_cast<const ScalarFamily&>(*t.agents[2]).family() == 2);
  try {
    paper_suite(15);
    FAIL("accepted a count that is not a multiple of ten");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndivisibleCount);
  }
}

TEST_CASE("global optimum of the ten-family average") {
  const auto g = load_golden("paper_suite.json");
  const auto opt = global_optimum_oracle(paper_suite(100));
  CHECK(opt.f_star == doctest::Approx(g["f_star"].get<double>()).scale(1.0).epsilon(1e-12));
  CHECK(std::abs(opt.x_star(0) - g["x_star"].get<double>()) < 1e-6);
}

TEST_CASE("optimum oracle on simple cases") {
  const double one_a[] = {2.0}, one_c[] = {1.0};
  const auto q = scalar_quadratic_suite(one_a, one_c);
  // a(x - c)^2 / 2 with a = 2 is (x - 1)^2.
  const auto opt = global_optimum_oracle(q);
  CHECK(opt.f_star == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(opt.x_star(0) == doctest::Approx(1.0).epsilon(1e-8));

  ProblemSuite sine;
  sine.agents.push_back(std::make_shared<ScalarFamily>(7));
  const auto s = global_optimum_oracle(sine);
  CHECK(s.f_star == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("smoothness estimates") {
  const double a[] = {1.0}, c[] = {0.0};
  const auto half = scalar_quadratic_suite(a, c);
  const double l = estimate_smoothness(half, {-10, 10}, 5000, 3);
  CHECK(l >= 1.0);
  CHECK(l <= 1.2 + 1e-12);

  ProblemSuite fam8;
  fam8.agents.push_back(std::make_shared<ScalarFamily>(8));
  const double l8 = estimate_smoothness(fam8, {-10, 10}, 20000, 3);
  CHECK(l8 >= 2.0);
  CHECK(l8 <= 1.2 * 2.6);

  const auto g = load_golden("paper_suite.json");
  const double lp = estimate_smoothness(paper_suite(100), {-10, 10}, 20000, 1);
  // The smoothness constant bounds every local cost, not only the average.
  const double true_l = g["max_local_second_derivative"].get<double>();
  CHECK(lp <= 1.2 * true_l * (1 + 1e-9));
  CHECK(lp >= 0.9 * true_l);
}

TEST_CASE("Polyak-Lojasiewicz estimates") {
  const double a[] = {1.0}, c[] = {0.0};
  const auto half = scalar_quadratic_suite(a, c);
  const double nu = estimate_pl_constant(half, 0.0, {-10, 10}, 5000, 4);
  CHECK(nu >= 0.8 - 1e-9);
  CHECK(nu <= 1.0);

  const auto ls = least_squares_suite(6, 3, 0.5, 11);
  REQUIRE(ls.pl_constant);
  REQUIRE(ls.f_star);
  const double est = estimate_pl_constant(ls, *ls.f_star, {-10, 10}, 5000, 4);
  CHECK(est >= 0.8 * *ls.pl_constant * (1 - 1e-9));

  const auto g = load_golden("paper_suite.json");
  const double true_nu = g["min_pl_ratio"].get<double>();
  const double sampled = estimate_pl_constant(paper_suite(100), 0.0, {-10, 10}, 20000, 2) / 0.8;
  CHECK(sampled >= true_nu * (1 - 1e-6));
  CHECK(sampled <= true_nu * 1.05);
}

TEST_CASE("least squares optimum solves the normal equations") {
  const auto ls = least_squares_suite(8, 3, 0.2, 5);
  REQUIRE(ls.x_star_hint);
  std::vector<double> grad(3);
  ls.average_gradient(std::span<const double>(ls.x_star_hint->data(), 3), grad);
  for (double v : grad) CHECK(std::abs(v) < 1e-10);
  CHECK(ls.average_value(std::span<const double>(ls.x_star_hint->data(), 3)) ==
        doctest::Approx(*ls.f_star).epsilon(1e-12));
  std::vector<double> other{0.3, -0.2, 0.1};
  CHECK(ls.average_value(other) >= *ls.f_star);
}

TEST_CASE("multi-dimensional problems without closed form are unsupported by the oracle") {
  auto ls = least_squares_suite(4, 2, 0.1, 3);
  ls.analytic = false;
  ls.f_star.reset();
  try {
    global_optimum_oracle(ls);
    FAIL("expected UnsupportedDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedDimension);
  }
}
