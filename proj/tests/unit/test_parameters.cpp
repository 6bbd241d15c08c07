#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "golden.hpp"
#include "qdopt/error.hpp"
#include "qdopt/parameters.hpp"

using namespace qdopt;

namespace {

LaplacianSpectrum path3() {
  const std::vector<Edge> e{{0, 1, 1.0}, {1, 2, 1.0}};
  return spectrum(build_graph(3, e));
}

void check_close(double actual, double expected, double rel = 1e-9) {
  CHECK(actual == doctest::Approx(expected).epsilon(rel).scale(1e-300));
}

GtInputs gt_inputs(const nlohmann::json& g) {
  const auto& in = g["inputs"];
  GtInputs out;
  out.lipschitz = in["lipschitz"];
  out.pl = in["pl"];
  out.beta = in["beta"];
  out.delta = in["delta"];
  out.mu = in["mu"];
  out.levels = in["levels"];
  return out;
}

PiInputs pi_inputs(const nlohmann::json& g) {
  const auto& in = g["inputs"];
  PiInputs out;
  out.lipschitz = in["lipschitz"];
  out.pl = in["pl"];
  out.xi = in["xi"];
  out.phi = in["phi"];
  out.sigma = in["sigma"];
  out.mu = in["mu"];
  out.levels = in["levels"];
  out.dimension = in["dimension"];
  return out;
}

}  // namespace

TEST_CASE("gradient tracking certificate matches reference values") {
  const auto g = load_golden("gt_path3.json");
  const auto c = gt_analyze(gt_inputs(g), path3());
  check_close(c.rho_l, g["rho_l"]);
  check_close(c.max_degree, g["max_degree"]);
  check_close(c.varrho, g["varrho"]);
  check_close(c.c1, g["c1"]);
  check_close(c.c2, g["c2"]);
  check_close(c.c3, g["c3"]);
  check_close(c.c4, g["c4"]);
  check_close(c.delta_max, g["delta_max"]);
  check_close(c.sigma1, g["sigma1"]);
  for (int i = 2; i <= 8; ++i) check_close(c.sigma[i], g["sigma" + std::to_string(i)]);
  for (int i = 0; i < 7; ++i) check_close(c.chi[i], g["chi"][i]);
  check_close(c.iota, g["iota"]);
  check_close(c.rho_bar, g["rho_bar"]);
  for (int i = 0; i < 3; ++i) check_close(c.theta(i), g["theta"][i]);
  CHECK(c.lmi_slack.minCoeff() >= -1e-12);
  check_close(c.perron.rho, g["rho_phi"], 1e-10);
  check_close(c.h, g["h"], 1e-7);
  check_close(c.envelope, g["envelope"], 1e-7);
  check_close(c.vartheta1, g["vartheta1"], 1e-7);
  check_close(c.vartheta2, g["vartheta2"], 1e-7);
  // The level-1 request is below the threshold, so only that condition fails.
  REQUIRE(c.violations.size() == 1);
  CHECK(c.violations[0].condition.rfind("K >=", 0) == 0);
}

TEST_CASE("proportional-integral certificate matches reference values") {
  const auto g = load_golden("pi_path3.json");
  const auto c = pi_analyze(pi_inputs(g), path3());
  for (const char* key : {"kappa1", "kappa2", "kappa3", "epsilon", "eta1", "eta2", "gamma1", "gamma2", "sigma_max"}) {
    INFO(key);
    double actual = 0.0;
    const std::string k = key;
    if (k == "kappa1") actual = c.kappa1;
    if (k == "kappa2") actual = c.kappa2;
    if (k == "kappa3") actual = c.kappa3;
    if (k == "epsilon") actual = c.epsilon;
    if (k == "eta1") actual = c.eta1;
    if (k == "eta2") actual = c.eta2;
    if (k == "gamma1") actual = c.gamma1;
    if (k == "gamma2") actual = c.gamma2;
    if (k == "sigma_max") actual = c.sigma_max;
    check_close(actual, g[key]);
  }
  for (int i = 0; i < 10; ++i) {
    if (g["eps"][i].is_null()) continue;
    INFO("eps index " << i);
    check_close(c.eps[i], g["eps"][i], 1e-7);
  }
  for (int i = 0; i < 4; ++i) check_close(c.alpha[i], g["alpha"][i], 1e-9);
  check_close(c.omega, g["omega"], 1e-7);
  CHECK(c.feasible());
  CHECK(c.levels_min_int == 1);
}

TEST_CASE("step-size bounds are open") {
  const auto s = path3();
  GtInputs in;
  in.lipschitz = 1.0;
  in.pl = 0.5;
  in.beta = 1.0 / s.rho;
  in.delta = 1e-5;
  in.mu = 0.99999;
  const auto c = gt_analyze(in, s);
  REQUIRE_FALSE(c.feasible());
  CHECK(c.violations[0].condition.find("beta") != std::string::npos);
  CHECK_THROWS_AS(gt_certify(in, s), Error);
  in.beta = 0.1;
  in.delta = gt_delta_max(1.0, 0.5, s, 0.1);
  CHECK(gt_analyze(in, s).violations[0].condition.find("delta") != std::string::npos);
}

TEST_CASE("integral gain bound rejects large sigma") {
  const auto s = path3();
  PiInputs in = pi_inputs_for(1.0, 0.5, s, 1, 1e-9, 0.99999999, 1);
  in.sigma = 2.0 / in.pl;
  const auto c = pi_analyze(in, s);
  REQUIRE_FALSE(c.feasible());
  bool named = false;
  for (const auto& v : c.violations) named |= v.condition.rfind("sigma in", 0) == 0;
  CHECK(named);
}

TEST_CASE("rate constant stays inside the unit interval for admissible inputs") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto s = spectrum(random_connected_graph(6, 0.5, seed));
    for (double frac : {0.9, 0.5, 0.1, 1e-3}) {
      PiInputs probe = pi_inputs_for(1.0, 0.5, s, 1, 1e-12, 0.5, 1);
      const double smax = pi_analyze(probe, s).sigma_max;
      const PiInputs in = pi_inputs_for(1.0, 0.5, s, 1, frac * smax, 0.5, 1);
      const auto c = pi_analyze(in, s);
      CHECK(c.eps[2] > 0.0);
      CHECK(c.eps[2] < 1.0);
      CHECK(c.eps[2] >= 1.0 - in.sigma * in.pl / 2.0);
    }
  }
}

TEST_CASE("contraction inequality on sampled certificates") {
  const auto check = verify_lemmas(40, 17, 5, 12, 200);
  CHECK(check.samples == 200);
  CHECK(check.lmi_failures == 0);
  CHECK(check.power_failures == 0);
  CHECK(check.worst_slack >= -1e-12);
}

TEST_CASE("Perron structure of certified matrices") {
  const auto s = path3();
  for (double beta : {0.2, 0.1, 0.01}) {
    for (double frac : {0.9, 0.3, 0.01}) {
      GtInputs in;
      in.lipschitz = 1.0;
      in.pl = 0.5;
      in.beta = beta;
      in.delta = frac * gt_delta_max(1.0, 0.5, s, beta);
      in.mu = 0.9999999;
      const auto c = gt_analyze(in, s);
      const Eigen::Matrix3d sq = (Eigen::Matrix3d::Identity() + c.phi) * (Eigen::Matrix3d::Identity() + c.phi);
      CHECK(sq.minCoeff() > 0.0);
      CHECK(c.perron.zeta.minCoeff() > 0.0);
      CHECK(c.perron.rho <= c.rho_bar + 1e-12);
      CHECK(c.h >= 3.0);
      CHECK(matrix_power_bound(c.phi, c.h, c.perron.rho, 0) <= 1.0);
      CHECK(c.phi.jacobiSvd().singularValues()(0) <= c.h * c.perron.rho);
    }
  }
}

TEST_CASE("power iteration on a known matrix") {
  Eigen::Matrix3d m;
  m << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  const auto r = perron(m);
  CHECK(r.converged);
  CHECK(r.rho == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.rho_low <= r.rho);
  CHECK(r.zeta(0) == doctest::Approx(r.zeta(2)).epsilon(1e-10));
}

TEST_CASE("thresholds do not increase with mu") {
  const auto s = path3();
  GtInputs in;
  in.lipschitz = 1.0;
  in.pl = 0.5;
  in.beta = 0.1;
  in.delta = 0.5 * gt_delta_max(1.0, 0.5, s, 0.1);
  const double lo = std::sqrt(gt_analyze(in, s).rho_bar);
  double prev1 = INFINITY, prev2 = INFINITY;
  for (int i = 1; i < 40; ++i) {
    in.mu = lo + (1.0 - lo) * i / 40.0;
    const auto c = gt_analyze(in, s);
    CHECK(c.vartheta1 <= prev1);
    CHECK(c.vartheta2 <= prev2);
    prev1 = c.vartheta1;
    prev2 = c.vartheta2;
  }
}

TEST_CASE("initial scale floors") {
  const auto s = path3();
  GtInputs in;
  in.beta = 0.1;
  in.delta = 0.5 * gt_delta_max(1.0, 0.5, s, 0.1);
  in.mu = 0.99999;
  in.levels = 10;
  const auto c = gt_analyze(in, s);
  const auto zero = gt_s0_floor_terms(c, 0.0, 0.0, 0.0, 0.0);
  CHECK(zero.value == 0.0);
  const auto a = gt_s0_floor_terms(c, 1.5, 0.0, 0.0, 0.0);
  const auto b = gt_s0_floor_terms(c, 3.0, 0.0, 0.0, 0.0);
  CHECK(b.terms[0] == doctest::Approx(2.0 * a.terms[0]));

  // The three reference initial scales share one numerator: 2C / (2K + 1) with C close to 15.297.
  const double reference[] = {10.198, 1.4569, 0.1522};
  const std::int64_t levels[] = {1, 10, 100};
  for (int i = 0; i < 3; ++i) {
    GtInputs li = in;
    li.levels = levels[i];
    const auto t = gt_s0_floor_terms(gt_analyze(li, s), 15.297, 0.0, 0.0, 0.0);
    CHECK(t.terms[0] == doctest::Approx(reference[i]).epsilon(1e-3));
  }

  PiInputs pin = pi_inputs_for(1.0, 0.5, s, 1, 1e-9, 0.9999999999, 1);
  const auto pc = pi_analyze(pin, s);
  const auto pz = pi_s0_floor_terms(pc, 0.0, 0.0, 0.0, 0.0);
  CHECK(pz.value == 0.0);
}

TEST_CASE("feasibility searches re-certify") {
  const auto s = path3();
  const PiPoint p = pi_feasible_low_rate(1.0, 0.5, s, 1, {}, 1);
  PiInputs in = pi_inputs_for(1.0, 0.5, s, 1, p.sigma, p.mu, 1);
  const auto c = pi_certify(in, s);
  CHECK(c.omega <= 1.5);
  CHECK(c.levels_min <= 1.0);

  // Gradient tracking needs millions of levels on this graph; a one-level request is reported as not found.
  const auto [threshold, point] = gt_min_threshold(1.0, 0.5, s);
  CHECK(threshold > 1.0);
  try {
    gt_feasible_low_rate(1.0, 0.5, s, 1);
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
  }
  const auto big = static_cast<std::int64_t>(std::ceil(threshold * 1.01)) + 1;
  const GtPoint q = gt_feasible_low_rate(1.0, 0.5, s, big);
  GtInputs gin;
  gin.beta = q.beta;
  gin.delta = q.delta;
  gin.mu = q.mu;
  gin.levels = big;
  CHECK(gt_certify(gin, s).feasible());
}

TEST_CASE("certificate reports list every field once") {
  const auto s = path3();
  GtInputs in;
  in.beta = 0.1;
  in.delta = 1e-4;
  in.mu = 0.99999;
  const auto report = certificate_report(gt_analyze(in, s));
  std::set<std::string> names;
  for (const auto& [k, v] : report) CHECK(names.insert(k).second);
  CHECK(names.count("vartheta1") == 1);
  CHECK(names.count("sigma9") == 0);
}
