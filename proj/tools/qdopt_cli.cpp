#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdopt/error.hpp"
#include "qdopt/harness.hpp"
#include "qdopt/parameters.hpp"
#include "qdopt/problems.hpp"

using namespace qdopt;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InfeasibleParameters: return 2;
    case ErrorCode::SaturationDetected: return 3;
    case ErrorCode::NonFiniteState: return 4;
    default: return 1;
  }
}

void print_summary(const RunResult& r) {
  const auto& last = r.records.back();
  const auto fit = tail_fit(r.records);
  std::cout << "s0 = " << num(r.s0) << "\n"
            << "iterations = " << last.k + 1 << "\n"
            << "final_lambda_norm = " << num(last.lambda_norm) << "\n"
            << "saturation_events = " << r.saturation_events << "\n"
            << "max_theta = " << num(r.max_theta) << "\n"
            << "bits_per_round = " << r.bits_per_round << "\n"
            << "tail_slope = " << num(fit.slope) << "\n"
            << "tail_r2 = " << num(fit.r2) << "\n";
}

int cmd_run(const std::string& config, const std::string& out, const std::string& plot) {
  const RunConfig cfg = load_config(config);
  const RunResult r = run(cfg);
  if (!out.empty()) export_csv(r.records, out);
  if (!plot.empty()) emit_plot_data(r.records, plot);
  print_summary(r);
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& levels, const std::string& prefix) {
  const RunConfig cfg = load_config(config);
  const auto specs = parse_levels(levels);
  const SweepResult sweep = sweep_levels(cfg, specs);
  std::cout << "levels,s0,iterations_to_threshold,final_lambda_norm,tail_slope,tail_r2,saturation_events\n";
  for (const auto& o : sweep.outcomes) {
    std::cout << o.level.levels << "," << num(o.level.s0) << ","
              << (o.iterations_to_threshold ? std::to_string(*o.iterations_to_threshold) : std::string("")) << ","
              << num(o.final_lambda) << "," << num(o.fit.slope) << "," << num(o.fit.r2) << ","
              << o.result.saturation_events << "\n";
    if (!prefix.empty()) export_csv(o.result.records, prefix + "_K" + std::to_string(o.level.levels) + ".csv");
  }
  std::cout << "final_ordered = " << (sweep.final_ordered ? "true" : "false") << "\n";
  return 0;
}

int cmd_certify(const std::string& algorithm, const std::string& config, bool json) {
  RunConfig cfg = load_config(config);
  if ((algorithm == "gt") != (cfg.algorithm == Algorithm::GradientTracking)) {
    throw Error(ErrorCode::ConfigError, "config describes a " + std::string(algorithm_name(cfg.algorithm)) + " run");
  }
  const Scenario sc = build_scenario(cfg);
  const auto [lf, nu] = problem_constants(sc, cfg.problem);
  Report report;
  std::vector<Violation> violations;
  if (cfg.algorithm == Algorithm::GradientTracking) {
    GtInputs in{lf, nu, cfg.gt->beta, cfg.gt->delta, cfg.mu, cfg.levels};
    const GtCertificate c = gt_analyze(in, *sc.spectrum);
    report = certificate_report(c);
    violations = c.violations;
  } else {
    PiInputs in;
    in.lipschitz = lf;
    in.pl = nu;
    in.xi = cfg.pi->xi;
    in.phi = cfg.pi->phi;
    in.sigma = cfg.pi->sigma;
    in.mu = cfg.mu;
    in.levels = cfg.levels;
    in.dimension = sc.problem->dim;
    const PiCertificate c = pi_analyze(in, *sc.spectrum);
    report = certificate_report(c);
    violations = c.violations;
  }
  if (json) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : report) j[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
    j["violations"] = nlohmann::json::array();
    for (const auto& v : violations) j["violations"].push_back({{"condition", v.condition}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& [k, v] : report) std::cout << k << " = " << num(v) << "\n";
    for (const auto& v : violations) std::cout << "violation = " << describe(v) << "\n";
  }
  return violations.empty() ? 0 : 2;
}

int cmd_verify(std::size_t samples, std::uint64_t seed, std::size_t graphs) {
  const LemmaCheck c = verify_lemmas(samples, seed, graphs);
  std::cout << "graphs = " << c.graphs << "\n"
            << "samples = " << c.samples << "\n"
            << "lmi_failures = " << c.lmi_failures << "\n"
            << "worst_slack = " << num(c.worst_slack) << "\n"
            << "power_failures = " << c.power_failures << "\n"
            << "worst_power_ratio = " << num(c.worst_power_ratio) << "\n";
  return c.lmi_failures + c.power_failures == 0 ? 0 : 2;
}

int cmd_oracle(const std::string& problem, std::size_t agents, std::size_t dimension, double ell2, std::uint64_t seed) {
  ProblemSpec spec;
  spec.name = problem;
  spec.dimension = dimension;
  spec.ell2 = ell2;
  spec.seed = seed;
  const ProblemSuite suite = build_problem(spec, agents);
  if (suite.f_star && suite.x_star_hint) {
    std::cout << "f_star = " << num(*suite.f_star) << "\n";
    for (std::size_t i = 0; i < suite.x_star_hint->size(); ++i) {
      std::cout << "x_star" << i << " = " << num((*suite.x_star_hint)[i]) << "\n";
    }
    return 0;
  }
  const OptimumEstimate opt = global_optimum_oracle(suite);
  std::cout << "f_star = " << num(opt.f_star) << "\n";
  for (std::size_t i = 0; i < opt.x_star.size(); ++i) std::cout << "x_star" << i << " = " << num(opt.x_star[i]) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized distributed optimization simulator"};
  app.require_subcommand(1);

  std::string config, out, plot, levels, prefix, algorithm, problem = "paper-suite";
  bool json = false;
  std::size_t samples = 500, graphs = 20, agents = 100, dimension = 1;
  std::uint64_t seed = 1;
  double ell2 = 0.0;

  auto* run_cmd = app.add_subcommand("run", "Run one configuration");
  run_cmd->add_option("--config", config, "Config file")->required();
  run_cmd->add_option("--out", out, "CSV output path");
  run_cmd->add_option("--plot", plot, "Two-column plot data path");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run one configuration at several quantization levels");
  sweep_cmd->add_option("--config", config, "Config file")->required();
  sweep_cmd->add_option("--levels", levels, "Pairs K:s0 separated by commas")->required();
  sweep_cmd->add_option("--out-prefix", prefix, "Write <prefix>_K<level>.csv per level");

  auto* cert_cmd = app.add_subcommand("certify", "Evaluate every certificate condition");
  cert_cmd->add_option("--algorithm", algorithm, "gt or pi")->required()->check(CLI::IsMember({"gt", "pi"}));
  cert_cmd->add_option("--config", config, "Config file")->required();
  cert_cmd->add_flag("--json", json, "Structured output");

  auto* verify_cmd = app.add_subcommand("verify-lemmas", "Sample certificates and check the contraction lemmas");
  verify_cmd->add_option("--samples", samples, "Samples per graph");
  verify_cmd->add_option("--seed", seed, "Seed");
  verify_cmd->add_option("--graphs", graphs, "Number of random graphs");

  auto* oracle_cmd = app.add_subcommand("oracle", "Print the global optimum of a problem");
  oracle_cmd->add_option("--problem", problem, "paper-suite, least-squares or quadratic");
  oracle_cmd->add_option("--agents", agents, "Number of agents");
  oracle_cmd->add_option("--dimension", dimension, "Decision dimension (least-squares)");
  oracle_cmd->add_option("--ell2", ell2, "Regularization (least-squares)");
  oracle_cmd->add_option("--seed", seed, "Problem seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run_cmd->parsed()) return cmd_run(config, out, plot);
    if (sweep_cmd->parsed()) return cmd_sweep(config, levels, prefix);
    if (cert_cmd->parsed()) return cmd_certify(algorithm, config, json);
    if (verify_cmd->parsed()) return cmd_verify(samples, seed, graphs);
    if (oracle_cmd->parsed()) return cmd_oracle(problem, agents, dimension, ell2, seed);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
