#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdopt/graph.hpp"
#include "qdopt/optimizer.hpp"
#include "qdopt/parameters.hpp"
#include "qdopt/problems.hpp"
#include "qdopt/quantization.hpp"

namespace qdopt {

enum class Algorithm { GradientTracking, ProportionalIntegral };

const char* algorithm_name(Algorithm a);

struct GraphSource {
  enum class Kind { Random, File };
  Kind kind = Kind::Random;
  std::size_t n = 100;
  double edge_prob = 0.05;
  std::uint64_t seed = 42;
  std::string path;
};

struct ProblemSpec {
  std::string name = "paper-suite";  // paper-suite | least-squares | quadratic
  std::size_t dimension = 1;         // least-squares only
  double ell2 = 0.0;                 // least-squares only
  std::uint64_t seed = 7;
  double curvature_lo = 0.5;  // quadratic only
  double curvature_hi = 2.0;
  double center_range = 2.0;
  std::optional<double> lipschitz;  // overrides for certification
  std::optional<double> pl_constant;
};

struct InitialSpec {
  enum class Kind { Zeros, Uniform };
  Kind kind = Kind::Uniform;
  double lo = -5.0;
  double hi = 5.0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::GradientTracking;
  GraphSource graph;
  ProblemSpec problem;
  std::int64_t levels = 10;
  std::optional<double> s0;  // empty: smallest admissible value from the certificate floor
  double mu = 0.999;
  std::optional<GtGains> gt;
  std::optional<PiGains> pi;
  std::size_t iterations = 5000;
  InitialSpec x0;
  std::size_t stride = 0;  // 0: every round up to 1000, then every 10th
  bool strict_saturation = false;
  BitCount bit_count = BitCount::Nominal;
  std::optional<double> f_star;
  double threshold = 1e-6;  // for iterations-to-threshold in sweeps
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& cfg);
void validate(const RunConfig& cfg);

struct Scenario {
  std::shared_ptr<const UndirectedGraph> graph;
  std::shared_ptr<const LaplacianSpectrum> spectrum;
  std::shared_ptr<const ProblemSuite> problem;
  double f_star = 0.0;
  AgentMatrix x0;
};

Scenario build_scenario(const RunConfig& cfg);
ProblemSuite build_problem(const ProblemSpec& spec, std::size_t agents);
AgentMatrix initial_state(const InitialSpec& spec, std::size_t agents, std::size_t dimension);

// L_f and nu for certification: config overrides, then analytic values, then sampled estimates.
std::pair<double, double> problem_constants(const Scenario& scenario, const ProblemSpec& spec);

struct RunRecord {
  std::size_t k = 0;
  double lambda_norm = 0.0;
  double consensus_err = 0.0;
  std::optional<double> tracking_err;
  double opt_gap = 0.0;
  double theta_x_inf = 0.0;
  std::optional<double> theta_u_inf;
  double s_k = 0.0;
  std::uint64_t bits_cumulative = 0;
  bool saturated = false;

  bool operator==(const RunRecord&) const = default;
};

struct RunResult {
  std::vector<RunRecord> records;
  std::size_t saturation_events = 0;
  double max_theta = 0.0;
  double s0 = 0.0;
  std::uint64_t bits_per_round = 0;
};

struct RunHooks {
  std::function<void(const GtState&)> on_gt;  // called with the initial state and after every round
  std::function<void(const PiState&)> on_pi;
};

RunResult run(const RunConfig& cfg);
RunResult run(const Scenario& scenario, const RunConfig& cfg, const RunHooks& hooks = {});

// s(0) used when the config leaves it empty.
double auto_s0(const Scenario& scenario, const RunConfig& cfg);

struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

// Least-squares line through log(lambda_norm) over the last `fraction` of points above `floor`.
LogLinearFit tail_fit(std::span<const RunRecord> records, double floor = 1e-14, double fraction = 0.5);

struct LevelSpec {
  std::int64_t levels = 1;
  double s0 = 1.0;
};

std::vector<LevelSpec> parse_levels(const std::string& text);

struct LevelOutcome {
  LevelSpec level;
  RunResult result;
  std::optional<std::size_t> iterations_to_threshold;
  double final_lambda = 0.0;
  LogLinearFit fit;
};

struct SweepResult {
  std::vector<LevelOutcome> outcomes;
  bool final_ordered = false;  // final residual nonincreasing in the level
};

SweepResult sweep_levels(const RunConfig& base, std::span<const LevelSpec> levels, bool parallel = true);

inline constexpr const char* kCsvHeader =
    "k,lambda_norm,consensus_err,tracking_err,opt_gap,theta_x_inf,theta_u_inf,s_k,bits_cumulative,saturated";

std::string format_csv(std::span<const RunRecord> records);
std::vector<RunRecord> parse_csv(const std::string& text);
void export_csv(std::span<const RunRecord> records, const std::string& path);
std::string format_plot_data(std::span<const RunRecord> records);
void emit_plot_data(std::span<const RunRecord> records, const std::string& path);

}  // namespace qdopt
