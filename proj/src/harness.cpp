#include "qdopt/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <sstream>

#include "qdopt/error.hpp"

namespace qdopt {

const char* algorithm_name(Algorithm a) { return a == Algorithm::GradientTracking ? "gt" : "pi"; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorCode::ConfigError, "key '" + key + "': expected true or false");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  RunConfig cfg;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("algorithm")) {
    if (*v == "gt") cfg.algorithm = Algorithm::GradientTracking;
    else if (*v == "pi") cfg.algorithm = Algorithm::ProportionalIntegral;
    else throw Error(ErrorCode::ConfigError, "algorithm must be gt or pi");
  }
  if (auto v = take("graph")) {
    if (v->rfind("random:", 0) == 0) {
      auto parts = split(v->substr(7), ',');
      if (parts.size() != 3) throw Error(ErrorCode::ConfigError, "graph = random:<n>,<p>,<seed>");
      cfg.graph.kind = GraphSource::Kind::Random;
      cfg.graph.n = to_uint("graph", parts[0]);
      cfg.graph.edge_prob = to_double("graph", parts[1]);
      cfg.graph.seed = to_uint("graph", parts[2]);
    } else if (v->rfind("file:", 0) == 0) {
      cfg.graph.kind = GraphSource::Kind::File;
      cfg.graph.path = trim(v->substr(5));
    } else {
      throw Error(ErrorCode::ConfigError, "graph must be random:<n>,<p>,<seed> or file:<path>");
    }
  }
  if (auto v = take("problem")) cfg.problem.name = *v;
  if (auto v = take("problem.dimension")) cfg.problem.dimension = to_uint("problem.dimension", *v);
  if (auto v = take("problem.ell2")) cfg.problem.ell2 = to_double("problem.ell2", *v);
  if (auto v = take("problem.seed")) cfg.problem.seed = to_uint("problem.seed", *v);
  if (auto v = take("problem.curvature")) {
    auto parts = split(*v, ',');
    if (parts.size() != 2) throw Error(ErrorCode::ConfigError, "problem.curvature = <lo>,<hi>");
    cfg.problem.curvature_lo = to_double("problem.curvature", parts[0]);
    cfg.problem.curvature_hi = to_double("problem.curvature", parts[1]);
  }
  if (auto v = take("problem.center_range")) cfg.problem.center_range = to_double("problem.center_range", *v);
  if (auto v = take("lipschitz")) cfg.problem.lipschitz = to_double("lipschitz", *v);
  if (auto v = take("pl_constant")) cfg.problem.pl_constant = to_double("pl_constant", *v);
  if (auto v = take("levels")) cfg.levels = static_cast<std::int64_t>(to_uint("levels", *v));
  if (auto v = take("s0")) {
    if (*v == "auto") cfg.s0.reset();
    else cfg.s0 = to_double("s0", *v);
  }
  if (auto v = take("mu")) cfg.mu = to_double("mu", *v);
  auto beta = take("beta"), delta = take("delta");
  auto xi = take("xi"), phi = take("phi"), sigma = take("sigma");
  if (beta || delta) {
    if (!beta || !delta) throw Error(ErrorCode::ConfigError, "gradient tracking needs both beta and delta");
    cfg.gt = GtGains{to_double("beta", *beta), to_double("delta", *delta)};
  }
  if (xi || phi || sigma) {
    if (!xi || !phi || !sigma) throw Error(ErrorCode::ConfigError, "proportional-integral needs xi, phi and sigma");
    cfg.pi = PiGains{to_double("xi", *xi), to_double("phi", *phi), to_double("sigma", *sigma)};
  }
  if (auto v = take("iterations")) cfg.iterations = to_uint("iterations", *v);
  if (auto v = take("x0")) {
    if (*v == "zeros") {
      cfg.x0.kind = InitialSpec::Kind::Zeros;
    } else if (v->rfind("uniform:", 0) == 0) {
      auto parts = split(v->substr(8), ',');
      if (parts.size() != 3) throw Error(ErrorCode::ConfigError, "x0 = uniform:<lo>,<hi>,<seed>");
      cfg.x0.kind = InitialSpec::Kind::Uniform;
      cfg.x0.lo = to_double("x0", parts[0]);
      cfg.x0.hi = to_double("x0", parts[1]);
      cfg.x0.seed = to_uint("x0", parts[2]);
    } else {
      throw Error(ErrorCode::ConfigError, "x0 must be zeros or uniform:<lo>,<hi>,<seed>");
    }
  }
  if (auto v = take("stride")) cfg.stride = *v == "default" ? 0 : to_uint("stride", *v);
  if (auto v = take("strict_saturation")) cfg.strict_saturation = to_bool("strict_saturation", *v);
  if (auto v = take("bit_count")) {
    if (*v == "nominal") cfg.bit_count = BitCount::Nominal;
    else if (*v == "strict") cfg.bit_count = BitCount::Strict;
    else throw Error(ErrorCode::ConfigError, "bit_count must be nominal or strict");
  }
  if (auto v = take("f_star")) {
    if (*v == "auto") cfg.f_star.reset();
    else cfg.f_star = to_double("f_star", *v);
  }
  if (auto v = take("threshold")) cfg.threshold = to_double("threshold", *v);
  if (!kv.empty()) throw Error(ErrorCode::ConfigError, "unknown key '" + kv.begin()->first + "'");
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  const bool gt = cfg.algorithm == Algorithm::GradientTracking;
  if (gt && (!cfg.gt || cfg.pi)) throw Error(ErrorCode::ConfigError, "gt runs need exactly the beta/delta gain set");
  if (!gt && (!cfg.pi || cfg.gt)) throw Error(ErrorCode::ConfigError, "pi runs need exactly the xi/phi/sigma gain set");
  if (cfg.levels < 1) throw Error(ErrorCode::ConfigError, "levels must be >= 1");
  if (cfg.s0 && !(*cfg.s0 > 0.0)) throw Error(ErrorCode::ConfigError, "s0 must be positive");
  if (!(cfg.mu > 0.0 && cfg.mu < 1.0)) throw Error(ErrorCode::ConfigError, "mu must lie in (0, 1)");
  if (cfg.iterations < 1) throw Error(ErrorCode::ConfigError, "iterations must be >= 1");
  if (cfg.problem.name != "paper-suite" && cfg.problem.name != "least-squares" && cfg.problem.name != "quadratic") {
    throw Error(ErrorCode::ConfigError, "unknown problem '" + cfg.problem.name + "'");
  }
  if (cfg.x0.kind == InitialSpec::Kind::Uniform && !(cfg.x0.hi >= cfg.x0.lo)) {
    throw Error(ErrorCode::ConfigError, "x0 range is empty");
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "algorithm = " << algorithm_name(cfg.algorithm) << "\n";
  if (cfg.graph.kind == GraphSource::Kind::Random) {
    out << "graph = random:" << cfg.graph.n << "," << num(cfg.graph.edge_prob) << "," << cfg.graph.seed << "\n";
  } else {
    out << "graph = file:" << cfg.graph.path << "\n";
  }
  out << "problem = " << cfg.problem.name << "\n";
  out << "problem.dimension = " << cfg.problem.dimension << "\n";
  out << "problem.ell2 = " << num(cfg.problem.ell2) << "\n";
  out << "problem.seed = " << cfg.problem.seed << "\n";
  out << "problem.curvature = " << num(cfg.problem.curvature_lo) << "," << num(cfg.problem.curvature_hi) << "\n";
  out << "problem.center_range = " << num(cfg.problem.center_range) << "\n";
  if (cfg.problem.lipschitz) out << "lipschitz = " << num(*cfg.problem.lipschitz) << "\n";
  if (cfg.problem.pl_constant) out << "pl_constant = " << num(*cfg.problem.pl_constant) << "\n";
  out << "levels = " << cfg.levels << "\n";
  out << "s0 = " << (cfg.s0 ? num(*cfg.s0) : std::string("auto")) << "\n";
  out << "mu = " << num(cfg.mu) << "\n";
  if (cfg.gt) out << "beta = " << num(cfg.gt->beta) << "\ndelta = " << num(cfg.gt->delta) << "\n";
  if (cfg.pi) {
    out << "xi = " << num(cfg.pi->xi) << "\nphi = " << num(cfg.pi->phi) << "\nsigma = " << num(cfg.pi->sigma) << "\n";
  }
  out << "iterations = " << cfg.iterations << "\n";
  if (cfg.x0.kind == InitialSpec::Kind::Zeros) {
    out << "x0 = zeros\n";
  } else {
    out << "x0 = uniform:" << num(cfg.x0.lo) << "," << num(cfg.x0.hi) << "," << cfg.x0.seed << "\n";
  }
  out << "stride = " << (cfg.stride == 0 ? std::string("default") : std::to_string(cfg.stride)) << "\n";
  out << "strict_saturation = " << (cfg.strict_saturation ? "true" : "false") << "\n";
  out << "bit_count = " << (cfg.bit_count == BitCount::Strict ? "strict" : "nominal") << "\n";
  out << "f_star = " << (cfg.f_star ? num(*cfg.f_star) : std::string("auto")) << "\n";
  out << "threshold = " << num(cfg.threshold) << "\n";
  return out.str();
}

ProblemSuite build_problem(const ProblemSpec& spec, std::size_t agents) {
  if (spec.name == "paper-suite") return paper_suite(agents);
  if (spec.name == "least-squares") return least_squares_suite(agents, spec.dimension, spec.ell2, spec.seed);
  if (spec.name == "quadratic") {
    return random_quadratic_suite(agents, spec.seed, spec.curvature_lo, spec.curvature_hi, spec.center_range);
  }
  throw Error(ErrorCode::ConfigError, "unknown problem '" + spec.name + "'");
}

AgentMatrix initial_state(const InitialSpec& spec, std::size_t agents, std::size_t dimension) {
  AgentMatrix x = AgentMatrix::Zero(static_cast<Eigen::Index>(agents), static_cast<Eigen::Index>(dimension));
  if (spec.kind == InitialSpec::Kind::Uniform) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> dist(spec.lo, spec.hi);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);
  }
  return x;
}

Scenario build_scenario(const RunConfig& cfg) {
  validate(cfg);
  Scenario sc;
  auto graph = cfg.graph.kind == GraphSource::Kind::Random
                   ? random_connected_graph(cfg.graph.n, cfg.graph.edge_prob, cfg.graph.seed)
                   : load_graph(cfg.graph.path);
  sc.graph = std::make_shared<const UndirectedGraph>(std::move(graph));
  sc.spectrum = std::make_shared<const LaplacianSpectrum>(spectrum(*sc.graph));
  ProblemSuite problem = build_problem(cfg.problem, sc.graph->size());
  if (cfg.f_star) {
    sc.f_star = *cfg.f_star;
  } else if (problem.f_star) {
    sc.f_star = *problem.f_star;
  } else {
    const auto opt = global_optimum_oracle(problem);
    problem.f_star = opt.f_star;
    problem.x_star_hint = opt.x_star;
    sc.f_star = opt.f_star;
  }
  sc.problem = std::make_shared<const ProblemSuite>(std::move(problem));
  sc.x0 = initial_state(cfg.x0, sc.graph->size(), sc.problem->dim);
  return sc;
}

std::pair<double, double> problem_constants(const Scenario& scenario, const ProblemSpec& spec) {
  const auto& p = *scenario.problem;
  const Box box{-10.0, 10.0};
  double lf = spec.lipschitz ? *spec.lipschitz
              : p.smoothness ? *p.smoothness
                             : estimate_smoothness(p, box, 20000, 1);
  double nu = spec.pl_constant ? *spec.pl_constant
              : p.pl_constant ? *p.pl_constant
                              : estimate_pl_constant(p, scenario.f_star, box, 20000, 2);
  return {lf, nu};
}

double auto_s0(const Scenario& sc, const RunConfig& cfg) {
  const auto [lf, nu] = problem_constants(sc, cfg.problem);
  S0Floor floor;
  if (cfg.algorithm == Algorithm::GradientTracking) {
    GtInputs in{lf, nu, cfg.gt->beta, cfg.gt->delta, cfg.mu, cfg.levels};
    const GtCertificate cert = gt_analyze(in, *sc.spectrum);
    if (!cert.feasible()) {
      throw Error(ErrorCode::ConfigError, "automatic s0 needs certified parameters: " +
                                              (cert.violations.empty() ? std::string("unknown")
                                                                       : describe(cert.violations.front())));
    }
    floor = gt_s0_floor(cert, *sc.problem, sc.x0, sc.f_star);
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
    const PiCertificate cert = pi_analyze(in, *sc.spectrum);
    if (!cert.feasible()) {
      throw Error(ErrorCode::ConfigError, "automatic s0 needs certified parameters: " +
                                              (cert.violations.empty() ? std::string("unknown")
                                                                       : describe(cert.violations.front())));
    }
    const AgentMatrix u0 = AgentMatrix::Zero(sc.x0.rows(), sc.x0.cols());
    floor = pi_s0_floor(cert, *sc.spectrum, *sc.problem, sc.x0, u0, sc.f_star);
  }
  return floor.value > 0.0 ? floor.value : 1.0;
}

namespace {

bool recorded(std::size_t k, std::size_t stride) {
  if (stride == 0) return k <= 1000 || k % 10 == 0;
  return k % stride == 0;
}

template <typename State, typename Step, typename Hook>
RunResult drive(State& state, const Scenario& sc, const RunConfig& cfg, std::uint64_t bits_per_round, Step step,
                const Hook& hook, bool tracking) {
  RunResult result;
  result.s0 = state.codec.s0;
  result.bits_per_round = bits_per_round;
  if (hook) hook(state);
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < cfg.iterations; ++k) {
    const LambdaMetric metric = lambda_metric(state, sc.f_star);
    const double s_k = state.scale();
    const SaturationReport report = step(state);
    bits += bits_per_round;
    if (report.saturated) ++result.saturation_events;
    result.max_theta = std::max(result.max_theta, report.theta_x_inf);
    if (tracking) result.max_theta = std::max(result.max_theta, report.theta_u_inf);
    if (recorded(k, cfg.stride) || k + 1 == cfg.iterations) {
      RunRecord r;
      r.k = k;
      r.lambda_norm = metric.lambda_norm;
      r.consensus_err = metric.consensus_err;
      r.opt_gap = metric.opt_gap;
      r.theta_x_inf = report.theta_x_inf;
      if (tracking) {
        r.tracking_err = metric.tracking_err;
        r.theta_u_inf = report.theta_u_inf;
      }
      r.s_k = s_k;
      r.bits_cumulative = bits;
      r.saturated = report.saturated;
      result.records.push_back(r);
    }
    if (hook) hook(state);
  }
  return result;
}

}  // namespace

RunResult run(const Scenario& sc, const RunConfig& cfg, const RunHooks& hooks) {
  validate(cfg);
  CodecConfig codec{cfg.levels, cfg.s0 ? *cfg.s0 : auto_s0(sc, cfg), cfg.mu, cfg.strict_saturation};
  const std::uint64_t per_variable = static_cast<std::uint64_t>(sc.graph->size()) * sc.problem->dim *
                                     static_cast<std::uint64_t>(bits_for_level(cfg.levels, cfg.bit_count));
  if (cfg.algorithm == Algorithm::GradientTracking) {
    GtState state = gt_init(sc.graph, sc.problem, sc.x0, codec, *cfg.gt);
    return drive(state, sc, cfg, 2 * per_variable, gt_step, hooks.on_gt, true);
  }
  const AgentMatrix u0 = AgentMatrix::Zero(sc.x0.rows(), sc.x0.cols());
  PiState state = pi_init(sc.graph, sc.problem, sc.x0, u0, codec, *cfg.pi);
  return drive(state, sc, cfg, per_variable, pi_step, hooks.on_pi, false);
}

RunResult run(const RunConfig& cfg) { return run(build_scenario(cfg), cfg); }

LogLinearFit tail_fit(std::span<const RunRecord> records, double floor, double fraction) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    if (r.lambda_norm > floor) pts.emplace_back(static_cast<double>(r.k), std::log(r.lambda_norm));
  }
  const std::size_t keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pts.size())));
  LogLinearFit fit;
  if (keep < 2) return fit;
  std::vector<std::pair<double, double>> tail(pts.end() - static_cast<std::ptrdiff_t>(keep), pts.end());
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : tail) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(keep);
  my /= static_cast<double>(keep);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto [x, y] : tail) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  fit.points = keep;
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

std::vector<LevelSpec> parse_levels(const std::string& text) {
  std::vector<LevelSpec> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    auto parts = split(item, ':');
    if (parts.size() != 2) throw Error(ErrorCode::ConfigError, "levels must look like 1:10.198,10:1.4569");
    out.push_back({static_cast<std::int64_t>(to_uint("levels", parts[0])), to_double("levels", parts[1])});
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, "no levels given");
  return out;
}

SweepResult sweep_levels(const RunConfig& base, std::span<const LevelSpec> levels, bool parallel) {
  if (levels.empty()) throw Error(ErrorCode::ConfigError, "sweep needs at least one level");
  const Scenario sc = build_scenario(base);
  auto one = [&](LevelSpec level) {
    RunConfig cfg = base;
    cfg.levels = level.levels;
    cfg.s0 = level.s0;
    LevelOutcome out;
    out.level = level;
    out.result = run(sc, cfg);
    for (const auto& r : out.result.records) {
      if (r.lambda_norm <= cfg.threshold) {
        out.iterations_to_threshold = r.k;
        break;
      }
    }
    out.final_lambda = out.result.records.back().lambda_norm;
    out.fit = tail_fit(out.result.records);
    return out;
  };
  SweepResult sweep;
  if (parallel && levels.size() > 1) {
    std::vector<std::future<LevelOutcome>> jobs;
    for (const auto& level : levels) jobs.push_back(std::async(std::launch::async, one, level));
    for (auto& job : jobs) sweep.outcomes.push_back(job.get());
  } else {
    for (const auto& level : levels) sweep.outcomes.push_back(one(level));
  }
  std::vector<const LevelOutcome*> sorted;
  for (const auto& o : sweep.outcomes) sorted.push_back(&o);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const LevelOutcome* a, const LevelOutcome* b) { return a->level.levels < b->level.levels; });
  sweep.final_ordered = true;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->final_lambda > sorted[i - 1]->final_lambda) sweep.final_ordered = false;
  }
  return sweep;
}

std::string format_csv(std::span<const RunRecord> records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.k) + "," + num(r.lambda_norm) + "," + num(r.consensus_err) + "," +
           (r.tracking_err ? num(*r.tracking_err) : "") + "," + num(r.opt_gap) + "," + num(r.theta_x_inf) + "," +
           (r.theta_u_inf ? num(*r.theta_u_inf) : "") + "," + num(r.s_k) + "," + std::to_string(r.bits_cumulative) +
           "," + (r.saturated ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<RunRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) throw Error(ErrorCode::IoError, "unexpected CSV header");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::string item;
    std::istringstream row(line);
    while (std::getline(row, item, ',')) f.push_back(trim(item));
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 10) throw Error(ErrorCode::IoError, "CSV row has " + std::to_string(f.size()) + " fields");
    RunRecord r;
    r.k = to_uint("k", f[0]);
    r.lambda_norm = to_double("lambda_norm", f[1]);
    r.consensus_err = to_double("consensus_err", f[2]);
    if (!f[3].empty()) r.tracking_err = to_double("tracking_err", f[3]);
    r.opt_gap = to_double("opt_gap", f[4]);
    r.theta_x_inf = to_double("theta_x_inf", f[5]);
    if (!f[6].empty()) r.theta_u_inf = to_double("theta_u_inf", f[6]);
    r.s_k = to_double("s_k", f[7]);
    r.bits_cumulative = to_uint("bits_cumulative", f[8]);
    r.saturated = f[9] == "1";
    out.push_back(r);
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace

void export_csv(std::span<const RunRecord> records, const std::string& path) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "no records to export");
  write_file(path, format_csv(records));
}

std::string format_plot_data(std::span<const RunRecord> records) {
  std::string out = "# k lambda_norm\n";
  for (const auto& r : records) out += std::to_string(r.k) + " " + num(r.lambda_norm) + "\n";
  return out;
}

void emit_plot_data(std::span<const RunRecord> records, const std::string& path) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "no records to export");
  write_file(path, format_plot_data(records));
}

}  // namespace qdopt
