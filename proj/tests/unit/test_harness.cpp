#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdopt/error.hpp"
#include "qdopt/harness.hpp"

using namespace qdopt;

namespace {

const char* kGtConfig = R"(# small gradient tracking run
algorithm = gt
graph = random:20,0.3,3
problem = paper-suite
problem.dimension = 1
levels = 10
s0 = 4.0
mu = 0.999
beta = 0.05
delta = 0.05
iterations = 300
x0 = uniform:-5,5,1
)";

const char* kPiConfig = R"(algorithm = pi
graph = random:10,0.4,5
problem = quadratic
problem.seed = 2
levels = 10
s0 = 4.0
mu = 0.999
xi = 0.00235
phi = 0.002
sigma = 0.001
iterations = 50
)";

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

ErrorCode config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("config parsing and normalization") {
  const auto cfg = parse_config(kGtConfig);
  CHECK(cfg.algorithm == Algorithm::GradientTracking);
  CHECK(cfg.graph.n == 20);
  CHECK(cfg.graph.seed == 3);
  REQUIRE(cfg.gt);
  CHECK(cfg.gt->beta == 0.05);
  CHECK(cfg.s0 == 4.0);
  CHECK(cfg.x0.kind == InitialSpec::Kind::Uniform);
  const auto again = parse_config(format_config(cfg));
  CHECK(format_config(again) == format_config(cfg));
}

TEST_CASE("config errors") {
  CHECK(config_error("algorithm = gt\nxi = 1\nphi = 1\nsigma = 1\n") == ErrorCode::ConfigError);
  CHECK(config_error("algorithm = gt\nbeta = 0.1\ndelta = 0.1\nxi = 1\nphi = 1\nsigma = 1\n") ==
        ErrorCode::ConfigError);
  CHECK(config_error("algorithm = gt\nbeta = 0.1\n") == ErrorCode::ConfigError);
  CHECK(config_error("algorithm = gt\nbeta = 0.1\ndelta = 0.1\ncolour = red\n") == ErrorCode::ConfigError);
  CHECK(config_error("algorithm = gt\nbeta = 0.1\ndelta = 0.1\nmu = 1.5\n") == ErrorCode::ConfigError);
  CHECK(config_error("algorithm = gt\nbeta = abc\ndelta = 0.1\n") == ErrorCode::ConfigError);
  CHECK(config_error("algorithm = gt\nbeta = 0.1\ndelta = 0.1\nbeta = 0.2\n") == ErrorCode::ConfigError);
}

TEST_CASE("fixed point runs stay at zero") {
  RunConfig cfg;
  cfg.algorithm = Algorithm::GradientTracking;
  cfg.graph = {GraphSource::Kind::Random, 6, 0.6, 1, ""};
  cfg.problem.name = "quadratic";
  cfg.problem.curvature_lo = cfg.problem.curvature_hi = 1.0;
  cfg.problem.center_range = 0.0;
  cfg.x0.kind = InitialSpec::Kind::Zeros;
  cfg.gt = GtGains{0.1, 0.1};
  cfg.s0 = 1.0;
  cfg.iterations = 50;
  const auto r = run(cfg);
  REQUIRE(r.records.size() == 50);
  for (const auto& rec : r.records) CHECK(rec.lambda_norm == 0.0);
}

TEST_CASE("runs are deterministic and records follow the schema") {
  const auto cfg = parse_config(kGtConfig);
  const auto a = run(cfg);
  const auto b = run(cfg);
  CHECK(format_csv(a.records) == format_csv(b.records));
  REQUIRE(a.records.size() == 300);
  CHECK(a.records.front().k == 0);
  CHECK(a.records.back().k == 299);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& r = a.records[i];
    CHECK(r.s_k == doctest::Approx(4.0 * std::pow(0.999, static_cast<double>(r.k))).epsilon(1e-12));
    CHECK(r.bits_cumulative == (r.k + 1) * a.bits_per_round);
    if (i > 0) CHECK(r.bits_cumulative >= a.records[i - 1].bits_cumulative);
    CHECK(r.tracking_err.has_value());
  }
  // Two broadcast variables, twenty senders, one coordinate, five bits each.
  CHECK(a.bits_per_round == 2 * 20 * 1 * 5);
}

TEST_CASE("record stride keeps the final record") {
  auto cfg = parse_config(kGtConfig);
  cfg.stride = 7;
  const auto r = run(cfg);
  CHECK(r.records.front().k == 0);
  CHECK(r.records[1].k == 7);
  CHECK(r.records.back().k == 299);

  cfg.stride = 0;
  cfg.iterations = 1203;
  const auto d = run(cfg);
  CHECK(d.records.size() == 1001 + 20 + 1);
  CHECK(d.records[1000].k == 1000);
  CHECK(d.records[1001].k == 1010);
  CHECK(d.records.back().k == 1202);
}

TEST_CASE("csv output") {
  const auto cfg = parse_config(kPiConfig);
  const auto r = run(cfg);
  const std::span<const RunRecord> three(r.records.data(), 3);
  const std::string csv = format_csv(three);
  CHECK(line_count(csv) == 4);
  CHECK(csv.substr(0, csv.find('\n')) == kCsvHeader);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> fields;
  std::string f;
  std::istringstream rs(row);
  while (std::getline(rs, f, ',')) fields.push_back(f);
  CHECK(fields[3].empty());
  CHECK(fields[6].empty());

  CHECK(parse_csv(format_csv(r.records)) == r.records);
  const auto gt = run(parse_config(kGtConfig));
  CHECK(parse_csv(format_csv(gt.records)) == gt.records);

  const auto path = std::filesystem::temp_directory_path() / "qdopt_test.csv";
  export_csv(r.records, path.string());
  std::ifstream file(path);
  std::stringstream buf;
  buf << file.rdbuf();
  CHECK(buf.str() == format_csv(r.records));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(export_csv(std::span<const RunRecord>{}, path.string()), Error);
  CHECK_THROWS_AS(export_csv(r.records, "/nonexistent-dir/x.csv"), Error);

  const std::string plot = format_plot_data(three);
  CHECK(line_count(plot) == 4);
  CHECK(plot.rfind("# k lambda_norm\n", 0) == 0);
}

TEST_CASE("tail fit recovers a geometric decay") {
  std::vector<RunRecord> recs;
  for (std::size_t k = 0; k < 200; ++k) {
    RunRecord r;
    r.k = k;
    r.lambda_norm = 3.0 * std::pow(0.98, static_cast<double>(k));
    recs.push_back(r);
  }
  const auto fit = tail_fit(recs);
  CHECK(fit.slope == doctest::Approx(std::log(0.98)).epsilon(1e-10));
  CHECK(fit.r2 == doctest::Approx(1.0));
  CHECK(fit.points == 100);
}

TEST_CASE("level sweeps share the scenario") {
  auto cfg = parse_config(kGtConfig);
  const auto levels = parse_levels("1:10.198,10:1.4569,100:0.1522");
  REQUIRE(levels.size() == 3);
  CHECK(levels[1].levels == 10);
  CHECK(levels[1].s0 == 1.4569);
  const auto sweep = sweep_levels(cfg, levels);
  REQUIRE(sweep.outcomes.size() == 3);
  for (const auto& o : sweep.outcomes) CHECK(o.result.s0 == o.level.s0);
  CHECK(sweep.outcomes[0].result.bits_per_round == 2 * 20 * 1);
  CHECK(sweep.outcomes[2].result.bits_per_round == 2 * 20 * 8);

  const LevelSpec single[] = {{10, 4.0}};
  const auto one = sweep_levels(cfg, single);
  CHECK(format_csv(one.outcomes[0].result.records) == format_csv(run(cfg).records));
  CHECK_THROWS_AS(parse_levels("1-2"), Error);
}

TEST_CASE("automatic initial scale uses the certificate floor") {
  auto cfg = parse_config(kPiConfig);
  cfg.s0.reset();
  cfg.problem.lipschitz = 2.0;
  cfg.problem.pl_constant = 0.5;
  const Scenario sc = build_scenario(cfg);
  CHECK_THROWS_AS(auto_s0(sc, cfg), Error);
}
