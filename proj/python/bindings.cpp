#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdopt/error.hpp"
#include "qdopt/graph.hpp"
#include "qdopt/harness.hpp"
#include "qdopt/parameters.hpp"
#include "qdopt/problems.hpp"
#include "qdopt/quantization.hpp"

namespace py = pybind11;
using namespace qdopt;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

py::dict record_dict(const RunRecord& r) {
  py::dict d;
  d["k"] = r.k;
  d["lambda_norm"] = r.lambda_norm;
  d["consensus_err"] = r.consensus_err;
  d["tracking_err"] = r.tracking_err;
  d["opt_gap"] = r.opt_gap;
  d["theta_x_inf"] = r.theta_x_inf;
  d["theta_u_inf"] = r.theta_u_inf;
  d["s_k"] = r.s_k;
  d["bits_cumulative"] = r.bits_cumulative;
  d["saturated"] = r.saturated;
  return d;
}

py::dict report_dict(const Report& report, const std::vector<Violation>& violations) {
  py::dict d;
  for (const auto& [k, v] : report) d[py::str(k)] = v;
  py::list vs;
  for (const auto& v : violations) vs.append(describe(v));
  d["violations"] = vs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qdopt, m) {
  m.doc() = "Quantized distributed optimization";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<UndirectedGraph>(m, "Graph")
      .def("size", &UndirectedGraph::size)
      .def("edge_count", &UndirectedGraph::edge_count)
      .def("max_degree", &UndirectedGraph::max_degree)
      .def("edges", [](const UndirectedGraph& g) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        for (const auto& e : g.edges()) out.emplace_back(e.i, e.j, e.weight);
        return out;
      });

  m.def(
      "build_graph",
      [](std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
        std::vector<Edge> es;
        for (const auto& [i, j, w] : edges) es.push_back({i, j, w});
        return build_graph(n, es);
      },
      py::arg("n"), py::arg("edges"));
  m.def("random_connected_graph", &random_connected_graph, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("parse_graph", &parse_graph);
  m.def("format_graph", &format_graph);
  m.def("laplacian_eigenvalues", [](const UndirectedGraph& g) {
    const auto s = spectrum(g);
    return std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
  });

  m.def("bits_for_level", [](std::int64_t k, bool strict) {
    return bits_for_level(k, strict ? BitCount::Strict : BitCount::Nominal);
  }, py::arg("levels"), py::arg("strict") = false);
  m.def("quantize", [](std::int64_t levels, double a) { return UniformQuantizer(levels).quantize(a); },
        py::arg("levels"), py::arg("value"));
  m.def(
      "codec_roundtrip",
      [](std::int64_t levels, double s0, double mu, const std::vector<std::vector<double>>& stream) {
        if (stream.empty()) throw Error(ErrorCode::InvalidArgument, "empty stream");
        const UniformQuantizer q(levels);
        Encoder enc(stream.front().size(), s0, mu);
        Decoder dec(stream.front().size(), s0, mu);
        std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
        for (const auto& v : stream) {
          const auto msg = enc.encode(q, v);
          auto est = to_vec(dec.decode(msg));
          out.emplace_back(to_vec(enc.internal()), std::move(est));
        }
        return out;
      },
      py::arg("levels"), py::arg("s0"), py::arg("mu"), py::arg("stream"),
      "Encode and decode a stream; returns (encoder internal, decoder estimate) pairs per step.");

  m.def(
      "paper_suite_value",
      [](std::size_t n, double x) {
        const auto s = paper_suite(n);
        const double v[1] = {x};
        return s.average_value(v);
      },
      py::arg("agents"), py::arg("x"));
  m.def(
      "oracle",
      [](const std::string& name, std::size_t agents, std::size_t dimension, double ell2, std::uint64_t seed) {
        ProblemSpec spec;
        spec.name = name;
        spec.dimension = dimension;
        spec.ell2 = ell2;
        spec.seed = seed;
        const auto suite = build_problem(spec, agents);
        const auto opt = global_optimum_oracle(suite);
        return std::make_pair(opt.f_star, std::vector<double>(opt.x_star.data(), opt.x_star.data() + opt.x_star.size()));
      },
      py::arg("problem") = "paper-suite", py::arg("agents") = 100, py::arg("dimension") = 1, py::arg("ell2") = 0.0,
      py::arg("seed") = 7);

  m.def(
      "gt_certificate",
      [](const UndirectedGraph& g, double lipschitz, double pl, double beta, double delta, double mu,
         std::int64_t levels) {
        const GtCertificate c = gt_analyze({lipschitz, pl, beta, delta, mu, levels}, spectrum(g));
        return report_dict(certificate_report(c), c.violations);
      },
      py::arg("graph"), py::arg("lipschitz"), py::arg("pl"), py::arg("beta"), py::arg("delta"), py::arg("mu"),
      py::arg("levels"));
  m.def(
      "pi_certificate",
      [](const UndirectedGraph& g, double lipschitz, double pl, double xi, double phi, double sigma, double mu,
         std::int64_t levels, std::size_t dimension) {
        PiInputs in;
        in.lipschitz = lipschitz;
        in.pl = pl;
        in.xi = xi;
        in.phi = phi;
        in.sigma = sigma;
        in.mu = mu;
        in.levels = levels;
        in.dimension = dimension;
        const PiCertificate c = pi_analyze(in, spectrum(g));
        return report_dict(certificate_report(c), c.violations);
      },
      py::arg("graph"), py::arg("lipschitz"), py::arg("pl"), py::arg("xi"), py::arg("phi"), py::arg("sigma"),
      py::arg("mu"), py::arg("levels"), py::arg("dimension") = 1);

  m.def("parse_config", [](const std::string& text) { return format_config(parse_config(text)); },
        "Parse and normalize a config text.");
  m.def(
      "run",
      [](const std::string& config_text) {
        const RunConfig cfg = parse_config(config_text);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(cfg);
        }
        py::list records;
        for (const auto& rec : r.records) records.append(record_dict(rec));
        py::dict out;
        out["records"] = records;
        out["saturation_events"] = r.saturation_events;
        out["s0"] = r.s0;
        out["bits_per_round"] = r.bits_per_round;
        out["csv"] = format_csv(r.records);
        return out;
      },
      py::arg("config"));
}
