#include "qdopt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "qdopt/error.hpp"

namespace qdopt {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

}  // namespace

bool is_connected(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) return false;
  DisjointSets sets(n);
  std::size_t components = n;
  for (const Edge& e : edges) {
    if (e.i < n && e.j < n && sets.unite(e.i, e.j)) --components;
  }
  return components == 1;
}

double UndirectedGraph::max_degree() const {
  return degrees_.empty() ? 0.0 : *std::max_element(degrees_.begin(), degrees_.end());
}

std::size_t UndirectedGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency_) total += list.size();
  return total / 2;
}

std::vector<Edge> UndirectedGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    for (const Neighbor& nb : adjacency_[i]) {
      if (nb.index > i) out.push_back({i, nb.index, nb.weight});
    }
  }
  return out;
}

Eigen::MatrixXd UndirectedGraph::laplacian() const {
  Eigen::MatrixXd lap = -weights_;
  for (std::size_t i = 0; i < size(); ++i) lap(i, i) = degrees_[i];
  return lap;
}

UndirectedGraph build_graph(std::size_t n, std::span<const Edge> edges) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "graph needs at least 2 nodes");
  std::map<std::pair<std::size_t, std::size_t>, double> unique;
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n || e.i == e.j) {
      throw Error(ErrorCode::InvalidIndex,
                  "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ") with n = " + std::to_string(n));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error(ErrorCode::InvalidArgument, "edge weight must be positive and finite");
    }
    auto key = std::minmax(e.i, e.j);
    auto [it, inserted] = unique.emplace(key, e.weight);
    if (!inserted && it->second != e.weight) {
      throw Error(ErrorCode::DuplicateEdge,
                  "pair (" + std::to_string(key.first) + ", " + std::to_string(key.second) + ") listed with weights " +
                      std::to_string(it->second) + " and " + std::to_string(e.weight));
    }
  }

  std::vector<Edge> flat;
  flat.reserve(unique.size());
  for (const auto& [key, w] : unique) flat.push_back({key.first, key.second, w});
  if (!is_connected(n, flat)) throw Error(ErrorCode::DisconnectedGraph, "graph with n = " + std::to_string(n));

  UndirectedGraph g;
  g.weights_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  g.adjacency_.assign(n, {});
  g.degrees_.assign(n, 0.0);
  for (const Edge& e : flat) {
    g.weights_(e.i, e.j) = e.weight;
    g.weights_(e.j, e.i) = e.weight;
    g.adjacency_[e.i].push_back({e.j, e.weight});
    g.adjacency_[e.j].push_back({e.i, e.weight});
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = g.adjacency_[i];
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    for (const Neighbor& nb : list) g.degrees_[i] += nb.weight;
  }
  return g;
}

UndirectedGraph random_connected_graph(std::size_t n, double edge_prob, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "graph needs at least 2 nodes");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) throw Error(ErrorCode::InvalidArgument, "edge probability must be in (0, 1]");
  constexpr int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 rng(seq);
    std::bernoulli_distribution coin(edge_prob);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (coin(rng)) edges.push_back({i, j, 1.0});
      }
    }
    if (is_connected(n, edges)) return build_graph(n, edges);
  }
  throw Error(ErrorCode::ConnectivityRetryExhausted,
              "no connected draw in " + std::to_string(kAttempts) + " attempts (n = " + std::to_string(n) + ")");
}

double LaplacianSpectrum::tolerance() const { return 1e-9 * static_cast<double>(size()) * rho; }

LaplacianSpectrum spectrum(const UndirectedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  LaplacianSpectrum s;
  s.laplacian = g.laplacian();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.laplacian);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigensolverFailure, "symmetric eigensolver did not converge");
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  s.rho = s.eigenvalues(n - 1);
  s.rho_min = s.eigenvalues(1);
  s.max_degree = g.max_degree();
  if (!(s.rho_min > 1e-10 * s.rho)) throw Error(ErrorCode::DisconnectedGraph, "algebraic connectivity is zero");

  const double inv_n = 1.0 / static_cast<double>(n);
  s.centering = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, inv_n);

  // P = R diag(1/lambda_2..1/lambda_n) R^T + (1/lambda_n) r r^T with r = 1/sqrt(n).
  Eigen::MatrixXd basis = s.eigenvectors.rightCols(n - 1);
  Eigen::VectorXd inv = s.eigenvalues.tail(n - 1).cwiseInverse();
  s.pseudo = basis * inv.asDiagonal() * basis.transpose();
  s.pseudo += Eigen::MatrixXd::Constant(n, n, inv_n / s.rho);
  return s;
}

double consensus_contraction(const LaplacianSpectrum& s, double beta) {
  double worst = 0.0;
  for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i) {
    worst = std::max(worst, std::abs(1.0 - beta * s.eigenvalues(i)));
  }
  return worst;
}

UndirectedGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  bool have_n = false;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::ConfigError, "graph line " + std::to_string(line_no) + ": " + why);
    };
    if (tag == "n") {
      if (have_n) fail("repeated node count");
      long long count = 0;
      if (!(fields >> count) || count < 2) fail("expected 'n <count>' with count >= 2");
      n = static_cast<std::size_t>(count);
      have_n = true;
    } else if (tag == "e") {
      if (!have_n) fail("edge before node count");
      long long i = 0, j = 0;
      double w = 0.0;
      if (!(fields >> i >> j >> w)) fail("expected 'e <i> <j> <weight>'");
      if (i < 0 || j < 0) throw Error(ErrorCode::InvalidIndex, "negative node index on line " + std::to_string(line_no));
      edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
    } else {
      fail("unknown record '" + tag + "'");
    }
    std::string extra;
    if (fields >> extra) fail("trailing field '" + extra + "'");
  }
  if (!have_n) throw Error(ErrorCode::ConfigError, "graph text has no 'n' record");
  return build_graph(n, edges);
}

UndirectedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open graph file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str());
}

std::string format_graph(const UndirectedGraph& g) {
  std::ostringstream out;
  out.precision(17);
  out << "n " << g.size() << "\n";
  for (const Edge& e : g.edges()) out << "e " << e.i << " " << e.j << " " << e.weight << "\n";
  return out.str();
}

}  // namespace qdopt
