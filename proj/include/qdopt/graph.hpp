#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdopt {

struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
};

struct Neighbor {
  std::size_t index;
  double weight;
};

// Connected, weighted, undirected graph. Neighbor lists are sorted by index.
class UndirectedGraph {
 public:
  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
  std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_[i]; }
  double degree(std::size_t i) const { return degrees_[i]; }
  double max_degree() const;
  std::size_t edge_count() const;
  std::vector<Edge> edges() const;
  Eigen::MatrixXd laplacian() const;

  friend UndirectedGraph build_graph(std::size_t n, std::span<const Edge> edges);

 private:
  Eigen::MatrixXd weights_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> degrees_;
};

UndirectedGraph build_graph(std::size_t n, std::span<const Edge> edges);
UndirectedGraph random_connected_graph(std::size_t n, double edge_prob, std::uint64_t seed);

bool is_connected(std::size_t n, std::span<const Edge> edges);

struct LaplacianSpectrum {
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
  double rho = 0.0;              // largest eigenvalue
  double rho_min = 0.0;          // algebraic connectivity
  double max_degree = 0.0;
  Eigen::MatrixXd centering;     // I - 11^T/n
  Eigen::MatrixXd pseudo;        // P with PL = LP = centering

  std::size_t size() const { return static_cast<std::size_t>(laplacian.rows()); }
  double tolerance() const;  // 1e-9 * n * rho
};

LaplacianSpectrum spectrum(const UndirectedGraph& g);

// max_{i>=2} |1 - beta * lambda_i|
double consensus_contraction(const LaplacianSpectrum& s, double beta);

UndirectedGraph parse_graph(const std::string& text);
UndirectedGraph load_graph(const std::string& path);
std::string format_graph(const UndirectedGraph& g);

}  // namespace qdopt
