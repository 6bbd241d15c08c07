#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qdopt/graph.hpp"
#include "qdopt/problems.hpp"
#include "qdopt/quantization.hpp"

namespace qdopt {

using AgentMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CodecConfig {
  std::int64_t levels = 1;
  double s0 = 1.0;
  double mu = 0.5;
  bool strict_saturation = false;
};

struct SaturationReport {
  double theta_x_inf = 0.0;
  double theta_u_inf = 0.0;  // NaN for the proportional-integral algorithm
  double limit = 0.0;
  bool saturated = false;
};

// One encoder per agent for a broadcast variable and one decoder per (receiver, neighbor) pair.
class BroadcastChannel {
 public:
  BroadcastChannel() = default;
  BroadcastChannel(const UndirectedGraph& graph, std::size_t dimension, double s0, double mu);

  // Encodes every agent's row; all receivers decode. Returns the largest quantizer argument magnitude.
  double broadcast(const UndirectedGraph& graph, const UniformQuantizer& q, const AgentMatrix& values);

  std::span<const double> internal(std::size_t agent) const { return encoders_[agent].internal(); }
  // Receiver's estimate of its slot-th neighbor (slots follow the sorted neighbor list).
  std::span<const double> estimate(std::size_t receiver, std::size_t slot) const {
    return decoders_[receiver][slot].estimate();
  }
  const QuantizedMessage& last_message(std::size_t agent) const { return messages_[agent]; }
  double scale() const { return encoders_.empty() ? 0.0 : encoders_.front().scale(); }

  // sum_j a_ij (b_i - estimate_ij), neighbors in ascending order.
  void laplacian_row(const UndirectedGraph& graph, std::size_t agent, std::span<double> out) const;

 private:
  std::vector<Encoder> encoders_;
  std::vector<std::vector<Decoder>> decoders_;
  std::vector<QuantizedMessage> messages_;
};

struct GtGains {
  double beta = 0.01;
  double delta = 0.01;
};

struct GtState {
  std::shared_ptr<const UndirectedGraph> graph;
  std::shared_ptr<const ProblemSuite> problem;
  CodecConfig codec;
  UniformQuantizer quantizer{1};
  GtGains gains;
  AgentMatrix x;
  AgentMatrix u;
  AgentMatrix g;  // local gradients at x
  BroadcastChannel x_channel;
  BroadcastChannel u_channel;
  std::size_t k = 0;

  std::size_t agents() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(x.cols()); }
  double scale() const { return x_channel.scale(); }  // s(k)
};

struct PiGains {
  double xi = 0.00235;
  double phi = 0.002;
  double sigma = 0.001;
};

struct PiState {
  std::shared_ptr<const UndirectedGraph> graph;
  std::shared_ptr<const ProblemSuite> problem;
  CodecConfig codec;
  UniformQuantizer quantizer{1};
  PiGains gains;
  AgentMatrix x;
  AgentMatrix u;
  AgentMatrix g;
  BroadcastChannel x_channel;
  std::size_t k = 0;

  std::size_t agents() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(x.cols()); }
  double scale() const { return x_channel.scale(); }
};

GtState gt_init(std::shared_ptr<const UndirectedGraph> graph, std::shared_ptr<const ProblemSuite> problem,
                const AgentMatrix& x0, const CodecConfig& codec, const GtGains& gains);
SaturationReport gt_step(GtState& state);

PiState pi_init(std::shared_ptr<const UndirectedGraph> graph, std::shared_ptr<const ProblemSuite> problem,
                const AgentMatrix& x0, const AgentMatrix& u0, const CodecConfig& codec, const PiGains& gains);
SaturationReport pi_step(PiState& state);

struct LambdaMetric {
  double lambda_norm = 0.0;
  double consensus_err = 0.0;
  double tracking_err = 0.0;  // NaN when not applicable
  double opt_gap = 0.0;
};

// With u == nullptr the norm covers (consensus_err, opt_gap) only.
LambdaMetric lambda_metric(const AgentMatrix& x, const AgentMatrix* u, const ProblemSuite& problem, double f_star);
LambdaMetric lambda_metric(const GtState& state, double f_star);
LambdaMetric lambda_metric(const PiState& state, double f_star);

Eigen::RowVectorXd agent_mean(const AgentMatrix& m);
AgentMatrix local_gradients(const ProblemSuite& problem, const AgentMatrix& x);

// |mean(u) - mean(grad f_i(x_i))| with gradients recomputed from x.
double gt_tracking_defect(const GtState& state);
// |sum_i u_i|
double pi_integral_sum(const PiState& state);

struct PiLyapunov {
  double v = 0.0;
  double w = 0.0;
};
PiLyapunov pi_lyapunov(const AgentMatrix& x, const AgentMatrix& u, const AgentMatrix& g, const PiGains& gains,
                       const LaplacianSpectrum& spec, const ProblemSuite& problem, double f_star);

}  // namespace qdopt
