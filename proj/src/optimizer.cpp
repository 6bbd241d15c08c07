#include "qdopt/optimizer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qdopt/error.hpp"

namespace qdopt {

namespace {

constexpr double kDivergenceBound = 1e12;

std::span<const double> row(const AgentMatrix& m, std::size_t i) {
  return {m.data() + i * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

std::span<double> row(AgentMatrix& m, std::size_t i) {
  return {m.data() + i * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

void check_state(const AgentMatrix& m, const char* name, std::size_t k) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double v = m.data()[i];
    if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) {
      throw Error(ErrorCode::NonFiniteState, std::string(name) + " diverged at step " + std::to_string(k));
    }
  }
}

void check_common(const UndirectedGraph* graph, const ProblemSuite* problem, const AgentMatrix& x0,
                  const CodecConfig& codec) {
  if (!graph || !problem) throw Error(ErrorCode::InvalidArgument, "graph and problem are required");
  if (problem->size() != graph->size() || static_cast<std::size_t>(x0.rows()) != graph->size() ||
      static_cast<std::size_t>(x0.cols()) != problem->dim) {
    throw Error(ErrorCode::DimensionMismatch, "graph has " + std::to_string(graph->size()) + " agents, problem " +
                                                  std::to_string(problem->size()) + " x " +
                                                  std::to_string(problem->dim) + ", x0 " + std::to_string(x0.rows()) +
                                                  " x " + std::to_string(x0.cols()));
  }
  if (codec.levels < 1) throw Error(ErrorCode::InvalidArgument, "quantizer level must be >= 1");
  check_state(x0, "x0", 0);
}

SaturationReport make_report(double theta_x, double theta_u, const UniformQuantizer& q, bool strict, std::size_t k) {
  SaturationReport report;
  report.theta_x_inf = theta_x;
  report.theta_u_inf = theta_u;
  report.limit = q.limit();
  report.saturated = theta_x > report.limit || (!std::isnan(theta_u) && theta_u > report.limit);
  if (report.saturated && strict) {
    throw Error(ErrorCode::SaturationDetected, "quantizer saturated at step " + std::to_string(k));
  }
  return report;
}

}  // namespace

BroadcastChannel::BroadcastChannel(const UndirectedGraph& graph, std::size_t dimension, double s0, double mu) {
  const std::size_t n = graph.size();
  encoders_.reserve(n);
  decoders_.resize(n);
  messages_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    encoders_.emplace_back(dimension, s0, mu);
    for (std::size_t s = 0; s < graph.neighbors(i).size(); ++s) decoders_[i].emplace_back(dimension, s0, mu);
  }
}

double BroadcastChannel::broadcast(const UndirectedGraph& graph, const UniformQuantizer& q, const AgentMatrix& values) {
  double peak = 0.0;
  for (std::size_t j = 0; j < encoders_.size(); ++j) {
    encoders_[j].encode(q, row(values, j), messages_[j]);
    peak = std::max(peak, messages_[j].peak);
  }
  for (std::size_t i = 0; i < decoders_.size(); ++i) {
    auto nbrs = graph.neighbors(i);
    for (std::size_t s = 0; s < nbrs.size(); ++s) decoders_[i][s].decode(messages_[nbrs[s].index]);
  }
  return peak;
}

void BroadcastChannel::laplacian_row(const UndirectedGraph& graph, std::size_t agent, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  auto self = encoders_[agent].internal();
  auto nbrs = graph.neighbors(agent);
  for (std::size_t s = 0; s < nbrs.size(); ++s) {
    auto est = decoders_[agent][s].estimate();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += nbrs[s].weight * (self[c] - est[c]);
  }
}

AgentMatrix local_gradients(const ProblemSuite& problem, const AgentMatrix& x) {
  AgentMatrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < static_cast<std::size_t>(x.rows()); ++i) problem.agents[i]->gradient(row(x, i), row(g, i));
  return g;
}

Eigen::RowVectorXd agent_mean(const AgentMatrix& m) { return m.colwise().sum() / static_cast<double>(m.rows()); }

GtState gt_init(std::shared_ptr<const UndirectedGraph> graph, std::shared_ptr<const ProblemSuite> problem,
                const AgentMatrix& x0, const CodecConfig& codec, const GtGains& gains) {
  check_common(graph.get(), problem.get(), x0, codec);
  GtState state;
  state.codec = codec;
  state.quantizer = UniformQuantizer(codec.levels);
  state.gains = gains;
  state.x = x0;
  state.g = local_gradients(*problem, x0);
  state.u = state.g;
  state.x_channel = BroadcastChannel(*graph, problem->dim, codec.s0, codec.mu);
  state.u_channel = BroadcastChannel(*graph, problem->dim, codec.s0, codec.mu);
  state.graph = std::move(graph);
  state.problem = std::move(problem);
  return state;
}

SaturationReport gt_step(GtState& state) {
  const auto& graph = *state.graph;
  const auto& problem = *state.problem;
  const std::size_t n = state.agents();
  const std::size_t m = state.dimension();
  const double beta = state.gains.beta;
  const double delta = state.gains.delta;
  AgentMatrix x_next(n, m), u_next(n, m), g_next(n, m);
  std::vector<double> lap(m);

  for (std::size_t i = 0; i < n; ++i) {
    state.x_channel.laplacian_row(graph, i, lap);
    for (std::size_t c = 0; c < m; ++c) x_next(i, c) = (state.x(i, c) - beta * lap[c]) - delta * state.u(i, c);
  }
  check_state(x_next, "x", state.k + 1);
  for (std::size_t i = 0; i < n; ++i) problem.agents[i]->gradient(row(x_next, i), row(g_next, i));
  for (std::size_t i = 0; i < n; ++i) {
    state.u_channel.laplacian_row(graph, i, lap);
    for (std::size_t c = 0; c < m; ++c) {
      u_next(i, c) = ((state.u(i, c) - beta * lap[c]) + g_next(i, c)) - state.g(i, c);
    }
  }
  check_state(u_next, "u", state.k + 1);

  const double theta_x = state.x_channel.broadcast(graph, state.quantizer, x_next);
  const double theta_u = state.u_channel.broadcast(graph, state.quantizer, u_next);
  state.x.swap(x_next);
  state.u.swap(u_next);
  state.g.swap(g_next);
  const std::size_t k = state.k++;
  return make_report(theta_x, theta_u, state.quantizer, state.codec.strict_saturation, k);
}

PiState pi_init(std::shared_ptr<const UndirectedGraph> graph, std::shared_ptr<const ProblemSuite> problem,
                const AgentMatrix& x0, const AgentMatrix& u0, const CodecConfig& codec, const PiGains& gains) {
  check_common(graph.get(), problem.get(), x0, codec);
  if (u0.rows() != x0.rows() || u0.cols() != x0.cols()) throw Error(ErrorCode::DimensionMismatch, "u0 shape");
  check_state(u0, "u0", 0);
  const double sum = u0.colwise().sum().norm();
  if (!(sum <= 1e-12)) {
    throw Error(ErrorCode::IntegralSumNonzero, "sum of initial integral states has norm " + std::to_string(sum));
  }
  PiState state;
  state.codec = codec;
  state.quantizer = UniformQuantizer(codec.levels);
  state.gains = gains;
  state.x = x0;
  state.u = u0;
  state.g = local_gradients(*problem, x0);
  state.x_channel = BroadcastChannel(*graph, problem->dim, codec.s0, codec.mu);
  state.graph = std::move(graph);
  state.problem = std::move(problem);
  return state;
}

SaturationReport pi_step(PiState& state) {
  const auto& graph = *state.graph;
  const auto& problem = *state.problem;
  const std::size_t n = state.agents();
  const std::size_t m = state.dimension();
  const auto& p = state.gains;
  AgentMatrix x_next(n, m), u_next(n, m), g_next(n, m);
  std::vector<double> lap(m);

  for (std::size_t i = 0; i < n; ++i) {
    state.x_channel.laplacian_row(graph, i, lap);
    for (std::size_t c = 0; c < m; ++c) {
      x_next(i, c) = ((state.x(i, c) - p.xi * lap[c]) - p.phi * state.u(i, c)) - p.sigma * state.g(i, c);
      u_next(i, c) = state.u(i, c) + p.phi * lap[c];
    }
  }
  check_state(x_next, "x", state.k + 1);
  check_state(u_next, "u", state.k + 1);
  for (std::size_t i = 0; i < n; ++i) problem.agents[i]->gradient(row(x_next, i), row(g_next, i));

  const double theta = state.x_channel.broadcast(graph, state.quantizer, x_next);
  state.x.swap(x_next);
  state.u.swap(u_next);
  state.g.swap(g_next);
  const std::size_t k = state.k++;
  return make_report(theta, std::numeric_limits<double>::quiet_NaN(), state.quantizer,
                     state.codec.strict_saturation, k);
}

LambdaMetric lambda_metric(const AgentMatrix& x, const AgentMatrix* u, const ProblemSuite& problem, double f_star) {
  LambdaMetric out;
  const Eigen::RowVectorXd xbar = agent_mean(x);
  out.consensus_err = (x.rowwise() - xbar).squaredNorm();
  const double n = static_cast<double>(x.rows());
  out.opt_gap = n * (problem.average_value(std::span<const double>(xbar.data(), static_cast<std::size_t>(xbar.size()))) -
                     f_star);
  if (u) {
    const Eigen::RowVectorXd ubar = agent_mean(*u);
    out.tracking_err = (u->rowwise() - ubar).squaredNorm();
    out.lambda_norm = std::sqrt(out.consensus_err * out.consensus_err + out.tracking_err * out.tracking_err +
                                out.opt_gap * out.opt_gap);
  } else {
    out.tracking_err = std::numeric_limits<double>::quiet_NaN();
    out.lambda_norm = std::hypot(out.consensus_err, out.opt_gap);
  }
  return out;
}

LambdaMetric lambda_metric(const GtState& state, double f_star) {
  return lambda_metric(state.x, &state.u, *state.problem, f_star);
}

LambdaMetric lambda_metric(const PiState& state, double f_star) {
  return lambda_metric(state.x, nullptr, *state.problem, f_star);
}

double gt_tracking_defect(const GtState& state) {
  const AgentMatrix g = local_gradients(*state.problem, state.x);
  return (agent_mean(state.u) - agent_mean(g)).norm();
}

double pi_integral_sum(const PiState& state) { return state.u.colwise().sum().norm(); }

PiLyapunov pi_lyapunov(const AgentMatrix& x, const AgentMatrix& u, const AgentMatrix& g, const PiGains& gains,
                       const LaplacianSpectrum& spec, const ProblemSuite& problem, double f_star) {
  const Eigen::MatrixXd y = u + (gains.sigma / gains.phi) * g;
  const Eigen::MatrixXd xd = x;
  const Eigen::MatrixXd kx = spec.centering * xd;
  const Eigen::MatrixXd py = spec.pseudo * y;
  PiLyapunov out;
  const double qk = (xd.array() * kx.array()).sum();
  const double qp = ((gains.phi + gains.xi) / gains.phi) * (y.array() * py.array()).sum();
  const double cross = 2.0 * (kx.array() * py.array()).sum();
  out.v = qk + qp + cross;
  const Eigen::RowVectorXd xbar = agent_mean(x);
  out.w = out.v + static_cast<double>(x.rows()) *
                      (problem.average_value(std::span<const double>(xbar.data(), static_cast<std::size_t>(xbar.size()))) -
                       f_star);
  return out;
}

}  // namespace qdopt
