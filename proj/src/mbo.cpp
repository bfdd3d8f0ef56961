#include "btv/mbo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "btv/energy.hpp"

namespace btv {

void MboConfig::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (nhat < 1) throw std::invalid_argument("nhat must be >= 1");
  if (dt && !(*dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(decay_epsilon > 0.0)) throw std::invalid_argument("decay_epsilon must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(refine_factor > 0.0 && refine_factor < 1.0)) throw std::invalid_argument("refine_factor must lie in (0, 1)");
}

std::size_t MboConfig::resolved_n_eig(std::size_t n_nodes) const {
  return n_eig ? std::min(n_eig, n_nodes) : default_n_eig(nhat, n_nodes);
}

TimestepBounds timestep_bounds(const EigenBasis& basis, const SparseGraph& graph, double gamma,
                               double decay_epsilon) {
  TimestepBounds b{};
  b.freeze = std::numbers::ln2 / (2.0 * (gamma + 1.0) * graph.max_degree());
  b.cap = 1e3 * b.freeze;
  const double u0_norm = std::sqrt(static_cast<double>(graph.n_nodes()));
  b.decay = basis.lambda_1 > 0.0 ? std::log(u0_norm / decay_epsilon) / basis.lambda_1
                                 : std::numeric_limits<double>::infinity();
  const double mean = std::sqrt(b.freeze * std::max(b.decay, 0.0));
  b.chosen = std::clamp(std::isfinite(mean) ? mean : b.cap, b.freeze, b.cap);
  return b;
}

double select_timestep(const EigenBasis& basis, const SparseGraph& graph, double gamma, const MboConfig& config) {
  if (config.dt) return *config.dt;
  return timestep_bounds(basis, graph, gamma, config.decay_epsilon).chosen;
}

Matrix diffuse(const EigenBasis& basis, const Matrix& u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (u.rows() != basis.eigenvectors.rows()) {
    throw std::invalid_argument("u has " + std::to_string(u.rows()) + " rows, basis has " +
                                std::to_string(basis.eigenvectors.rows()));
  }
  const Vector decay = (-dt * basis.eigenvalues.array()).exp().matrix();
  const Matrix coeffs = decay.asDiagonal() * (basis.eigenvectors.transpose() * u);
  return basis.eigenvectors * coeffs;
}

Matrix fidelity_step(Matrix u, const Supervision& sup, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double keep = std::exp(-2.0 * sup.weight * dt);
  for (const auto& e : sup.entries) {
    if (e.node < 0 || e.node >= u.rows() || e.community < 0 || e.community >= u.cols()) {
      throw std::invalid_argument("supervised entry out of range");
    }
    double& x = u(e.node, e.community);
    x = e.target + (x - e.target) * keep;
  }
  return u;
}

PartitionMatrix threshold(const Matrix& u) {
  if (u.cols() < 1) throw std::invalid_argument("threshold needs at least one column");
  Labels labels;
  labels.assignment.resize(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    int best = 0;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      if (std::isnan(u(i, c))) throw std::invalid_argument("NaN at row " + std::to_string(i));
      if (u(i, c) > u(i, best)) best = static_cast<int>(c);
    }
    labels.assignment[static_cast<std::size_t>(i)] = best;
  }
  return PartitionMatrix(std::move(labels), static_cast<int>(u.cols()));
}

PartitionMatrix random_partition(std::size_t n_nodes, int nhat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, nhat - 1);
  Labels labels;
  labels.assignment.resize(n_nodes);
  for (auto& c : labels.assignment) c = pick(rng);
  return PartitionMatrix(std::move(labels), nhat);
}

MboResult mbo_run(const SparseGraph& graph, const EigenBasis& basis, const MboConfig& config,
                  const Supervision* supervision, const PartitionMatrix* init) {
  config.validate();
  const std::size_t n = graph.n_nodes();
  if (basis.n_nodes() != n) throw std::invalid_argument("eigenbasis does not match the graph size");
  if (supervision) supervision->validate(n, config.nhat);
  if (init && (init->n_rows() != n || init->n_communities() != config.nhat)) {
    throw std::invalid_argument("initial partition has the wrong shape");
  }

  MboResult result;
  result.dt_used = select_timestep(basis, graph, config.gamma, config);
  PartitionMatrix u = init ? *init : random_partition(n, config.nhat, config.seed);
  if (!init && supervision) {
    // Random start, but supervised nodes begin at their target community.
    Labels start = u.labels();
    for (const auto& e : supervision->entries) {
      if (e.target == 1.0) start.assignment[static_cast<std::size_t>(e.node)] = e.community;
    }
    u = PartitionMatrix(std::move(start), config.nhat);
  }

  auto record = [&](const PartitionMatrix& p) {
    // On partition matrices balanced TV (I) equals balanced cut (I).
    result.energy_trace.push_back(balanced_cut_I(graph, p.labels(), config.gamma));
    result.modularity_trace.push_back(modularity(graph, p.labels(), config.gamma));
  };

  auto run_stage = [&](double dt) {
    for (std::size_t it = 0; it < config.max_iters; ++it) {
      Matrix half = diffuse(basis, u.dense(), dt);
      if (supervision) half = fidelity_step(std::move(half), *supervision, dt);
      PartitionMatrix next = threshold(half);
      ++result.iterations;
      record(next);
      if (next == u) return true;
      u = std::move(next);
    }
    return false;
  };

  if (config.nhat == 1) {
    record(u);
    result.converged = true;
  } else {
    result.converged = run_stage(result.dt_used);
    if (config.refine && result.converged) {
      result.converged = run_stage(result.dt_used * config.refine_factor);
    }
  }

  result.labels = u.labels();
  result.modularity = modularity(graph, result.labels, config.gamma);
  result.u = std::move(u);
  return result;
}

}  // namespace btv
