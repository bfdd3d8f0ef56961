#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "btv/eigensolver.hpp"
#include "btv/graph.hpp"
#include "btv/partition.hpp"

namespace btv {

struct MboConfig {
  double gamma = 1.0;
  int nhat = 2;
  /// Eigenpairs to compute; 0 means 5 n̂ capped at N.
  std::size_t n_eig = 0;
  /// Explicit timestep; replaces the automatic choice when set.
  std::optional<double> dt;
  /// ε in the decay-time upper bound on the timestep.
  double decay_epsilon = 1.0;
  std::size_t max_iters = 300;
  std::uint64_t seed = 0;
  /// After the first fixed point, continue with dt · refine_factor until
  /// stationary again.
  bool refine = true;
  double refine_factor = 0.1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  std::size_t resolved_n_eig(std::size_t n_nodes) const;
};

struct MboResult {
  Labels labels;
  PartitionMatrix u;
  /// Thresholding steps taken, both stages combined.
  std::size_t iterations = 0;
  double dt_used = 0.0;
  /// True if every stage reached a fixed point before max_iters.
  bool converged = false;
  /// balanced TV (I) and modularity of the partition after each step.
  std::vector<double> energy_trace;
  std::vector<double> modularity_trace;
  double modularity = 0.0;
};

/// The quantities behind the automatic timestep.
struct TimestepBounds {
  double freeze;  // log 2 / (2(γ+1) k_max); below this n̂ = 2 steps never move
  double decay;   // λ₁⁻¹ log(√N / ε); above this the flow has decayed below ε
  double cap;     // 10³ · freeze
  double chosen;  // √(freeze · decay) clamped to [freeze, cap]
};

TimestepBounds timestep_bounds(const EigenBasis& basis, const SparseGraph& graph, double gamma,
                               double decay_epsilon);

/// config.dt when given, otherwise timestep_bounds(...).chosen.
double select_timestep(const EigenBasis& basis, const SparseGraph& graph, double gamma, const MboConfig& config);

/// V diag(e^{−dt λ}) Vᵀ u: the flow e^{−dt M} u projected onto span(V).
Matrix diffuse(const EigenBasis& basis, const Matrix& u, double dt);

/// Exact solution of u_t = −2λ χ∘(u − f) over time dt on the masked entries.
Matrix fidelity_step(Matrix u, const Supervision& sup, double dt);

/// Row-wise one-hot at the argmax, ties to the lowest column. Throws
/// std::invalid_argument on NaN entries.
PartitionMatrix threshold(const Matrix& u);

/// i.i.d. uniform one-hot rows.
PartitionMatrix random_partition(std::size_t n_nodes, int nhat, std::uint64_t seed);

/**
 * Pseudospectral balanced-TV MBO iteration: u ← threshold(fidelity(diffuse(u)))
 * until the partition repeats or max_iters is hit, then the same with the
 * refined timestep if enabled. Running out of iterations is reported through
 * MboResult::converged, not thrown.
 *
 * `basis` must come from M for the same graph and γ. `init` overrides the
 * random start; without it, supervised nodes start at their target community.
 */
MboResult mbo_run(const SparseGraph& graph, const EigenBasis& basis, const MboConfig& config,
                  const Supervision* supervision = nullptr, const PartitionMatrix* init = nullptr);

}  // namespace btv
