#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include "btv/basis_cache.hpp"
#include "btv/mbo.hpp"

namespace btv {

struct FixedStrategy {
  int nhat = 2;
};

struct SweepStrategy {
  int nhat_min = 2;
  int nhat_max = 8;
};

struct RecursiveStrategy {
  int split_factor = 2;
  std::size_t min_size = 4;
  double gain_tol = 1e-10;
  /// MBO runs per attempted split (first from k-means, the rest random);
  /// the one with the largest modularity gain is considered.
  int attempts = 2;
};

using PartitionStrategy = std::variant<FixedStrategy, SweepStrategy, RecursiveStrategy>;

/// Throws std::invalid_argument on unordered bounds, split_factor < 2, etc.
void validate_strategy(const PartitionStrategy& strategy);

enum class InitMode { Random, KMeans };

/// k-means (k-means++ seeding, Lloyd iterations) on the rows of the n̂
/// leading eigenvectors. Clusters still empty after restarts are filled
/// with randomly chosen nodes.
PartitionMatrix kmeans_init(const EigenBasis& basis, int nhat, std::uint64_t seed);

/// One MBO run at config.nhat with the requested initialization.
MboResult solve_fixed(const SparseGraph& graph, const EigenBasis& basis, const MboConfig& config,
                      InitMode init, const Supervision* supervision = nullptr);

/**
 * Runs MBO for every n̂ in [nhat_min, nhat_max] on one eigenbasis of
 * 5 · nhat_max vectors (fetched through `cache`), returning the result of
 * highest modularity; ties go to the smaller n̂.
 */
MboResult sweep_nhat(const SparseGraph& graph, const SweepStrategy& range, const MboConfig& config,
                     BasisCache& cache, InitMode init = InitMode::Random,
                     const Supervision* supervision = nullptr);

struct RecursiveResult {
  Labels labels;
  double modularity = 0.0;
  std::size_t accepted_splits = 0;
  std::size_t attempted_splits = 0;
};

/// Called after each accepted split with the current labels and the
/// incrementally tracked full-graph modularity.
using SplitObserver = std::function<void(const Labels&, double)>;

/**
 * Starts from one community and repeatedly splits communities of at least
 * min_size nodes with MBO (n̂ = split_factor) on the induced subgraph. A split
 * is kept only if the modularity of the whole graph (original degrees and
 * 2m) rises by more than gain_tol. Final labels are contiguous.
 */
RecursiveResult recursive_partition(const SparseGraph& graph, const RecursiveStrategy& strategy,
                                    const MboConfig& config, const SplitObserver& observer = {});

}  // namespace btv
