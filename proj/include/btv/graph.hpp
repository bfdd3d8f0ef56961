#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace btv {

using NodeId = std::int32_t;

/// One undirected edge as read from a file or produced by a generator.
struct Edge {
  NodeId u;
  NodeId v;
  double weight;
};

/**
 * Immutable symmetric weighted graph in compressed row form.
 *
 * Both orientations of every edge are stored. Degrees k_i (row sums of W)
 * and the total weight 2m are computed once at construction. Self-loops are
 * never stored.
 */
class SparseGraph {
public:
  SparseGraph() = default;

  /// Builds from undirected edges; each edge is stored in both directions.
  /// Self-loops are dropped. Duplicate edges (either orientation) must carry
  /// equal weights and are collapsed. Throws std::invalid_argument on
  /// out-of-range ids, negative or non-finite weights, or conflicting
  /// duplicates.
  static SparseGraph from_edges(std::size_t n_nodes, std::span<const Edge> edges);

  /// Takes ownership of CSR arrays and validates every invariant
  /// (sorted columns, symmetry, nonnegativity, no self-loops).
  static SparseGraph from_csr(std::size_t n_nodes, std::vector<std::size_t> row_offsets,
                              std::vector<NodeId> col_indices, std::vector<double> weights);

  std::size_t n_nodes() const { return degrees_.size(); }
  std::size_t n_stored() const { return col_indices_.size(); }
  std::size_t n_edges() const { return col_indices_.size() / 2; }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const NodeId> col_indices() const { return col_indices_; }
  std::span<const double> weights() const { return weights_; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> neighbor_weights(NodeId i) const {
    return {weights_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  std::span<const double> degrees() const { return degrees_; }
  double degree(NodeId i) const { return degrees_[i]; }
  double max_degree() const { return max_degree_; }

  /// 2m = sum of all degrees.
  double total_weight() const { return total_weight_; }

  /// Weight of (i, j), zero when absent.
  double weight(NodeId i, NodeId j) const;

  /// Stable 64-bit FNV-1a digest over the CSR arrays; used as a cache key.
  std::uint64_t content_hash() const;

private:
  void finalize();

  std::vector<std::size_t> row_offsets_{0};
  std::vector<NodeId> col_indices_;
  std::vector<double> weights_;
  std::vector<double> degrees_;
  double total_weight_ = 0.0;
  double max_degree_ = 0.0;
};

/// Graph induced on `nodes`; node r of the result is nodes[r].
SparseGraph induced_subgraph(const SparseGraph& graph, std::span<const NodeId> nodes);

/// Relabels node i as perm[i].
SparseGraph permute_nodes(const SparseGraph& graph, std::span<const NodeId> perm);

/// Number of connected components (ignores zero-weight edges).
std::size_t connected_components(const SparseGraph& graph);

}  // namespace btv
