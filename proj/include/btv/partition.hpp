#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "btv/graph.hpp"

namespace btv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Community index per node.
struct Labels {
  std::vector<int> assignment;

  std::size_t size() const { return assignment.size(); }
  /// max label + 1 (0 for empty labels).
  int community_count() const;
  /// Number of distinct label values actually used.
  int nonempty_count() const;

  bool operator==(const Labels&) const = default;
};

/// Maps labels onto 0..c-1 in order of first appearance.
Labels relabel_contiguous(const Labels& labels);

/**
 * N x n̂ one-hot membership matrix. Stored as labels plus a column count;
 * the dense form is produced on demand.
 */
class PartitionMatrix {
public:
  PartitionMatrix() = default;
  /// Throws std::invalid_argument if any label falls outside [0, nhat).
  PartitionMatrix(Labels labels, int nhat);

  /// Validates that every row is one-hot (entries in {0,1}, row sum 1).
  static PartitionMatrix from_dense(const Matrix& u);

  std::size_t n_rows() const { return labels_.size(); }
  int n_communities() const { return nhat_; }
  const Labels& labels() const { return labels_; }
  int community_of(std::size_t i) const { return labels_.assignment[i]; }

  Matrix dense() const;

  bool operator==(const PartitionMatrix&) const = default;

private:
  Labels labels_;
  int nhat_ = 0;
};

/// One known entry (node, community) of the target matrix f.
struct SupervisedEntry {
  NodeId node;
  int community;
  double target;
};

/// Fidelity data: mask χ (the listed entries), targets f, and weight λ.
struct Supervision {
  std::vector<SupervisedEntry> entries;
  double weight = 0.0;

  /// Full one-hot rows for each (node, label) pair.
  static Supervision from_labels(std::span<const NodeId> nodes, std::span<const int> labels,
                                 int nhat, double weight);

  /// Throws if λ < 0, an entry is out of range for (n_nodes, nhat), a target
  /// is not 0/1, or a node has more than one target equal to 1.
  void validate(std::size_t n_nodes, int nhat) const;
};

}  // namespace btv
