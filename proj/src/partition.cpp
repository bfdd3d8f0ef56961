#include "btv/partition.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace btv {

int Labels::community_count() const {
  if (assignment.empty()) return 0;
  return *std::max_element(assignment.begin(), assignment.end()) + 1;
}

int Labels::nonempty_count() const {
  std::vector<int> sorted = assignment;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

Labels relabel_contiguous(const Labels& labels) {
  std::unordered_map<int, int> remap;
  Labels out;
  out.assignment.reserve(labels.size());
  for (int c : labels.assignment) {
    auto [it, inserted] = remap.try_emplace(c, static_cast<int>(remap.size()));
    out.assignment.push_back(it->second);
  }
  return out;
}

PartitionMatrix::PartitionMatrix(Labels labels, int nhat) : labels_(std::move(labels)), nhat_(nhat) {
  if (nhat_ < 1) throw std::invalid_argument("partition needs at least one column");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int c = labels_.assignment[i];
    if (c < 0 || c >= nhat_) {
      throw std::invalid_argument("label " + std::to_string(c) + " of node " + std::to_string(i) +
                                  " outside [0, " + std::to_string(nhat_) + ")");
    }
  }
}

PartitionMatrix PartitionMatrix::from_dense(const Matrix& u) {
  Labels labels;
  labels.assignment.resize(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    int hot = -1;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      const double x = u(i, c);
      if (x == 1.0) {
        if (hot != -1) throw std::invalid_argument("row " + std::to_string(i) + " has two ones");
        hot = static_cast<int>(c);
      } else if (x != 0.0) {
        throw std::invalid_argument("row " + std::to_string(i) + " is not one-hot");
      }
    }
    if (hot == -1) throw std::invalid_argument("row " + std::to_string(i) + " has no one");
    labels.assignment[static_cast<std::size_t>(i)] = hot;
  }
  return PartitionMatrix(std::move(labels), static_cast<int>(u.cols()));
}

Matrix PartitionMatrix::dense() const {
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(n_rows()), nhat_);
  for (std::size_t i = 0; i < n_rows(); ++i) u(static_cast<Eigen::Index>(i), labels_.assignment[i]) = 1.0;
  return u;
}

Supervision Supervision::from_labels(std::span<const NodeId> nodes, std::span<const int> labels,
                                     int nhat, double weight) {
  if (nodes.size() != labels.size()) throw std::invalid_argument("supervision size mismatch");
  Supervision sup;
  sup.weight = weight;
  sup.entries.reserve(nodes.size() * static_cast<std::size_t>(nhat));
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    for (int c = 0; c < nhat; ++c) {
      sup.entries.push_back({nodes[s], c, c == labels[s] ? 1.0 : 0.0});
    }
  }
  return sup;
}

void Supervision::validate(std::size_t n_nodes, int nhat) const {
  if (!(weight >= 0.0)) throw std::invalid_argument("supervision weight must be >= 0");
  std::map<NodeId, int> ones;
  for (const auto& e : entries) {
    if (e.node < 0 || static_cast<std::size_t>(e.node) >= n_nodes || e.community < 0 ||
        e.community >= nhat) {
      throw std::invalid_argument("supervised entry (" + std::to_string(e.node) + ", " +
                                  std::to_string(e.community) + ") out of range");
    }
    if (e.target != 0.0 && e.target != 1.0) {
      throw std::invalid_argument("supervised target for node " + std::to_string(e.node) +
                                  " is not 0 or 1");
    }
    if (e.target == 1.0 && ++ones[e.node] > 1) {
      throw std::invalid_argument("node " + std::to_string(e.node) + " has two target labels");
    }
  }
}

}  // namespace btv
