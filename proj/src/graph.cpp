#include "btv/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace btv {

namespace {

std::string edge_str(NodeId u, NodeId v) {
  return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
}

}  // namespace

SparseGraph SparseGraph::from_edges(std::size_t n_nodes, std::span<const Edge> edges) {
  struct Arc {
    NodeId from;
    NodeId to;
    double w;
  };
  std::vector<Arc> arcs;
  arcs.reserve(2 * edges.size());
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n_nodes ||
        static_cast<std::size_t>(e.v) >= n_nodes) {
      throw std::invalid_argument("edge " + edge_str(e.u, e.v) + " out of range for " +
                                  std::to_string(n_nodes) + " nodes");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw std::invalid_argument("edge " + edge_str(e.u, e.v) + " has invalid weight " +
                                  std::to_string(e.weight));
    }
    if (e.u == e.v) continue;
    arcs.push_back({e.u, e.v, e.weight});
    arcs.push_back({e.v, e.u, e.weight});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });

  SparseGraph g;
  g.row_offsets_.assign(n_nodes + 1, 0);
  g.col_indices_.reserve(arcs.size());
  g.weights_.reserve(arcs.size());
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (a > 0 && arcs[a].from == arcs[a - 1].from && arcs[a].to == arcs[a - 1].to) {
      if (arcs[a].w != arcs[a - 1].w) {
        throw std::invalid_argument("edge " + edge_str(arcs[a].from, arcs[a].to) +
                                    " listed twice with different weights");
      }
      continue;
    }
    g.col_indices_.push_back(arcs[a].to);
    g.weights_.push_back(arcs[a].w);
    ++g.row_offsets_[arcs[a].from + 1];
  }
  std::partial_sum(g.row_offsets_.begin(), g.row_offsets_.end(), g.row_offsets_.begin());
  g.finalize();
  return g;
}

SparseGraph SparseGraph::from_csr(std::size_t n_nodes, std::vector<std::size_t> row_offsets,
                                  std::vector<NodeId> col_indices, std::vector<double> weights) {
  if (row_offsets.size() != n_nodes + 1 || row_offsets.front() != 0 ||
      row_offsets.back() != col_indices.size() || col_indices.size() != weights.size()) {
    throw std::invalid_argument("inconsistent CSR array sizes");
  }
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (row_offsets[i] > row_offsets[i + 1]) throw std::invalid_argument("row offsets decrease");
    for (std::size_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
      const NodeId j = col_indices[p];
      if (j < 0 || static_cast<std::size_t>(j) >= n_nodes) {
        throw std::invalid_argument("column index out of range in row " + std::to_string(i));
      }
      if (static_cast<std::size_t>(j) == i) {
        throw std::invalid_argument("self-loop at node " + std::to_string(i));
      }
      if (p > row_offsets[i] && col_indices[p - 1] >= j) {
        throw std::invalid_argument("columns not strictly increasing in row " + std::to_string(i));
      }
      if (!std::isfinite(weights[p]) || weights[p] < 0.0) {
        throw std::invalid_argument("invalid weight in row " + std::to_string(i));
      }
    }
  }
  SparseGraph g;
  g.row_offsets_ = std::move(row_offsets);
  g.col_indices_ = std::move(col_indices);
  g.weights_ = std::move(weights);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    for (std::size_t p = g.row_offsets_[i]; p < g.row_offsets_[i + 1]; ++p) {
      if (g.weight(g.col_indices_[p], static_cast<NodeId>(i)) != g.weights_[p]) {
        throw std::invalid_argument("asymmetric entry " +
                                    edge_str(static_cast<NodeId>(i), g.col_indices_[p]));
      }
    }
  }
  g.finalize();
  return g;
}

void SparseGraph::finalize() {
  const std::size_t n = row_offsets_.size() - 1;
  degrees_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) s += weights_[p];
    degrees_[i] = s;
  }
  total_weight_ = std::accumulate(degrees_.begin(), degrees_.end(), 0.0);
  max_degree_ = degrees_.empty() ? 0.0 : *std::max_element(degrees_.begin(), degrees_.end());
}

double SparseGraph::weight(NodeId i, NodeId j) const {
  const auto cols = neighbors(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return neighbor_weights(i)[static_cast<std::size_t>(it - cols.begin())];
}

std::uint64_t SparseGraph::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t b = 0; b < bytes; ++b) {
      h ^= p[b];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t n = n_nodes();
  mix(&n, sizeof n);
  for (std::size_t off : row_offsets_) {
    const std::uint64_t o = off;
    mix(&o, sizeof o);
  }
  mix(col_indices_.data(), col_indices_.size() * sizeof(NodeId));
  mix(weights_.data(), weights_.size() * sizeof(double));
  return h;
}

SparseGraph induced_subgraph(const SparseGraph& graph, std::span<const NodeId> nodes) {
  std::vector<NodeId> local(graph.n_nodes(), -1);
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    if (local[nodes[r]] != -1) throw std::invalid_argument("duplicate node in subgraph set");
    local[nodes[r]] = static_cast<NodeId>(r);
  }
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const auto cols = graph.neighbors(nodes[r]);
    const auto ws = graph.neighbor_weights(nodes[r]);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      const NodeId c = local[cols[p]];
      if (c > static_cast<NodeId>(r)) edges.push_back({static_cast<NodeId>(r), c, ws[p]});
    }
  }
  return SparseGraph::from_edges(nodes.size(), edges);
}

SparseGraph permute_nodes(const SparseGraph& graph, std::span<const NodeId> perm) {
  if (perm.size() != graph.n_nodes()) throw std::invalid_argument("permutation size mismatch");
  std::vector<Edge> edges;
  edges.reserve(graph.n_edges());
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    const auto cols = graph.neighbors(static_cast<NodeId>(i));
    const auto ws = graph.neighbor_weights(static_cast<NodeId>(i));
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (cols[p] > static_cast<NodeId>(i)) edges.push_back({perm[i], perm[cols[p]], ws[p]});
    }
  }
  return SparseGraph::from_edges(graph.n_nodes(), edges);
}

std::size_t connected_components(const SparseGraph& graph) {
  const std::size_t n = graph.n_nodes();
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack;
  std::size_t count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++count;
    seen[s] = 1;
    stack.push_back(static_cast<NodeId>(s));
    while (!stack.empty()) {
      const NodeId i = stack.back();
      stack.pop_back();
      const auto cols = graph.neighbors(i);
      const auto ws = graph.neighbor_weights(i);
      for (std::size_t p = 0; p < cols.size(); ++p) {
        if (ws[p] > 0.0 && !seen[cols[p]]) {
          seen[cols[p]] = 1;
          stack.push_back(cols[p]);
        }
      }
    }
  }
  return count;
}

}  // namespace btv
