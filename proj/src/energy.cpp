#include "btv/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace btv {

namespace {

std::vector<char> membership(const SparseGraph& graph, std::span<const NodeId> subset) {
  std::vector<char> in(graph.n_nodes(), 0);
  for (NodeId i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= graph.n_nodes()) {
      throw std::invalid_argument("node " + std::to_string(i) + " out of range");
    }
    in[i] = 1;
  }
  return in;
}

void check_rows(const SparseGraph& graph, const Matrix& u) {
  if (static_cast<std::size_t>(u.rows()) != graph.n_nodes()) {
    throw std::invalid_argument("matrix has " + std::to_string(u.rows()) + " rows, graph has " +
                                std::to_string(graph.n_nodes()) + " nodes");
  }
}

void check_labels(const SparseGraph& graph, const Labels& labels) {
  if (labels.size() != graph.n_nodes()) {
    throw std::invalid_argument("labels length " + std::to_string(labels.size()) +
                                " does not match " + std::to_string(graph.n_nodes()) + " nodes");
  }
  for (int c : labels.assignment) {
    if (c < 0) throw std::invalid_argument("negative community label");
  }
}

double two_m(const SparseGraph& graph) {
  const double tw = graph.total_weight();
  if (!(tw > 0.0)) throw std::domain_error("graph has zero total weight");
  return tw;
}

// Per-community cut and volume in one pass over the stored arcs.
struct CommunityStats {
  std::vector<double> cut;
  std::vector<double> vol;
};

CommunityStats community_stats(const SparseGraph& graph, const Labels& labels, int n_columns) {
  CommunityStats s{std::vector<double>(n_columns, 0.0), std::vector<double>(n_columns, 0.0)};
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    const int ci = labels.assignment[i];
    s.vol[ci] += graph.degree(static_cast<NodeId>(i));
    const auto cols = graph.neighbors(static_cast<NodeId>(i));
    const auto ws = graph.neighbor_weights(static_cast<NodeId>(i));
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (labels.assignment[cols[p]] != ci) s.cut[ci] += ws[p];
    }
  }
  return s;
}

}  // namespace

double cut(const SparseGraph& graph, std::span<const NodeId> subset) {
  const auto in = membership(graph, subset);
  double total = 0.0;
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    if (!in[i]) continue;
    const auto cols = graph.neighbors(static_cast<NodeId>(i));
    const auto ws = graph.neighbor_weights(static_cast<NodeId>(i));
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (!in[cols[p]]) total += ws[p];
    }
  }
  return total;
}

double volume(const SparseGraph& graph, std::span<const NodeId> subset) {
  const auto in = membership(graph, subset);
  double total = 0.0;
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    if (in[i]) total += graph.degree(static_cast<NodeId>(i));
  }
  return total;
}

double graph_tv(const SparseGraph& graph, std::span<const double> f) {
  if (f.size() != graph.n_nodes()) throw std::invalid_argument("vector length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    const auto cols = graph.neighbors(static_cast<NodeId>(i));
    const auto ws = graph.neighbor_weights(static_cast<NodeId>(i));
    for (std::size_t p = 0; p < cols.size(); ++p) total += ws[p] * std::abs(f[i] - f[cols[p]]);
  }
  return 0.5 * total;
}

double graph_tv(const SparseGraph& graph, const Matrix& u) {
  check_rows(graph, u);
  double total = 0.0;
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    const auto cols = graph.neighbors(static_cast<NodeId>(i));
    const auto ws = graph.neighbor_weights(static_cast<NodeId>(i));
    const auto ui = u.row(static_cast<Eigen::Index>(i));
    for (std::size_t p = 0; p < cols.size(); ++p) {
      total += ws[p] * (ui - u.row(cols[p])).cwiseAbs().sum();
    }
  }
  return 0.5 * total;
}

double dirichlet_energy(const SparseGraph& graph, const Matrix& u) {
  check_rows(graph, u);
  double total = 0.0;
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    const auto cols = graph.neighbors(static_cast<NodeId>(i));
    const auto ws = graph.neighbor_weights(static_cast<NodeId>(i));
    const auto ui = u.row(static_cast<Eigen::Index>(i));
    for (std::size_t p = 0; p < cols.size(); ++p) {
      total += ws[p] * (ui - u.row(cols[p])).squaredNorm();
    }
  }
  return 0.5 * total;
}

Vector column_volumes(const SparseGraph& graph, const Matrix& u) {
  check_rows(graph, u);
  const auto k = Eigen::Map<const Vector>(graph.degrees().data(),
                                          static_cast<Eigen::Index>(graph.n_nodes()));
  return u.transpose() * k;
}

double modularity(const SparseGraph& graph, const Labels& labels, double gamma) {
  check_labels(graph, labels);
  const double tw = two_m(graph);
  const int c = labels.community_count();
  std::vector<double> inner(c, 0.0);
  std::vector<double> vol(c, 0.0);
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    const int ci = labels.assignment[i];
    vol[ci] += graph.degree(static_cast<NodeId>(i));
    const auto cols = graph.neighbors(static_cast<NodeId>(i));
    const auto ws = graph.neighbor_weights(static_cast<NodeId>(i));
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (labels.assignment[cols[p]] == ci) inner[ci] += ws[p];
    }
  }
  double q = 0.0;
  for (int l = 0; l < c; ++l) q += inner[l] - gamma * vol[l] * vol[l] / tw;
  return q / tw;
}

double balanced_cut_I(const SparseGraph& graph, const Labels& labels, double gamma) {
  check_labels(graph, labels);
  const double tw = two_m(graph);
  const auto s = community_stats(graph, labels, labels.community_count());
  double total = 0.0;
  for (std::size_t l = 0; l < s.cut.size(); ++l) total += s.cut[l] + gamma / tw * s.vol[l] * s.vol[l];
  return total;
}

double balanced_cut_II(const SparseGraph& graph, const Labels& labels, double gamma, int nhat) {
  if (nhat < 1) throw std::invalid_argument("nhat must be >= 1");
  check_labels(graph, labels);
  if (labels.community_count() > nhat) {
    throw std::invalid_argument("labels use more than nhat communities");
  }
  const double tw = two_m(graph);
  const auto s = community_stats(graph, labels, nhat);
  const double target = tw / nhat;
  double total = 0.0;
  for (int l = 0; l < nhat; ++l) {
    const double dv = s.vol[l] - target;
    total += s.cut[l] + gamma / tw * dv * dv;
  }
  return total + gamma * target;
}

double balanced_tv_I(const SparseGraph& graph, const Matrix& u, double gamma) {
  const double tw = two_m(graph);
  return graph_tv(graph, u) + gamma / tw * column_volumes(graph, u).squaredNorm();
}

double balanced_tv_II(const SparseGraph& graph, const Matrix& u, double gamma) {
  const double tw = two_m(graph);
  const double target = tw / static_cast<double>(u.cols());
  const Vector dv = column_volumes(graph, u).array() - target;
  return graph_tv(graph, u) + gamma / tw * dv.squaredNorm() + gamma * target;
}

double multiwell_potential(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  double p = 1.0;
  for (Eigen::Index l = 0; l < row.size(); ++l) {
    // ‖v − e_ℓ‖² = ‖v‖² − 2 v_ℓ + 1, written out to stay exact at the corners.
    double d = 0.0;
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      const double diff = row(j) - (j == l ? 1.0 : 0.0);
      d += diff * diff;
    }
    p *= 0.25 * d;
  }
  return p;
}

double gl_energy(const SparseGraph& graph, const Matrix& u, double gamma, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double tw = two_m(graph);
  double potential = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) potential += multiwell_potential(u.row(i));
  return dirichlet_energy(graph, u) + potential / epsilon +
         gamma / tw * column_volumes(graph, u).squaredNorm();
}

double ssl_energy(const SparseGraph& graph, const Matrix& u, double gamma, const Supervision& sup) {
  double fidelity = 0.0;
  for (const auto& e : sup.entries) {
    if (e.node < 0 || e.node >= u.rows() || e.community < 0 || e.community >= u.cols()) {
      throw std::invalid_argument("supervised entry (" + std::to_string(e.node) + ", " +
                                  std::to_string(e.community) + ") out of range");
    }
    const double r = u(e.node, e.community) - e.target;
    fidelity += r * r;
  }
  return balanced_tv_I(graph, u, gamma) + sup.weight * fidelity;
}

}  // namespace btv
