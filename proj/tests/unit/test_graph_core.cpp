#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "btv/energy.hpp"
#include "btv/graph.hpp"
#include "btv/partition.hpp"
#include "oracles.hpp"

using namespace btv;
using btv::testing::naive_modularity;
using btv::testing::random_connected_graph;
using btv::testing::random_graph;
using btv::testing::random_labels;

namespace {

SparseGraph path3() {
  const std::vector<Edge> e{{0, 1, 1.0}, {1, 2, 1.0}};
  return SparseGraph::from_edges(3, e);
}

SparseGraph k3() {
  const std::vector<Edge> e{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
  return SparseGraph::from_edges(3, e);
}

SparseGraph single_edge() {
  const std::vector<Edge> e{{0, 1, 1.0}};
  return SparseGraph::from_edges(2, e);
}

Matrix one_hot(const Labels& l, int nhat) { return PartitionMatrix(l, nhat).dense(); }

// Energy of a partition matrix built by hand from the definition, to 1e-12.
double direct_cut_sum(const SparseGraph& g, const Labels& l) {
  double total = 0.0;
  for (NodeId i = 0; i < static_cast<NodeId>(g.n_nodes()); ++i) {
    const auto cols = g.neighbors(i);
    const auto ws = g.neighbor_weights(i);
    for (std::size_t e = 0; e < cols.size(); ++e) {
      if (l.assignment[i] != l.assignment[cols[e]]) total += ws[e];
    }
  }
  return total;  // each boundary edge counted from both ends: Σ_ℓ cut(A_ℓ, A_ℓᶜ)
}

}  // namespace

TEST(SparseGraph, FromEdgesSymmetrizesAndCachesDegrees) {
  const std::vector<Edge> e{{0, 1, 2.0}, {2, 1, 0.5}, {3, 3, 9.0}};
  const auto g = SparseGraph::from_edges(4, e);
  EXPECT_EQ(g.n_nodes(), 4u);
  EXPECT_EQ(g.n_edges(), 2u);
  EXPECT_DOUBLE_EQ(g.weight(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.weight(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(g.weight(3, 3), 0.0);
  EXPECT_DOUBLE_EQ(g.degree(1), 2.5);
  EXPECT_DOUBLE_EQ(g.degree(3), 0.0);
  EXPECT_DOUBLE_EQ(g.total_weight(), 5.0);
  EXPECT_DOUBLE_EQ(g.max_degree(), 2.5);
}

TEST(SparseGraph, RejectsInvalidEdges) {
  const std::vector<Edge> neg{{0, 1, -1.0}};
  EXPECT_THROW(SparseGraph::from_edges(2, neg), std::invalid_argument);
  const std::vector<Edge> out{{0, 5, 1.0}};
  EXPECT_THROW(SparseGraph::from_edges(2, out), std::invalid_argument);
  const std::vector<Edge> nan{{0, 1, std::nan("")}};
  EXPECT_THROW(SparseGraph::from_edges(2, nan), std::invalid_argument);
  const std::vector<Edge> conflict{{0, 1, 1.0}, {1, 0, 2.0}};
  EXPECT_THROW(SparseGraph::from_edges(2, conflict), std::invalid_argument);
  const std::vector<Edge> dup{{0, 1, 1.0}, {1, 0, 1.0}};
  EXPECT_EQ(SparseGraph::from_edges(2, dup).n_edges(), 1u);
}

TEST(SparseGraph, FromCsrValidatesInvariants) {
  // asymmetric
  EXPECT_THROW(SparseGraph::from_csr(2, {0, 1, 1}, {1}, {1.0}), std::invalid_argument);
  // self-loop
  EXPECT_THROW(SparseGraph::from_csr(1, {0, 1}, {0}, {1.0}), std::invalid_argument);
  const auto g = SparseGraph::from_csr(2, {0, 1, 2}, {1, 0}, {3.0, 3.0});
  EXPECT_DOUBLE_EQ(g.total_weight(), 6.0);
}

TEST(SparseGraph, RandomGraphsSatisfyInvariants) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = random_graph(30, 0.2, s);
    double sum = 0.0;
    for (NodeId i = 0; i < 30; ++i) {
      double row = 0.0;
      const auto cols = g.neighbors(i);
      const auto ws = g.neighbor_weights(i);
      for (std::size_t e = 0; e < cols.size(); ++e) {
        EXPECT_NE(cols[e], i);
        EXPECT_GE(ws[e], 0.0);
        EXPECT_EQ(g.weight(cols[e], i), ws[e]);
        row += ws[e];
      }
      EXPECT_NEAR(row, g.degree(i), 1e-12 * std::max(1.0, row));
      sum += row;
    }
    EXPECT_NEAR(sum, g.total_weight(), 1e-12 * sum);
  }
}

TEST(SparseGraph, InducedSubgraphAndPermutation) {
  const auto g = k3();
  const std::vector<NodeId> nodes{0, 2};
  const auto sub = induced_subgraph(g, nodes);
  EXPECT_EQ(sub.n_nodes(), 2u);
  EXPECT_DOUBLE_EQ(sub.total_weight(), 2.0);

  const auto p = path3();
  const std::vector<NodeId> perm{2, 0, 1};
  const auto q = permute_nodes(p, perm);
  EXPECT_DOUBLE_EQ(q.weight(2, 0), 1.0);  // old (0,1)
  EXPECT_DOUBLE_EQ(q.weight(0, 1), 1.0);  // old (1,2)
  EXPECT_DOUBLE_EQ(q.weight(2, 1), 0.0);
  EXPECT_EQ(connected_components(btv::testing::two_cliques(3, 4)), 2u);
}

TEST(Cut, Examples) {
  const std::vector<NodeId> s1{0};
  EXPECT_DOUBLE_EQ(cut(path3(), s1), 1.0);
  EXPECT_DOUBLE_EQ(cut(path3(), {}), 0.0);
  const std::vector<NodeId> s12{0, 1};
  EXPECT_DOUBLE_EQ(cut(k3(), s12), 2.0);
  const std::vector<NodeId> bad{7};
  EXPECT_THROW(cut(k3(), bad), std::invalid_argument);
}

TEST(Volume, Examples) {
  const std::vector<NodeId> s1{0};
  EXPECT_DOUBLE_EQ(volume(single_edge(), s1), 1.0);
  const std::vector<NodeId> s12{0, 1};
  EXPECT_DOUBLE_EQ(volume(k3(), s12), 4.0);
  const std::vector<NodeId> all{0, 1, 2};
  EXPECT_DOUBLE_EQ(volume(k3(), all), k3().total_weight());
  const std::vector<NodeId> bad{-1};
  EXPECT_THROW(volume(k3(), bad), std::invalid_argument);
}

TEST(GraphTv, Examples) {
  const std::vector<double> ind{1.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(graph_tv(path3(), ind), 1.0);
  const std::vector<double> constant{3.0, 3.0, 3.0};
  EXPECT_DOUBLE_EQ(graph_tv(path3(), constant), 0.0);
  EXPECT_DOUBLE_EQ(graph_tv(k3(), one_hot(Labels{{0, 0, 1}}, 2)), 4.0);
  EXPECT_THROW(graph_tv(k3(), Matrix::Zero(2, 2)), std::invalid_argument);
  const std::vector<double> short_f{1.0};
  EXPECT_THROW(graph_tv(k3(), short_f), std::invalid_argument);
}

TEST(GraphTv, IndicatorColumnEqualsCut) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = random_graph(25, 0.3, s);
    const auto l = random_labels(25, 2, s + 100);
    std::vector<double> f(25);
    std::vector<NodeId> set;
    for (std::size_t i = 0; i < 25; ++i) {
      f[i] = l.assignment[i] == 1 ? 1.0 : 0.0;
      if (l.assignment[i] == 1) set.push_back(static_cast<NodeId>(i));
    }
    EXPECT_NEAR(graph_tv(g, f), cut(g, set), 1e-12 * std::max(1.0, cut(g, set)));
  }
}

TEST(Modularity, Examples) {
  const auto g = random_graph(20, 0.3, 3);
  for (double gamma : {0.3, 1.0, 2.5}) {
    EXPECT_NEAR(modularity(g, Labels{std::vector<int>(20, 0)}, gamma), 1.0 - gamma, 1e-12);
  }
  EXPECT_NEAR(modularity(single_edge(), Labels{{0, 1}}, 1.0), -0.5, 1e-15);
  EXPECT_NEAR(modularity(k3(), Labels{{0, 0, 1}}, 1.0), -2.0 / 9.0, 1e-15);
  EXPECT_THROW(modularity(SparseGraph::from_edges(3, {}), Labels{{0, 0, 0}}, 1.0), std::domain_error);
  EXPECT_THROW(modularity(k3(), Labels{{0, 1}}, 1.0), std::invalid_argument);
}

TEST(Modularity, MatchesNaiveDoubleSum) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto g = random_graph(18, 0.25, s);
    if (g.total_weight() == 0.0) continue;
    const auto l = random_labels(18, 1 + static_cast<int>(s % 5), s * 7 + 1);
    const double gamma = 0.2 + 0.1 * static_cast<double>(s % 10);
    EXPECT_NEAR(modularity(g, l, gamma), naive_modularity(g, l, gamma), 1e-12);
  }
}

TEST(BalancedCut, Examples) {
  const auto g = random_graph(15, 0.4, 9);
  EXPECT_NEAR(balanced_cut_I(g, Labels{std::vector<int>(15, 0)}, 0.7), 0.7 * g.total_weight(), 1e-12);
  EXPECT_NEAR(balanced_cut_I(single_edge(), Labels{{0, 1}}, 1.0), 3.0, 1e-15);
  EXPECT_NEAR(balanced_cut_II(single_edge(), Labels{{0, 1}}, 1.0, 2), 3.0, 1e-15);
  EXPECT_THROW(balanced_cut_II(single_edge(), Labels{{0, 1}}, 1.0, 0), std::invalid_argument);

  // Perfectly balanced volumes: quadratic term vanishes.
  const auto cliques = btv::testing::two_cliques(4, 4);
  const Labels halves{{0, 0, 0, 0, 1, 1, 1, 1}};
  EXPECT_NEAR(balanced_cut_II(cliques, halves, 1.3, 2), direct_cut_sum(cliques, halves) + 1.3 * cliques.total_weight() / 2.0,
              1e-12);
}

TEST(BalancedTv, Examples) {
  EXPECT_DOUBLE_EQ(balanced_tv_I(k3(), Matrix::Zero(3, 2), 1.0), 0.0);
  EXPECT_NEAR(balanced_tv_I(single_edge(), Matrix::Identity(2, 2), 1.0), 3.0, 1e-15);
  EXPECT_THROW(balanced_tv_I(k3(), Matrix::Zero(2, 2), 1.0), std::invalid_argument);
}

TEST(GlEnergy, Examples) {
  // Dirichlet energy tr(uᵀLu) = 2 and (γ/2m)‖kᵀu‖² = 1 give 3 for the identity on one edge.
  for (double eps : {0.01, 1.0, 50.0}) {
    EXPECT_NEAR(gl_energy(single_edge(), Matrix::Identity(2, 2), 1.0, eps), 3.0, 1e-14);
  }
  const Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(3);
  const double p0 = multiwell_potential(zero);
  EXPECT_NEAR(p0, std::pow(0.25, 3), 1e-15);
  EXPECT_NEAR(gl_energy(k3(), Matrix::Zero(3, 3), 1.0, 0.5), 3.0 * p0 / 0.5, 1e-14);
  EXPECT_THROW(gl_energy(k3(), Matrix::Zero(3, 2), 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(gl_energy(k3(), Matrix::Zero(3, 2), 1.0, -1.0), std::invalid_argument);
}

TEST(GlEnergy, PotentialVanishesOnPartitionMatrices) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = random_graph(20, 0.3, s);
    const auto l = random_labels(20, 3, s);
    const Matrix u = one_hot(l, 3);
    for (Eigen::Index i = 0; i < u.rows(); ++i) EXPECT_EQ(multiwell_potential(u.row(i)), 0.0);
    const double expected = dirichlet_energy(g, u) + balanced_tv_I(g, u, 1.0) - graph_tv(g, u);
    const double e = gl_energy(g, u, 1.0, 1e-3);
    EXPECT_TRUE(std::isfinite(e));
    EXPECT_NEAR(e, expected, 1e-10 * std::max(1.0, expected));
  }
}

TEST(SslEnergy, Examples) {
  const auto g = k3();
  const Matrix u = one_hot(Labels{{0, 0, 1}}, 2);
  Supervision none;
  none.weight = 0.0;
  none.entries = {{0, 1, 1.0}};
  EXPECT_NEAR(ssl_energy(g, u, 1.0, none), balanced_tv_I(g, u, 1.0), 1e-14);

  const std::vector<NodeId> nodes{0, 2};
  const std::vector<int> labels{0, 1};
  const auto match = Supervision::from_labels(nodes, labels, 2, 5.0);
  EXPECT_NEAR(ssl_energy(g, u, 1.0, match), balanced_tv_I(g, u, 1.0), 1e-14);

  Matrix half = u;
  half(1, 0) = 0.5;
  Supervision one;
  one.weight = 2.0;
  one.entries = {{1, 0, 1.0}};
  EXPECT_NEAR(ssl_energy(g, half, 1.0, one) - balanced_tv_I(g, half, 1.0), 0.5, 1e-14);

  Supervision bad;
  bad.weight = 1.0;
  bad.entries = {{9, 0, 1.0}};
  EXPECT_THROW(ssl_energy(g, u, 1.0, bad), std::invalid_argument);
}

TEST(PartitionMatrix, RoundTripsLabels) {
  const Labels l{{2, 0, 1, 1, 2}};
  const PartitionMatrix p(l, 3);
  EXPECT_EQ(p.labels(), l);
  const Matrix d = p.dense();
  EXPECT_TRUE(d.rowwise().sum().isApprox(Vector::Ones(5)));
  EXPECT_EQ(PartitionMatrix::from_dense(d), p);
  EXPECT_THROW(PartitionMatrix(Labels{{0, 3}}, 3), std::invalid_argument);
  Matrix two = d;
  two(0, 0) = 1.0;
  EXPECT_THROW(PartitionMatrix::from_dense(two), std::invalid_argument);
  EXPECT_EQ(relabel_contiguous(Labels{{5, 5, 2, 9}}), (Labels{{0, 0, 1, 2}}));
}

// Property tests over random instances.

TEST(EnergyProperties, EquivalentFormsAgree) {
  std::mt19937_64 rng(42);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto n = 5 + static_cast<std::size_t>(rng() % 40);
    const auto g = random_connected_graph(n, 0.2, s);
    const int nhat = 1 + static_cast<int>(rng() % 6);
    const auto l = random_labels(n, nhat, s + 1000);
    const double gamma = std::uniform_real_distribution<double>(0.05, 3.0)(rng);
    const double bc1 = balanced_cut_I(g, l, gamma);
    const double q = modularity(g, l, gamma);
    EXPECT_NEAR(q, 1.0 - bc1 / g.total_weight(), 1e-12 * std::max(1.0, std::abs(q)));
    EXPECT_NEAR(bc1, balanced_cut_II(g, l, gamma, nhat), 1e-10);
    EXPECT_NEAR(balanced_tv_I(g, one_hot(l, nhat), gamma), bc1, 1e-12 * std::max(1.0, bc1));
    EXPECT_NEAR(balanced_tv_II(g, one_hot(l, nhat), gamma), bc1, 1e-10);
  }
}

TEST(EnergyProperties, ColumnPermutationInvariance) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = random_connected_graph(20, 0.25, s);
    const auto l = random_labels(20, 4, s);
    std::vector<int> perm{2, 0, 3, 1};
    Labels permuted = l;
    for (auto& v : permuted.assignment) v = perm[static_cast<std::size_t>(v)];
    EXPECT_NEAR(modularity(g, l, 0.8), modularity(g, permuted, 0.8), 1e-12);
    EXPECT_NEAR(balanced_tv_I(g, one_hot(l, 4), 0.8), balanced_tv_I(g, one_hot(permuted, 4), 0.8), 1e-10);
  }
}

TEST(EnergyProperties, NodeRelabelingInvariance) {
  std::mt19937_64 rng(7);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t n = 25;
    const auto g = random_connected_graph(n, 0.2, s);
    const auto l = random_labels(n, 3, s + 5);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto pg = permute_nodes(g, perm);
    Labels pl;
    pl.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) pl.assignment[static_cast<std::size_t>(perm[i])] = l.assignment[i];
    const double gamma = 1.1;
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
    EXPECT_TRUE(close(modularity(g, l, gamma), modularity(pg, pl, gamma)));
    EXPECT_TRUE(close(balanced_cut_I(g, l, gamma), balanced_cut_I(pg, pl, gamma)));
    EXPECT_TRUE(close(balanced_cut_II(g, l, gamma, 3), balanced_cut_II(pg, pl, gamma, 3)));
    EXPECT_TRUE(close(balanced_tv_I(g, one_hot(l, 3), gamma), balanced_tv_I(pg, one_hot(pl, 3), gamma)));
    EXPECT_TRUE(close(gl_energy(g, one_hot(l, 3), gamma, 0.3), gl_energy(pg, one_hot(pl, 3), gamma, 0.3)));
  }
}
