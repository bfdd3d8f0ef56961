#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "btv/build.hpp"
#include "btv/energy.hpp"
#include "oracles.hpp"

using namespace btv;

namespace {

FeatureMatrix points(std::initializer_list<std::initializer_list<double>> rows) {
  FeatureMatrix f;
  f.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) f.values(r, c++) = v;
    ++r;
  }
  return f;
}

void expect_valid_graph(const SparseGraph& g) {
  double total = 0.0;
  for (NodeId i = 0; i < static_cast<NodeId>(g.n_nodes()); ++i) {
    const auto cols = g.neighbors(i);
    const auto ws = g.neighbor_weights(i);
    double row = 0.0;
    for (std::size_t e = 0; e < cols.size(); ++e) {
      ASSERT_NE(cols[e], i);
      ASSERT_GT(ws[e], 0.0);
      ASSERT_LE(ws[e], 1.0);
      ASSERT_EQ(g.weight(cols[e], i), ws[e]);
      row += ws[e];
    }
    ASSERT_NEAR(row, g.degree(i), 1e-12 * std::max(1.0, row));
    total += row;
  }
  ASSERT_NEAR(total, g.total_weight(), 1e-12 * std::max(1.0, total));
}

}  // namespace

TEST(TwoMoons, ShapeAndLabels) {
  TwoMoonsParams p;
  p.n_points = 2000;
  p.ambient_dim = 100;
  const auto [f, truth] = two_moons(p);
  EXPECT_EQ(f.n_points(), 2000u);
  EXPECT_EQ(f.dim(), 100u);
  EXPECT_EQ(truth.size(), 2000u);
  EXPECT_EQ(std::count(truth.assignment.begin(), truth.assignment.end(), 0), 1000);
  EXPECT_EQ(truth.assignment.front(), 0);
  EXPECT_EQ(truth.assignment.back(), 1);
}

TEST(TwoMoons, NoiselessPointsLieOnArcs) {
  TwoMoonsParams p;
  p.n_points = 200;
  p.ambient_dim = 5;
  p.noise_sigma = 0.0;
  const auto [f, truth] = two_moons(p);
  for (std::size_t i = 0; i < f.n_points(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double x = f.values(r, 0), y = f.values(r, 1);
    if (truth.assignment[i] == 0) {
      EXPECT_NEAR(x * x + y * y, 1.0, 1e-12);
      EXPECT_GE(y, -1e-12);
    } else {
      EXPECT_NEAR((x - 1.0) * (x - 1.0) + (y - 0.5) * (y - 0.5), 1.0, 1e-12);
      EXPECT_LE(y, 0.5 + 1e-12);
    }
    for (Eigen::Index c = 2; c < 5; ++c) EXPECT_EQ(f.values(r, c), 0.0);
  }
}

TEST(TwoMoons, DeterministicPerSeedAndValidated) {
  TwoMoonsParams p;
  p.n_points = 100;
  p.ambient_dim = 10;
  p.seed = 5;
  EXPECT_EQ(two_moons(p).first.values, two_moons(p).first.values);
  auto q = p;
  q.seed = 6;
  EXPECT_NE(two_moons(p).first.values, two_moons(q).first.values);
  q.ambient_dim = 1;
  EXPECT_THROW(two_moons(q), std::invalid_argument);
  q.ambient_dim = 3;
  q.noise_sigma = -1.0;
  EXPECT_THROW(two_moons(q), std::invalid_argument);
}

TEST(KnnGraph, CollinearExample) {
  const auto f = points({{0.0}, {1.0}, {3.0}});
  const auto g = knn_graph(f, 1, 1);
  // σ = (1, 1, 2): neighbor distances 1, 1, 2.
  EXPECT_EQ(g.n_edges(), 2u);
  EXPECT_NEAR(g.weight(0, 1), std::exp(-1.0 / (1.0 * 1.0)), 1e-15);
  EXPECT_NEAR(g.weight(1, 2), std::exp(-4.0 / (1.0 * 2.0)), 1e-15);
  EXPECT_EQ(g.weight(0, 2), 0.0);
  for (NodeId i = 0; i < 3; ++i) EXPECT_EQ(g.weight(i, i), 0.0);
}

TEST(KnnGraph, DuplicatePoints) {
  // σ of a point with a duplicate falls back to its nearest positive distance.
  const auto f = points({{0.0}, {0.0}, {2.0}, {5.0}});
  const auto g = knn_graph(f, 2, 1);
  expect_valid_graph(g);
  EXPECT_NEAR(g.weight(0, 1), 1.0, 1e-15);
  const auto same = points({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
  EXPECT_THROW(knn_graph(same, 2, 1), std::invalid_argument);
}

TEST(KnnGraph, RejectsBadParameters) {
  const auto f = points({{0.0}, {1.0}, {3.0}});
  EXPECT_THROW(knn_graph(f, 0, 0), std::invalid_argument);
  EXPECT_THROW(knn_graph(f, 3, 1), std::invalid_argument);
  EXPECT_THROW(knn_graph(f, 2, 3), std::invalid_argument);
  EXPECT_THROW(knn_graph(f, 1, 0), std::invalid_argument);
}

TEST(KnnGraph, KdTreeMatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  FeatureMatrix f;
  f.values.resize(600, 4);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = normal(rng);
  const auto a = nearest_neighbors(f, 7, KnnMethod::BruteForce);
  const auto b = nearest_neighbors(f, 7, KnnMethod::KdTree);
  EXPECT_EQ(a.index, b.index);
  for (std::size_t i = 0; i < a.distance.size(); ++i) EXPECT_NEAR(a.distance[i], b.distance[i], 1e-12);
}

TEST(KnnGraph, BruteForceMatchesDirectSearch) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif;
  FeatureMatrix f;
  f.values.resize(80, 3);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = unif(rng);
  const auto nn = nearest_neighbors(f, 5, KnnMethod::BruteForce);
  for (Eigen::Index i = 0; i < 80; ++i) {
    std::vector<std::pair<double, NodeId>> all;
    for (Eigen::Index j = 0; j < 80; ++j) {
      if (j != i) all.emplace_back((f.values.row(i) - f.values.row(j)).squaredNorm(), static_cast<NodeId>(j));
    }
    std::sort(all.begin(), all.end());
    for (std::size_t r = 0; r < 5; ++r) {
      EXPECT_EQ(nn.index[static_cast<std::size_t>(i) * 5 + r], all[r].second);
      EXPECT_NEAR(nn.distance[static_cast<std::size_t>(i) * 5 + r], std::sqrt(all[r].first), 1e-12);
    }
  }
}

TEST(KnnGraph, InvariantsOnRandomClouds) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    TwoMoonsParams p;
    p.n_points = 300;
    p.ambient_dim = 6;
    p.seed = s;
    const auto g = knn_graph(two_moons(p).first, 8, 4);
    expect_valid_graph(g);
    for (NodeId i = 0; i < 300; ++i) EXPECT_GE(g.neighbors(i).size(), 8u);
  }
}

TEST(KnnGraph, RowPermutationRelabelsGraph) {
  TwoMoonsParams p;
  p.n_points = 150;
  p.ambient_dim = 4;
  p.seed = 11;
  const auto f = two_moons(p).first;
  std::vector<NodeId> perm(150);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  FeatureMatrix pf;
  pf.values.resize(150, 4);
  for (std::size_t i = 0; i < 150; ++i) pf.values.row(perm[i]) = f.values.row(static_cast<Eigen::Index>(i));
  const auto g = knn_graph(f, 6, 6);
  const auto expected = permute_nodes(g, perm);
  const auto actual = knn_graph(pf, 6, 6);
  ASSERT_EQ(actual.n_stored(), expected.n_stored());
  for (NodeId i = 0; i < 150; ++i) {
    const auto cols = expected.neighbors(i);
    const auto ws = expected.neighbor_weights(i);
    for (std::size_t e = 0; e < cols.size(); ++e) EXPECT_NEAR(actual.weight(i, cols[e]), ws[e], 1e-14);
  }
}

TEST(KnnGraph, NoiselessMoonsHavePositiveGroundTruthModularity) {
  TwoMoonsParams p;
  p.n_points = 400;
  p.ambient_dim = 3;
  p.noise_sigma = 0.0;
  const auto [f, truth] = two_moons(p);
  for (std::size_t k : {2u, 5u, 13u}) {
    const auto g = knn_graph(f, k, k);
    for (double gamma : {0.2, 0.5, 1.0}) EXPECT_GT(modularity(g, truth, gamma), 0.0);
  }
}

TEST(NonlocalMeans, SinglePixelIsNormalizedSpectrum) {
  Cube cube{1, 1, 3, {3.0, 0.0, 4.0}};
  const auto f = nonlocal_means_features(cube, 1);
  ASSERT_EQ(f.dim(), 3u);
  EXPECT_NEAR(f.values(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(f.values(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(f.values(0, 2), 0.8, 1e-15);
}

TEST(NonlocalMeans, DimensionAndUnitRows) {
  Cube cube{3, 3, 2, {}};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  for (int i = 0; i < 18; ++i) cube.data.push_back(unif(rng));
  const auto f = nonlocal_means_features(cube, 3);
  EXPECT_EQ(f.n_points(), 9u);
  EXPECT_EQ(f.dim(), 18u);
  for (Eigen::Index r = 0; r < 9; ++r) EXPECT_NEAR(f.values.row(r).norm(), 1.0, 1e-12);
}

TEST(NonlocalMeans, CenterCarriesLargestSpatialWeight) {
  // Constant cube: every patch entry of a band equals the same value, so the
  // feature profile is the spatial weight profile itself.
  Cube cube{4, 5, 1, std::vector<double>(20, 2.0)};
  const auto f = nonlocal_means_features(cube, 5);
  for (Eigen::Index r = 1; r < 20; ++r) EXPECT_TRUE(f.values.row(r).isApprox(f.values.row(0), 1e-14));
  const double sigma = nonlocal_means_spatial_sigma(5);
  const double center = f.values(0, 12);
  EXPECT_NEAR(f.values(0, 13) / center, std::exp(-1.0 / (2.0 * sigma * sigma)), 1e-12);
  for (Eigen::Index c = 0; c < 25; ++c) EXPECT_LE(f.values(0, c), center);
}

TEST(NonlocalMeans, RejectsBadInput) {
  Cube cube{2, 2, 1, std::vector<double>(4, 1.0)};
  EXPECT_THROW(nonlocal_means_features(cube, 2), std::invalid_argument);
  EXPECT_THROW(nonlocal_means_features(cube, 0), std::invalid_argument);
  EXPECT_THROW(nonlocal_means_features(Cube{}, 3), std::invalid_argument);
}

TEST(PlantedPartition, NoOutEdgesGivesDisconnectedBlocks) {
  PlantedPartitionParams p;
  p.n_nodes = 120;
  p.n_communities = 4;
  p.avg_degree_in = 12.0;
  p.avg_degree_out = 0.0;
  const auto [g, truth] = planted_partition(p);
  for (NodeId i = 0; i < 120; ++i) {
    for (NodeId j : g.neighbors(i)) EXPECT_EQ(truth.assignment[i], truth.assignment[j]);
  }
  EXPECT_EQ(btv::connected_components(g), 4u);
}

TEST(PlantedPartition, ExpectedDegreeWithinFivePercent) {
  PlantedPartitionParams p;
  double total = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    p.seed = s;
    total += planted_partition(p).first.total_weight();
  }
  const double expected = static_cast<double>(p.n_nodes) * (p.avg_degree_in + p.avg_degree_out);
  EXPECT_NEAR(total / 10.0, expected, 0.05 * expected);
}

TEST(PlantedPartition, DeterministicAndValidated) {
  PlantedPartitionParams p;
  p.seed = 3;
  const auto a = planted_partition(p).first;
  const auto b = planted_partition(p).first;
  EXPECT_EQ(a.content_hash(), b.content_hash());
  EXPECT_EQ(std::vector<NodeId>(a.col_indices().begin(), a.col_indices().end()),
            std::vector<NodeId>(b.col_indices().begin(), b.col_indices().end()));
  p.avg_degree_in = 100.0;  // block size 50 → p_in > 1
  EXPECT_THROW(planted_partition(p), std::invalid_argument);
}
