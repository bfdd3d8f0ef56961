#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "btv/graph.hpp"
#include "btv/partition.hpp"

namespace btv {

/// N x d point cloud, one row per point.
struct FeatureMatrix {
  Matrix values;

  std::size_t n_points() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }

  /// Throws std::invalid_argument on an empty matrix or non-finite entries.
  void validate() const;
};

using GroundTruth = Labels;

/// H x W x B data cube stored band-fastest: value(r, c, b) = data[(r*W + c)*B + b].
struct Cube {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t bands = 0;
  std::vector<double> data;

  double at(std::size_t r, std::size_t c, std::size_t b) const {
    return data[(r * width + c) * bands + b];
  }
};

struct TwoMoonsParams {
  std::size_t n_points = 2000;
  std::size_t ambient_dim = 100;
  double noise_sigma = 0.14;
  std::uint64_t seed = 0;
};

/// Two interleaved unit half-circles in the first two coordinates: the upper
/// arc centered at the origin, the lower arc centered at (1, 0.5). Every
/// coordinate then receives N(0, σ²) noise. First n/2 points carry label 0.
std::pair<FeatureMatrix, GroundTruth> two_moons(const TwoMoonsParams& params);

enum class KnnMethod { Auto, BruteForce, KdTree };

/// Largest point count searched by brute force under KnnMethod::Auto.
inline constexpr std::size_t kBruteForceKnnLimit = 20000;

/// For each point, its k nearest other points (ascending distance, ties by
/// index) and the matching Euclidean distances.
struct NeighborLists {
  std::size_t k = 0;
  std::vector<NodeId> index;     // n_points * k
  std::vector<double> distance;  // n_points * k
};

NeighborLists nearest_neighbors(const FeatureMatrix& features, std::size_t k,
                                KnnMethod method = KnnMethod::Auto);

/**
 * Symmetric k-NN similarity graph with self-tuning Gaussian weights
 * w_ij = exp(−d_ij² / (σ_i σ_j)), where σ_i is the distance from i to its
 * `scaling_neighbor`-th nearest neighbor. An edge exists when either
 * endpoint lists the other among its k nearest.
 *
 * A zero σ_i (duplicate points) falls back to the smallest positive
 * neighbor distance of i; if i has none, std::invalid_argument is thrown.
 */
SparseGraph knn_graph(const FeatureMatrix& features, std::size_t k, std::size_t scaling_neighbor,
                      KnnMethod method = KnnMethod::Auto);

/// Standard deviation, in pixels, of the spatial weight used by
/// nonlocal_means_features.
inline double nonlocal_means_spatial_sigma(std::size_t window) { return 0.5 * static_cast<double>(window); }

/**
 * Patch features for a data cube: each pixel's window x window x B
 * neighborhood (replicate-padded), each spatial offset scaled by a Gaussian
 * weight centered on the pixel, then normalized to unit length so that
 * Euclidean neighbors are cosine neighbors. Rows that are identically zero
 * stay zero.
 */
FeatureMatrix nonlocal_means_features(const Cube& cube, std::size_t window);

struct PlantedPartitionParams {
  std::size_t n_nodes = 400;
  std::size_t n_communities = 8;
  double avg_degree_in = 10.0;
  double avg_degree_out = 1.0;
  std::uint64_t seed = 0;
};

/// Unit-weight random graph with near-equal blocks; pairs inside a block are
/// joined with probability avg_in/(s−1), pairs across blocks with
/// avg_out/(N−s). Throws std::invalid_argument if either probability
/// leaves [0, 1].
std::pair<SparseGraph, GroundTruth> planted_partition(const PlantedPartitionParams& params);

}  // namespace btv
