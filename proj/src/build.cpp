#include "btv/build.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace btv {

void FeatureMatrix::validate() const {
  if (values.rows() < 1 || values.cols() < 1) throw std::invalid_argument("feature matrix is empty");
  if (!values.allFinite()) throw std::invalid_argument("feature matrix has non-finite entries");
}

std::pair<FeatureMatrix, GroundTruth> two_moons(const TwoMoonsParams& params) {
  if (params.ambient_dim < 2) throw std::invalid_argument("two moons needs ambient_dim >= 2");
  if (params.n_points < 1) throw std::invalid_argument("two moons needs at least one point");
  if (!(params.noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");

  const auto n = static_cast<Eigen::Index>(params.n_points);
  const auto d = static_cast<Eigen::Index>(params.ambient_dim);
  const Eigen::Index upper = n / 2;

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 1.0);

  FeatureMatrix points{Matrix::Zero(n, d)};
  GroundTruth truth;
  truth.assignment.resize(params.n_points);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = angle(rng);
    if (i < upper) {
      points.values(i, 0) = std::cos(t);
      points.values(i, 1) = std::sin(t);
    } else {
      points.values(i, 0) = 1.0 - std::cos(t);
      points.values(i, 1) = 0.5 - std::sin(t);
    }
    truth.assignment[static_cast<std::size_t>(i)] = i < upper ? 0 : 1;
  }
  if (params.noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) points.values(i, j) += params.noise_sigma * noise(rng);
    }
  }
  return {std::move(points), std::move(truth)};
}

FeatureMatrix nonlocal_means_features(const Cube& cube, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw std::invalid_argument("window must be odd and >= 1");
  if (cube.height == 0 || cube.width == 0 || cube.bands == 0) throw std::invalid_argument("cube is empty");
  if (cube.data.size() != cube.height * cube.width * cube.bands) {
    throw std::invalid_argument("cube data size does not match its dimensions");
  }
  const auto half = static_cast<long>(window / 2);
  const double sigma = nonlocal_means_spatial_sigma(window);

  std::vector<double> spatial;
  spatial.reserve(window * window);
  for (long dr = -half; dr <= half; ++dr) {
    for (long dc = -half; dc <= half; ++dc) {
      spatial.push_back(std::exp(-static_cast<double>(dr * dr + dc * dc) / (2.0 * sigma * sigma)));
    }
  }

  const auto clamp = [](long x, std::size_t size) {
    return static_cast<std::size_t>(std::clamp(x, 0L, static_cast<long>(size) - 1));
  };
  const auto n_pixels = static_cast<Eigen::Index>(cube.height * cube.width);
  const auto dim = static_cast<Eigen::Index>(window * window * cube.bands);
  FeatureMatrix out{Matrix(n_pixels, dim)};
  for (std::size_t r = 0; r < cube.height; ++r) {
    for (std::size_t c = 0; c < cube.width; ++c) {
      const auto row = static_cast<Eigen::Index>(r * cube.width + c);
      Eigen::Index col = 0;
      std::size_t offset = 0;
      for (long dr = -half; dr <= half; ++dr) {
        for (long dc = -half; dc <= half; ++dc, ++offset) {
          const std::size_t rr = clamp(static_cast<long>(r) + dr, cube.height);
          const std::size_t cc = clamp(static_cast<long>(c) + dc, cube.width);
          for (std::size_t b = 0; b < cube.bands; ++b) {
            out.values(row, col++) = spatial[offset] * cube.at(rr, cc, b);
          }
        }
      }
      const double norm = out.values.row(row).norm();
      if (norm > 0.0) out.values.row(row) /= norm;
    }
  }
  return out;
}

std::pair<SparseGraph, GroundTruth> planted_partition(const PlantedPartitionParams& params) {
  const std::size_t n = params.n_nodes;
  const std::size_t c = params.n_communities;
  if (c < 1 || n < c) throw std::invalid_argument("need 1 <= n_communities <= n_nodes");
  const double block = static_cast<double>(n) / static_cast<double>(c);
  const double p_in = block > 1.0 ? params.avg_degree_in / (block - 1.0) : 0.0;
  const double p_out = c > 1 ? params.avg_degree_out / (static_cast<double>(n) - block) : 0.0;
  if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0)) {
    throw std::invalid_argument("requested degrees give edge probabilities outside [0, 1] (p_in=" +
                                std::to_string(p_in) + ", p_out=" + std::to_string(p_out) + ")");
  }
  if ((block <= 1.0 && params.avg_degree_in > 0.0) || (c == 1 && params.avg_degree_out > 0.0)) {
    throw std::invalid_argument("requested degrees cannot be realized with these block sizes");
  }

  GroundTruth truth;
  truth.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) truth.assignment[i] = static_cast<int>(i * c / n);

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = truth.assignment[i] == truth.assignment[j] ? p_in : p_out;
      if (coin(rng) < p) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
    }
  }
  return {SparseGraph::from_edges(n, edges), std::move(truth)};
}

}  // namespace btv
