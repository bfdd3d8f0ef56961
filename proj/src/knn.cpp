#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include "btv/build.hpp"
#include "btv/parallel.hpp"

namespace btv {

namespace {

// (squared distance, index); ordering defines the neighbor ranking.
using Candidate = std::pair<double, NodeId>;

// Row-major copy so that each point is contiguous.
class PointSet {
public:
  explicit PointSet(const Matrix& m)
      : n_(static_cast<std::size_t>(m.rows())), d_(static_cast<std::size_t>(m.cols())), data_(n_ * d_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) {
        data_[i * d_ + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  const double* point(std::size_t i) const { return data_.data() + i * d_; }
  double coord(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }

  double squared_distance(std::size_t a, std::size_t b) const {
    const double* x = point(a);
    const double* y = point(b);
    double s = 0.0;
    for (std::size_t j = 0; j < d_; ++j) {
      const double t = x[j] - y[j];
      s += t * t;
    }
    return s;
  }

private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> data_;
};

// Keeps the k smallest candidates; the heap top is the current worst.
class BoundedHeap {
public:
  explicit BoundedHeap(std::size_t k) : k_(k) {}

  void offer(Candidate c) {
    if (heap_.size() < k_) {
      heap_.push(c);
    } else if (c < heap_.top()) {
      heap_.pop();
      heap_.push(c);
    }
  }
  bool full() const { return heap_.size() == k_; }
  double worst() const { return heap_.top().first; }

  std::vector<Candidate> sorted() && {
    std::vector<Candidate> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

private:
  std::size_t k_;
  std::priority_queue<Candidate> heap_;
};

std::vector<Candidate> brute_force_query(const PointSet& pts, std::size_t q, std::size_t k) {
  BoundedHeap heap(k);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j != q) heap.offer({pts.squared_distance(q, j), static_cast<NodeId>(j)});
  }
  return std::move(heap).sorted();
}

// Exact k-d tree: splits on the widest coordinate at the median.
class KdTree {
public:
  explicit KdTree(const PointSet& pts) : pts_(pts), order_(pts.size()) {
    std::iota(order_.begin(), order_.end(), 0);
    if (!order_.empty()) root_ = build(0, order_.size());
  }

  std::vector<Candidate> query(std::size_t q, std::size_t k) const {
    BoundedHeap heap(k);
    search(root_, q, heap);
    return std::move(heap).sorted();
  }

private:
  static constexpr std::size_t kLeafSize = 16;

  struct Node {
    std::size_t lo, hi;  // range in order_
    std::size_t axis = 0;
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t lo, std::size_t hi) {
    Node node{lo, hi};
    if (hi - lo > kLeafSize) {
      std::size_t best_axis = 0;
      double best_spread = -1.0;
      for (std::size_t a = 0; a < pts_.dim(); ++a) {
        double mn = pts_.coord(order_[lo], a), mx = mn;
        for (std::size_t p = lo + 1; p < hi; ++p) {
          const double x = pts_.coord(order_[p], a);
          mn = std::min(mn, x);
          mx = std::max(mx, x);
        }
        if (mx - mn > best_spread) {
          best_spread = mx - mn;
          best_axis = a;
        }
      }
      const std::size_t mid = lo + (hi - lo) / 2;
      std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo),
                       order_.begin() + static_cast<std::ptrdiff_t>(mid),
                       order_.begin() + static_cast<std::ptrdiff_t>(hi),
                       [&](std::size_t a, std::size_t b) {
                         return pts_.coord(a, best_axis) < pts_.coord(b, best_axis);
                       });
      node.axis = best_axis;
      node.split = pts_.coord(order_[mid], best_axis);
      const int self = static_cast<int>(nodes_.size());
      nodes_.push_back(node);
      const int left = build(lo, mid);
      const int right = build(mid, hi);
      nodes_[self].left = left;
      nodes_[self].right = right;
      return self;
    }
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  void search(int id, std::size_t q, BoundedHeap& heap) const {
    const Node& node = nodes_[id];
    if (node.left < 0) {
      for (std::size_t p = node.lo; p < node.hi; ++p) {
        const std::size_t j = order_[p];
        if (j != q) heap.offer({pts_.squared_distance(q, j), static_cast<NodeId>(j)});
      }
      return;
    }
    // Points left of mid have coord <= split, points right have coord >= split.
    const double diff = pts_.coord(q, node.axis) - node.split;
    const int near = diff <= 0.0 ? node.left : node.right;
    const int far = diff <= 0.0 ? node.right : node.left;
    search(near, q, heap);
    if (!heap.full() || diff * diff <= heap.worst()) search(far, q, heap);
  }

  const PointSet& pts_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace

NeighborLists nearest_neighbors(const FeatureMatrix& features, std::size_t k, KnnMethod method) {
  features.validate();
  const std::size_t n = features.n_points();
  if (k < 1 || k >= n) {
    throw std::invalid_argument("k must satisfy 1 <= k < n_points (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  }
  if (method == KnnMethod::Auto) {
    method = n <= kBruteForceKnnLimit ? KnnMethod::BruteForce : KnnMethod::KdTree;
  }
  const PointSet pts(features.values);
  std::unique_ptr<KdTree> tree;
  if (method == KnnMethod::KdTree) tree = std::make_unique<KdTree>(pts);

  NeighborLists out;
  out.k = k;
  out.index.resize(n * k);
  out.distance.resize(n * k);
  parallel_for(n, [&](std::size_t q) {
    const auto found = tree ? tree->query(q, k) : brute_force_query(pts, q, k);
    for (std::size_t r = 0; r < k; ++r) {
      out.index[q * k + r] = found[r].second;
      out.distance[q * k + r] = std::sqrt(found[r].first);
    }
  });
  return out;
}

SparseGraph knn_graph(const FeatureMatrix& features, std::size_t k, std::size_t scaling_neighbor,
                      KnnMethod method) {
  if (scaling_neighbor < 1 || scaling_neighbor > k) {
    throw std::invalid_argument("scaling_neighbor must satisfy 1 <= scaling_neighbor <= k");
  }
  const NeighborLists nn = nearest_neighbors(features, k, method);
  const std::size_t n = features.n_points();

  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = nn.distance[i * k + scaling_neighbor - 1];
    if (s == 0.0) {
      for (std::size_t r = 0; r < k && s == 0.0; ++r) s = nn.distance[i * k + r];
    }
    if (s == 0.0) {
      throw std::invalid_argument("point " + std::to_string(i) + " coincides with all of its " +
                                  std::to_string(k) + " nearest neighbors; local scale is zero");
    }
    sigma[i] = s;
  }

  // The weight formula is symmetric in (i, j), so taking the max over the two
  // directed lists reduces to keeping one copy of each pair.
  std::vector<Edge> edges;
  edges.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      const NodeId j = nn.index[i * k + r];
      const double d = nn.distance[i * k + r];
      const NodeId a = std::min(static_cast<NodeId>(i), j);
      const NodeId b = std::max(static_cast<NodeId>(i), j);
      edges.push_back({a, b, std::exp(-d * d / (sigma[i] * sigma[j]))});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.u != y.u ? x.u < y.u : (x.v != y.v ? x.v < y.v : x.weight > y.weight);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& x, const Edge& y) { return x.u == y.u && x.v == y.v; }),
              edges.end());
  return SparseGraph::from_edges(n, edges);
}

}  // namespace btv
