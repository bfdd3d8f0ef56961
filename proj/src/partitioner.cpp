#include "btv/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

#include "btv/energy.hpp"

namespace btv {

void validate_strategy(const PartitionStrategy& strategy) {
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FixedStrategy>) {
          if (s.nhat < 1) throw std::invalid_argument("nhat must be >= 1");
        } else if constexpr (std::is_same_v<S, SweepStrategy>) {
          if (s.nhat_min < 1 || s.nhat_max < s.nhat_min) {
            throw std::invalid_argument("sweep range must satisfy 1 <= min <= max");
          }
        } else {
          if (s.split_factor < 2) throw std::invalid_argument("split_factor must be >= 2");
          if (!(s.gain_tol >= 0.0)) throw std::invalid_argument("gain_tol must be >= 0");
          if (s.attempts < 1) throw std::invalid_argument("attempts must be >= 1");
        }
      },
      strategy);
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Returns labels and the within-cluster sum of squares.
std::pair<std::vector<int>, double> lloyd(const RowMatrix& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  RowMatrix centers(k, x.cols());

  // k-means++ seeding.
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  Vector d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        r -= d2(pick);
        if (r <= 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  double inertia = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      const double dist = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
      inertia += dist;
      if (labels[static_cast<std::size_t>(i)] != static_cast<int>(best)) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
    RowMatrix sums = RowMatrix::Zero(k, x.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seed an emptied center at the point worst served by its center.
        Eigen::Index far = 0;
        Vector own(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          own(i) = (x.row(i) - centers.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
        }
        own.maxCoeff(&far);
        centers.row(c) = x.row(far);
      }
    }
  }
  return {labels, inertia};
}

}  // namespace

PartitionMatrix kmeans_init(const EigenBasis& basis, int nhat, std::uint64_t seed) {
  if (nhat < 1) throw std::invalid_argument("nhat must be >= 1");
  const std::size_t n = basis.n_nodes();
  if (nhat == 1) return PartitionMatrix(Labels{std::vector<int>(n, 0)}, 1);
  if (basis.n_eig() < static_cast<std::size_t>(nhat)) {
    throw std::invalid_argument("k-means init needs at least nhat eigenvectors");
  }
  const RowMatrix x = basis.eigenvectors.leftCols(nhat);
  std::mt19937_64 rng(seed);

  constexpr int kRestarts = 5;
  std::vector<int> best;
  double best_inertia = std::numeric_limits<double>::infinity();
  bool best_complete = false;
  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    auto [labels, inertia] = lloyd(x, nhat, rng);
    std::vector<char> used(static_cast<std::size_t>(nhat), 0);
    for (int c : labels) used[static_cast<std::size_t>(c)] = 1;
    const bool complete = std::all_of(used.begin(), used.end(), [](char u) { return u != 0; });
    if ((complete && !best_complete) || (complete == best_complete && inertia < best_inertia)) {
      best = std::move(labels);
      best_inertia = inertia;
      best_complete = complete;
    }
    if (best_complete && attempt >= 1) break;
  }

  if (!best_complete) {
    // Orphaned clusters: hand each one a random node from a cluster that can spare it.
    std::vector<std::size_t> counts(static_cast<std::size_t>(nhat), 0);
    for (int c : best) ++counts[static_cast<std::size_t>(c)];
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int c = 0; c < nhat; ++c) {
      for (int guard = 0; counts[static_cast<std::size_t>(c)] == 0 && guard < 1000; ++guard) {
        const std::size_t i = pick(rng);
        if (counts[static_cast<std::size_t>(best[i])] > 1) {
          --counts[static_cast<std::size_t>(best[i])];
          best[i] = c;
          ++counts[static_cast<std::size_t>(c)];
        }
      }
    }
  }
  return PartitionMatrix(Labels{std::move(best)}, nhat);
}

MboResult solve_fixed(const SparseGraph& graph, const EigenBasis& basis, const MboConfig& config,
                      InitMode init, const Supervision* supervision) {
  if (init == InitMode::KMeans && config.nhat > 1 && basis.n_eig() >= static_cast<std::size_t>(config.nhat)) {
    const PartitionMatrix start = kmeans_init(basis, config.nhat, config.seed);
    return mbo_run(graph, basis, config, supervision, &start);
  }
  return mbo_run(graph, basis, config, supervision, nullptr);
}

MboResult sweep_nhat(const SparseGraph& graph, const SweepStrategy& range, const MboConfig& config,
                     BasisCache& cache, InitMode init, const Supervision* supervision) {
  validate_strategy(range);
  MboConfig sized = config;
  sized.nhat = range.nhat_max;
  const std::size_t n_eig = sized.resolved_n_eig(graph.n_nodes());
  EigensolverOptions eig_opts;
  eig_opts.seed = config.seed;
  const EigenBasis& basis = cache.get(graph, config.gamma, n_eig, eig_opts);

  std::optional<MboResult> best;
  for (int nhat = range.nhat_min; nhat <= range.nhat_max; ++nhat) {
    MboConfig run = config;
    run.nhat = nhat;
    MboResult r = solve_fixed(graph, basis, run, init, supervision);
    if (!best || r.modularity > best->modularity) best = std::move(r);
  }
  return std::move(*best);
}

namespace {

// Full-graph modularity bookkeeping per community: Q = Σ_c (in_c − γ vol_c²/2m) / 2m.
struct CommunityTerms {
  double inner = 0.0;
  double vol = 0.0;
};

double contribution(const CommunityTerms& t, double gamma, double two_m) {
  return (t.inner - gamma * t.vol * t.vol / two_m) / two_m;
}

}  // namespace

RecursiveResult recursive_partition(const SparseGraph& graph, const RecursiveStrategy& strategy,
                                    const MboConfig& config, const SplitObserver& observer) {
  validate_strategy(strategy);
  config.validate();
  const std::size_t n = graph.n_nodes();
  if (n == 0) throw std::invalid_argument("graph is empty");
  const double two_m = graph.total_weight();
  if (!(two_m > 0.0)) throw std::domain_error("graph has zero total weight");

  RecursiveResult result;
  result.labels.assignment.assign(n, 0);
  std::vector<std::vector<NodeId>> members(1);
  members[0].resize(n);
  for (std::size_t i = 0; i < n; ++i) members[0][i] = static_cast<NodeId>(i);
  std::vector<CommunityTerms> terms{{two_m, two_m}};
  double q = contribution(terms[0], config.gamma, two_m);

  std::deque<int> pending{0};
  std::uint64_t split_index = 0;
  while (!pending.empty()) {
    const int community = pending.front();
    pending.pop_front();
    const std::vector<NodeId> nodes = members[static_cast<std::size_t>(community)];
    if (nodes.size() < strategy.min_size || nodes.size() < 2) continue;
    const SparseGraph sub = induced_subgraph(graph, nodes);
    if (!(sub.total_weight() > 0.0)) continue;
    ++result.attempted_splits;

    MboConfig local = config;
    local.nhat = std::min<int>(strategy.split_factor, static_cast<int>(nodes.size()));
    local.n_eig = 0;
    EigensolverOptions eig_opts;
    eig_opts.seed = config.seed + split_index;
    const EigenBasis basis =
        smallest_eigenpairs(OperatorM(sub, config.gamma), local.resolved_n_eig(sub.n_nodes()), eig_opts);

    // Best split over the attempts, scored by full-graph modularity gain.
    double best_gain = -std::numeric_limits<double>::infinity();
    std::vector<int> best_labels;
    std::vector<CommunityTerms> best_terms;
    for (int a = 0; a < strategy.attempts; ++a) {
      local.seed = config.seed + 7919 * split_index + static_cast<std::uint64_t>(a);
      const MboResult r = solve_fixed(sub, basis, local, a == 0 ? InitMode::KMeans : InitMode::Random);
      const Labels parts = relabel_contiguous(r.labels);
      const int n_parts = parts.community_count();
      if (n_parts < 2) continue;
      std::vector<CommunityTerms> part_terms(static_cast<std::size_t>(n_parts));
      for (std::size_t r_i = 0; r_i < nodes.size(); ++r_i) {
        const int p = parts.assignment[r_i];
        part_terms[static_cast<std::size_t>(p)].vol += graph.degree(nodes[r_i]);
        const auto cols = sub.neighbors(static_cast<NodeId>(r_i));
        const auto ws = sub.neighbor_weights(static_cast<NodeId>(r_i));
        for (std::size_t e = 0; e < cols.size(); ++e) {
          if (parts.assignment[static_cast<std::size_t>(cols[e])] == p) part_terms[static_cast<std::size_t>(p)].inner += ws[e];
        }
      }
      double gain = -contribution(terms[static_cast<std::size_t>(community)], config.gamma, two_m);
      for (const auto& t : part_terms) gain += contribution(t, config.gamma, two_m);
      if (gain > best_gain) {
        best_gain = gain;
        best_labels = parts.assignment;
        best_terms = std::move(part_terms);
      }
    }
    ++split_index;
    if (best_labels.empty() || !(best_gain > strategy.gain_tol)) continue;

    // Accept: part 0 keeps the community id, the others get fresh ids.
    std::vector<int> ids(best_terms.size());
    ids[0] = community;
    for (std::size_t p = 1; p < ids.size(); ++p) {
      ids[p] = static_cast<int>(members.size());
      members.emplace_back();
      terms.emplace_back();
    }
    members[static_cast<std::size_t>(community)].clear();
    for (std::size_t r_i = 0; r_i < nodes.size(); ++r_i) {
      const int id = ids[static_cast<std::size_t>(best_labels[r_i])];
      members[static_cast<std::size_t>(id)].push_back(nodes[r_i]);
      result.labels.assignment[static_cast<std::size_t>(nodes[r_i])] = id;
    }
    for (std::size_t p = 0; p < ids.size(); ++p) terms[static_cast<std::size_t>(ids[p])] = best_terms[p];
    q += best_gain;
    ++result.accepted_splits;
    if (observer) observer(result.labels, q);
    for (int id : ids) pending.push_back(id);
  }

  result.labels = relabel_contiguous(result.labels);
  result.modularity = q;
  return result;
}

}  // namespace btv
