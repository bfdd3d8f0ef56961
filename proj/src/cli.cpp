#include "btv/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>

#include <CLI11.hpp>

#include "btv/basis_cache.hpp"
#include "btv/energy.hpp"
#include "btv/io.hpp"
#include "btv/metrics.hpp"
#include "btv/parallel.hpp"

namespace btv::cli {

namespace {

void add_generator_flags(CLI::App* cmd, RunSpec& spec) {
  cmd->add_option("--n", spec.moons.n_points,
                  "Number of points (two-moons, default 2000) or nodes (planted, default 400)");
  cmd->add_option("--dim", spec.moons.ambient_dim, "Ambient dimension (two-moons)")->capture_default_str();
  cmd->add_option("--noise", spec.moons.noise_sigma, "Per-coordinate noise std (two-moons)")
      ->capture_default_str();
  cmd->add_option("--communities", spec.planted.n_communities, "Block count (planted)")->capture_default_str();
  cmd->add_option("--deg-in", spec.planted.avg_degree_in, "Mean within-block degree (planted)")
      ->capture_default_str();
  cmd->add_option("--deg-out", spec.planted.avg_degree_out, "Mean between-block degree (planted)")
      ->capture_default_str();
}

void add_knn_flags(CLI::App* cmd, RunSpec& spec) {
  cmd->add_option("--knn", spec.knn, "Neighbors per point in the similarity graph")->capture_default_str();
  cmd->add_option("--scaling-neighbor", spec.scaling_neighbor,
                  "Neighbor rank that sets the local Gaussian scale (default: --knn)");
}

GeneratorKind generator_from(const std::string& name) {
  return name == "planted" ? GeneratorKind::Planted : GeneratorKind::TwoMoons;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("--sweep: expected MIN..MAX, got \"" + text + "\"");
  }
}

}  // namespace

RunSpec parse_args(const std::vector<std::string>& args) {
  RunSpec spec;
  CLI::App app{"Modularity-based community detection with balanced TV MBO"};
  app.name(args.empty() ? "balanced-tv" : args[0]);
  app.require_subcommand(1);

  std::string kind;
  std::uint64_t gen_seed = 0;
  std::string truth_out;

  auto* gen = app.add_subcommand("generate", "Generate a synthetic benchmark");
  gen->add_option("kind", kind, "two-moons or planted")->required()->check(CLI::IsMember({"two-moons", "planted"}));
  add_generator_flags(gen, spec);
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", spec.out, "Features CSV (two-moons) or edge list (planted)")->required();
  gen->add_option("--truth-out", truth_out, "Ground-truth labels CSV (default: <out>.truth.csv)");

  auto* build = app.add_subcommand("build-graph", "Build a k-NN similarity graph from a feature CSV");
  std::string build_features;
  build->add_option("--features", build_features, "Feature CSV")->required()->check(CLI::ExistingFile);
  add_knn_flags(build, spec);
  build->add_option("--out", spec.out, "Edge list to write")->required();

  auto* part = app.add_subcommand("partition", "Partition a graph");
  std::string edges, features, generate, supervision, truth, sweep, basis_cache;
  double supervision_weight = spec.supervision_weight;
  bool recursive = false, no_refine = false;
  std::string init = "random";
  RecursiveStrategy rec;
  int nhat = spec.mbo.nhat;
  double dt = 0.0;
  auto* o_edges = part->add_option("--edges", edges, "Edge list input")->check(CLI::ExistingFile);
  auto* o_features = part->add_option("--features", features, "Feature CSV input (k-NN graph is built)")
                         ->check(CLI::ExistingFile);
  auto* o_generate = part->add_option("--generate", generate, "Generated input: two-moons or planted")
                         ->check(CLI::IsMember({"two-moons", "planted"}));
  o_edges->excludes(o_features)->excludes(o_generate);
  o_features->excludes(o_generate);
  add_generator_flags(part, spec);
  part->add_option("--gen-seed", gen_seed, "Generator seed for --generate")->capture_default_str();
  add_knn_flags(part, spec);
  part->add_option("--gamma", spec.mbo.gamma, "Resolution parameter")->capture_default_str();
  auto* o_nhat = part->add_option("--nhat", nhat, "Number of communities (fixed strategy)")->capture_default_str();
  auto* o_sweep = part->add_option("--sweep", sweep, "Try every n̂ in MIN..MAX, keep the best modularity");
  auto* o_rec = part->add_flag("--recursive", recursive, "Recursive modularity-gated splitting");
  o_nhat->excludes(o_sweep)->excludes(o_rec);
  o_sweep->excludes(o_rec);
  part->add_option("--split-factor", rec.split_factor, "Parts per recursive split")->capture_default_str();
  part->add_option("--min-size", rec.min_size, "Smallest community considered for splitting")
      ->capture_default_str();
  part->add_option("--gain-tol", rec.gain_tol, "Minimum modularity gain to accept a split")->capture_default_str();
  part->add_option("--neig", spec.mbo.n_eig, "Eigenpairs to compute (default 5 n̂)");
  auto* o_dt = part->add_option("--dt", dt, "Fixed MBO timestep (default: automatic)");
  part->add_option("--max-iters", spec.mbo.max_iters, "MBO iteration cap per stage")->capture_default_str();
  part->add_flag("--no-refine", no_refine, "Skip the smaller-timestep continuation");
  part->add_option("--refine-factor", spec.mbo.refine_factor, "Timestep factor of the continuation")
      ->capture_default_str();
  part->add_option("--init", init, "Initial partition: random or kmeans")
      ->check(CLI::IsMember({"random", "kmeans"}))
      ->capture_default_str();
  part->add_option("--seed", spec.mbo.seed, "Seed of the first run")->capture_default_str();
  part->add_option("--repeat", spec.repeat, "Runs with seeds seed..seed+repeat-1")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  part->add_option("--supervision", supervision, "CSV node,label of known memberships")->check(CLI::ExistingFile);
  part->add_option("--supervision-weight", supervision_weight, "Fidelity weight λ")->capture_default_str();
  part->add_option("--truth", truth, "Ground-truth labels CSV for scoring")->check(CLI::ExistingFile);
  part->add_option("--out", spec.out, "Output prefix (default balanced_tv)");
  part->add_flag("--trace", spec.trace, "Write the per-iteration energy trace");
  part->add_option("--basis-cache", basis_cache, "Directory for cached eigenbases");

  auto* met = app.add_subcommand("metrics", "Score labels or summarize a batch CSV");
  std::string labels_path, met_truth, batch;
  met->add_option("--labels", labels_path, "Predicted labels CSV")->check(CLI::ExistingFile);
  met->add_option("--truth", met_truth, "Ground-truth labels CSV")->check(CLI::ExistingFile);
  met->add_option("--batch", batch, "Batch CSV from partition --repeat")->check(CLI::ExistingFile);
  met->add_option("--tol", spec.consistency_tol, "Consistency tolerance")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  spec.moons.seed = gen_seed;
  spec.planted.seed = gen_seed;
  spec.planted.n_nodes = spec.moons.n_points;
  if (!truth_out.empty()) spec.truth_out = truth_out;

  if (gen->parsed()) {
    spec.command = Command::Generate;
    spec.input = InputKind::Generator;
    spec.generator = generator_from(kind);
    if (gen->count("--n") == 0 && spec.generator == GeneratorKind::Planted) spec.planted.n_nodes = 400;
  } else if (build->parsed()) {
    spec.command = Command::BuildGraph;
    spec.input = InputKind::Features;
    spec.features_path = build_features;
  } else if (part->parsed()) {
    spec.command = Command::Partition;
    if (!edges.empty()) {
      spec.input = InputKind::Edges;
      spec.edges_path = edges;
    } else if (!features.empty()) {
      spec.input = InputKind::Features;
      spec.features_path = features;
    } else if (!generate.empty()) {
      spec.input = InputKind::Generator;
      spec.generator = generator_from(generate);
      if (part->count("--n") == 0 && spec.generator == GeneratorKind::Planted) spec.planted.n_nodes = 400;
    } else {
      throw UsageError("partition: one of --edges, --features or --generate is required");
    }
    spec.mbo.nhat = nhat;
    if (*o_dt) {
      if (!(dt > 0.0)) throw UsageError("--dt must be positive");
      spec.mbo.dt = dt;
    }
    spec.mbo.refine = !no_refine;
    spec.init = init == "kmeans" ? InitMode::KMeans : InitMode::Random;
    if (recursive) {
      spec.strategy = rec;
    } else if (!sweep.empty()) {
      const auto [lo, hi] = parse_range(sweep);
      spec.strategy = SweepStrategy{lo, hi};
    } else {
      spec.strategy = FixedStrategy{nhat};
    }
    if (!supervision.empty()) {
      if (recursive) throw UsageError("--supervision cannot be combined with --recursive");
      spec.supervision_path = supervision;
    }
    spec.supervision_weight = supervision_weight;
    if (!truth.empty()) spec.truth_path = truth;
    if (!basis_cache.empty()) spec.basis_cache_dir = basis_cache;
    if (spec.out.empty()) spec.out = "balanced_tv";
    try {
      validate_strategy(spec.strategy);
      spec.mbo.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    spec.command = Command::Metrics;
    if (!labels_path.empty()) spec.labels_path = labels_path;
    if (!met_truth.empty()) spec.truth_path = met_truth;
    if (!batch.empty()) spec.batch_path = batch;
    if (!spec.batch_path && !(spec.labels_path && spec.truth_path)) {
      throw UsageError("metrics: give --labels with --truth, or --batch");
    }
  }
  if (spec.scaling_neighbor == 0) spec.scaling_neighbor = spec.knn;
  return spec;
}

namespace {

std::filesystem::path default_truth_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension();
  p += ".truth.csv";
  return p;
}

struct LoadedInput {
  SparseGraph graph;
  std::optional<Labels> truth;
};

LoadedInput load_input(const RunSpec& spec) {
  LoadedInput in;
  switch (spec.input) {
    case InputKind::Edges:
      in.graph = load_edge_list(spec.edges_path);
      break;
    case InputKind::Features:
      in.graph = knn_graph(load_features(spec.features_path), spec.knn, spec.scaling_neighbor);
      break;
    case InputKind::Generator:
      if (spec.generator == GeneratorKind::TwoMoons) {
        auto [points, truth] = two_moons(spec.moons);
        in.graph = knn_graph(points, spec.knn, spec.scaling_neighbor);
        in.truth = std::move(truth);
      } else {
        auto [graph, truth] = planted_partition(spec.planted);
        in.graph = std::move(graph);
        in.truth = std::move(truth);
      }
      break;
    case InputKind::None:
      throw std::invalid_argument("no input source");
  }
  if (spec.truth_path) in.truth = load_labels(*spec.truth_path);
  if (in.truth && in.truth->size() != in.graph.n_nodes()) {
    throw std::runtime_error("ground truth has " + std::to_string(in.truth->size()) + " labels for " +
                             std::to_string(in.graph.n_nodes()) + " nodes");
  }
  return in;
}

int run_generate(const RunSpec& spec, std::ostream& out) {
  const auto truth_path = spec.truth_out ? *spec.truth_out : default_truth_path(spec.out);
  if (spec.generator == GeneratorKind::TwoMoons) {
    const auto [points, truth] = two_moons(spec.moons);
    save_features(spec.out, points);
    save_labels(truth_path, truth);
    out << "wrote " << points.n_points() << " x " << points.dim() << " features to " << spec.out << "\n";
  } else {
    const auto [graph, truth] = planted_partition(spec.planted);
    save_edge_list(spec.out, graph);
    save_labels(truth_path, truth);
    out << "wrote " << graph.n_nodes() << " nodes, " << graph.n_edges() << " edges to " << spec.out << "\n";
  }
  out << "ground truth in " << truth_path.string() << "\n";
  return 0;
}

int run_build(const RunSpec& spec, std::ostream& out) {
  const auto graph = knn_graph(load_features(spec.features_path), spec.knn, spec.scaling_neighbor);
  save_edge_list(spec.out, graph);
  out << "wrote " << graph.n_nodes() << " nodes, " << graph.n_edges() << " edges to " << spec.out << "\n";
  return 0;
}

int run_metrics(const RunSpec& spec, std::ostream& out) {
  if (spec.labels_path && spec.truth_path) {
    const Labels pred = load_labels(*spec.labels_path);
    const Labels truth = load_labels(*spec.truth_path);
    out << "purity: " << purity(pred, truth) << "\n";
    out << "classification: " << classification_rate(pred, truth) << "\n";
  }
  if (spec.batch_path) {
    const RunBatch batch = load_batch(*spec.batch_path);
    out << "runs: " << batch.runs.size() << "\n";
    out << "modularity consistency: " << consistency(batch, BatchField::Modularity, spec.consistency_tol) << "\n";
    out << "classification consistency: " << consistency(batch, BatchField::Classification, spec.consistency_tol)
        << "\n";
  }
  return 0;
}

void save_trace(const std::filesystem::path& path, const MboResult& r) {
  std::string text = "iteration,balanced_tv_I,modularity\n";
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i) {
    text += std::to_string(i + 1) + ',' + format_double(r.energy_trace[i]) + ',' +
            format_double(r.modularity_trace[i]) + '\n';
  }
  write_file_atomically(path, text);
}

int run_partition(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const LoadedInput input = load_input(spec);
  const SparseGraph& graph = input.graph;

  std::optional<Supervision> supervision;
  if (spec.supervision_path) {
    const auto pairs = load_node_labels(*spec.supervision_path);
    int nhat = spec.mbo.nhat;
    if (const auto* sweep = std::get_if<SweepStrategy>(&spec.strategy)) nhat = sweep->nhat_min;
    supervision = Supervision::from_labels(pairs.nodes, pairs.labels, nhat, spec.supervision_weight);
    supervision->validate(graph.n_nodes(), nhat);
  }

  BasisCache cache = spec.basis_cache_dir ? BasisCache(*spec.basis_cache_dir) : BasisCache();
  EigensolverOptions eig_opts;
  eig_opts.seed = spec.mbo.seed;
  const EigenBasis* basis = nullptr;
  if (const auto* fixed = std::get_if<FixedStrategy>(&spec.strategy)) {
    MboConfig sized = spec.mbo;
    sized.nhat = fixed->nhat;
    basis = &cache.get(graph, spec.mbo.gamma, sized.resolved_n_eig(graph.n_nodes()), eig_opts);
  } else if (const auto* sweep = std::get_if<SweepStrategy>(&spec.strategy)) {
    MboConfig sized = spec.mbo;
    sized.nhat = sweep->nhat_max;
    basis = &cache.get(graph, spec.mbo.gamma, sized.resolved_n_eig(graph.n_nodes()), eig_opts);
  }
  if (basis) {
    for (const auto& w : basis->warnings) err << "warning: " << w << "\n";
  }

  struct Outcome {
    Labels labels;
    std::optional<MboResult> mbo;
    RunRecord record;
    std::exception_ptr error;
  };
  std::vector<Outcome> outcomes(spec.repeat);
  std::mutex cache_mutex;
  parallel_for(
      spec.repeat,
      [&](std::size_t r) {
        Outcome& o = outcomes[r];
        try {
          MboConfig config = spec.mbo;
          config.seed = spec.mbo.seed + r;
          const auto start = std::chrono::steady_clock::now();
          if (const auto* fixed = std::get_if<FixedStrategy>(&spec.strategy)) {
            config.nhat = fixed->nhat;
            o.mbo = solve_fixed(graph, *basis, config, spec.init, supervision ? &*supervision : nullptr);
            o.labels = o.mbo->labels;
          } else if (const auto* sweep = std::get_if<SweepStrategy>(&spec.strategy)) {
            std::lock_guard lock(cache_mutex);  // the cache is already warm; serialize lookups anyway
            o.mbo = sweep_nhat(graph, *sweep, config, cache, spec.init, supervision ? &*supervision : nullptr);
            o.labels = o.mbo->labels;
          } else {
            o.labels = recursive_partition(graph, std::get<RecursiveStrategy>(spec.strategy), config).labels;
          }
          const auto stop = std::chrono::steady_clock::now();
          o.record.seed = config.seed;
          o.record.modularity = modularity(graph, o.labels, spec.mbo.gamma);
          o.record.classification = input.truth ? classification_rate(o.labels, *input.truth)
                                                : std::numeric_limits<double>::quiet_NaN();
          o.record.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        } catch (...) {
          o.error = std::current_exception();
        }
      },
      1);
  for (const auto& o : outcomes) {
    if (o.error) std::rethrow_exception(o.error);
  }

  RunBatch batch;
  std::size_t best = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    batch.runs.push_back(outcomes[r].record);
    if (outcomes[r].record.modularity > outcomes[best].record.modularity) best = r;
  }
  const std::string prefix = spec.out;
  save_labels(prefix + ".labels.csv", outcomes[best].labels);
  save_batch(prefix + ".batch.csv", batch);
  if (spec.trace) {
    if (outcomes[best].mbo) {
      save_trace(prefix + ".trace.csv", *outcomes[best].mbo);
    } else {
      err << "warning: --trace has no effect with --recursive\n";
    }
  }

  std::vector<double> times;
  double best_class = -std::numeric_limits<double>::infinity();
  for (const auto& rec : batch.runs) {
    times.push_back(rec.wall_time_ms);
    if (input.truth) best_class = std::max(best_class, rec.classification);
  }
  std::sort(times.begin(), times.end());
  const double median = times.size() % 2 ? times[times.size() / 2]
                                         : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
  out << "nodes: " << graph.n_nodes() << ", edges: " << graph.n_edges() << "\n";
  out << "runs: " << batch.runs.size() << "\n";
  out << "best modularity: " << outcomes[best].record.modularity << " (seed " << outcomes[best].record.seed
      << ", " << outcomes[best].labels.nonempty_count() << " communities)\n";
  if (input.truth) out << "best classification: " << best_class << "\n";
  out << "median wall time ms: " << median << "\n";
  out << "labels: " << prefix << ".labels.csv\n";
  return 0;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    switch (spec.command) {
      case Command::Generate:
        return run_generate(spec, out);
      case Command::BuildGraph:
        return run_build(spec, out);
      case Command::Partition:
        return run_partition(spec, out, err);
      case Command::Metrics:
        return run_metrics(spec, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(parse_args(args), out, err);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace btv::cli
