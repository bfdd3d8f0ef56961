#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "btv/build.hpp"
#include "btv/mbo.hpp"
#include "btv/partitioner.hpp"

namespace btv::cli {

/// Bad command line; the message names the offending flag.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Command { Generate, BuildGraph, Partition, Metrics };
enum class InputKind { None, Edges, Features, Generator };
enum class GeneratorKind { TwoMoons, Planted };

struct RunSpec {
  Command command = Command::Partition;

  InputKind input = InputKind::None;
  std::filesystem::path edges_path;
  std::filesystem::path features_path;
  GeneratorKind generator = GeneratorKind::TwoMoons;
  TwoMoonsParams moons;
  PlantedPartitionParams planted;

  std::size_t knn = 13;
  std::size_t scaling_neighbor = 0;  // 0: same as knn

  MboConfig mbo;
  PartitionStrategy strategy = FixedStrategy{};
  InitMode init = InitMode::Random;

  std::optional<std::filesystem::path> supervision_path;
  double supervision_weight = 100.0;
  std::optional<std::filesystem::path> truth_path;

  // metrics
  std::optional<std::filesystem::path> labels_path;
  std::optional<std::filesystem::path> batch_path;
  double consistency_tol = 0.02;

  /// Output path (generate, build-graph) or prefix (partition).
  std::string out;
  std::optional<std::filesystem::path> truth_out;
  bool trace = false;
  std::size_t repeat = 1;
  std::optional<std::filesystem::path> basis_cache_dir;
};

/// --help was given; `text` is the rendered help.
struct HelpRequested {
  std::string text;
};

/// args[0] is the program name. Throws UsageError or HelpRequested.
RunSpec parse_args(const std::vector<std::string>& args);

/// Runs the command; returns the process exit code. Diagnostics go to `err`.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// parse_args + run, mapping usage errors to exit code 2.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace btv::cli
