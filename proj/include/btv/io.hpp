#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "btv/build.hpp"
#include "btv/graph.hpp"
#include "btv/partition.hpp"

namespace btv {

/// Malformed input; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::filesystem::path& path, std::size_t line, const std::string& what)
      : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Edge list: "i j w" per line, 0-based ids, '#' comments, blank lines
/// ignored; a missing weight means 1. The node count is the largest id + 1
/// unless `n_nodes` is larger.
SparseGraph load_edge_list(const std::filesystem::path& path, std::size_t n_nodes = 0);
void save_edge_list(const std::filesystem::path& path, const SparseGraph& graph);

/// CSV "node,label" with header. Loading requires every node 0..N−1 exactly once.
void save_labels(const std::filesystem::path& path, const Labels& labels);
Labels load_labels(const std::filesystem::path& path);

/// Arbitrary (node, label) pairs, e.g. supervision files; header optional.
struct NodeLabelPairs {
  std::vector<NodeId> nodes;
  std::vector<int> labels;
};
NodeLabelPairs load_node_labels(const std::filesystem::path& path);

/// CSV without header, one row per point. All rows must have equal width.
FeatureMatrix load_features(const std::filesystem::path& path);
void save_features(const std::filesystem::path& path, const FeatureMatrix& features);

/// Dense CSV, one row per node.
void save_matrix(const std::filesystem::path& path, const Matrix& u);

/// Writes via a temporary sibling file and a rename.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace btv
