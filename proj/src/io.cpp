#include "btv/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

namespace btv {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  return in;
}

std::vector<std::string_view> split(std::string_view line, std::string_view delims) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t start = line.find_first_not_of(delims, pos);
    if (start == std::string_view::npos) break;
    std::size_t end = line.find_first_of(delims, start);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(line.substr(start, end - start));
    pos = end;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && !token.empty();
}

bool skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

SparseGraph load_edge_list(const std::filesystem::path& path, std::size_t n_nodes) {
  auto in = open_input(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  NodeId max_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (skippable(line)) continue;
    const auto tokens = split(line, " \t\r,");
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw ParseError(path, line_no, "expected \"i j w\"");
    }
    long long i = 0, j = 0;
    double w = 1.0;
    if (!parse_number(tokens[0], i) || !parse_number(tokens[1], j)) {
      throw ParseError(path, line_no, "node ids must be integers");
    }
    if (i < 0 || j < 0 || i > INT32_MAX || j > INT32_MAX) {
      throw ParseError(path, line_no, "node id out of range");
    }
    if (tokens.size() == 3 && !parse_number(tokens[2], w)) {
      throw ParseError(path, line_no, "weight is not a number");
    }
    if (!std::isfinite(w)) throw ParseError(path, line_no, "weight is not finite");
    if (w < 0.0) throw ParseError(path, line_no, "negative weight " + std::string(tokens[2]));
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), w});
    max_id = std::max({max_id, static_cast<NodeId>(i), static_cast<NodeId>(j)});
  }
  const std::size_t n = std::max(n_nodes, static_cast<std::size_t>(max_id + 1));
  try {
    return SparseGraph::from_edges(n, edges);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void save_edge_list(const std::filesystem::path& path, const SparseGraph& graph) {
  std::ostringstream out;
  out << "# " << graph.n_nodes() << " nodes, " << graph.n_edges() << " edges\n";
  for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
    const auto cols = graph.neighbors(static_cast<NodeId>(i));
    const auto ws = graph.neighbor_weights(static_cast<NodeId>(i));
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (cols[p] > static_cast<NodeId>(i)) out << i << ' ' << cols[p] << ' ' << format_double(ws[p]) << '\n';
    }
  }
  write_file_atomically(path, out.str());
}

void save_labels(const std::filesystem::path& path, const Labels& labels) {
  std::ostringstream out;
  out << "node,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels.assignment[i] << '\n';
  write_file_atomically(path, out.str());
}

NodeLabelPairs load_node_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  NodeLabelPairs pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto tokens = split(line, ",");
    long long node = 0, label = 0;
    const bool ok = tokens.size() == 2 && parse_number(tokens[0], node) && parse_number(tokens[1], label);
    if (!ok) {
      if (pairs.nodes.empty() && tokens.size() == 2 && trim(tokens[0]) == "node") continue;  // header
      throw ParseError(path, line_no, "expected \"node,label\"");
    }
    if (node < 0 || node > INT32_MAX || label < 0 || label > INT32_MAX) {
      throw ParseError(path, line_no, "node and label must be nonnegative 32-bit integers");
    }
    pairs.nodes.push_back(static_cast<NodeId>(node));
    pairs.labels.push_back(static_cast<int>(label));
  }
  return pairs;
}

Labels load_labels(const std::filesystem::path& path) {
  const auto pairs = load_node_labels(path);
  Labels labels;
  labels.assignment.assign(pairs.nodes.size(), -1);
  for (std::size_t r = 0; r < pairs.nodes.size(); ++r) {
    const auto node = static_cast<std::size_t>(pairs.nodes[r]);
    if (node >= labels.size() || labels.assignment[node] != -1) {
      throw std::runtime_error(path.string() + ": nodes must be 0..N-1, each listed once");
    }
    labels.assignment[node] = pairs.labels[r];
  }
  return labels;
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<double> values;
  std::size_t width = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto tokens = split(line, ",");
    if (rows == 0) width = tokens.size();
    if (tokens.size() != width || width == 0) {
      throw ParseError(path, line_no, "expected " + std::to_string(width) + " columns, found " +
                                          std::to_string(tokens.size()));
    }
    for (auto t : tokens) {
      double x = 0.0;
      if (!parse_number(t, x) || !std::isfinite(x)) throw ParseError(path, line_no, "bad number");
      values.push_back(x);
    }
    ++rows;
  }
  if (rows == 0) throw std::runtime_error(path.string() + ": no feature rows");
  FeatureMatrix fm{Matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width))};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * width + c];
    }
  }
  return fm;
}

void save_features(const std::filesystem::path& path, const FeatureMatrix& features) {
  save_matrix(path, features.values);
}

void save_matrix(const std::filesystem::path& path, const Matrix& u) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      if (j) out << ',';
      out << format_double(u(i, j));
    }
    out << '\n';
  }
  write_file_atomically(path, out.str());
}

}  // namespace btv
