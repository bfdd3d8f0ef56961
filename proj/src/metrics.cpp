#include "btv/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "btv/io.hpp"

namespace btv {

namespace {

struct Contingency {
  std::vector<std::vector<double>> counts;  // [predicted][truth]
};

Contingency contingency(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("label vectors differ in length (" + std::to_string(predicted.size()) +
                                " vs " + std::to_string(truth.size()) + ")");
  }
  const Labels p = relabel_contiguous(predicted);
  const Labels t = relabel_contiguous(truth);
  Contingency c;
  c.counts.assign(static_cast<std::size_t>(p.community_count()),
                  std::vector<double>(static_cast<std::size_t>(t.community_count()), 0.0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    c.counts[static_cast<std::size_t>(p.assignment[i])][static_cast<std::size_t>(t.assignment[i])] += 1.0;
  }
  return c;
}

// Exhaustive search over injective maps from the smaller side into the larger.
double exhaustive_best(const std::vector<std::vector<double>>& score) {
  const std::size_t rows = score.size();
  const std::size_t cols = rows ? score[0].size() : 0;
  const bool transpose = rows > cols;
  const std::size_t small = transpose ? cols : rows;
  const std::size_t large = transpose ? rows : cols;
  auto at = [&](std::size_t s, std::size_t l) { return transpose ? score[l][s] : score[s][l]; };

  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t s = 0; s < small; ++s) total += at(s, perm[s]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

double purity(const Labels& predicted, const Labels& truth) {
  const Contingency c = contingency(predicted, truth);
  if (predicted.size() == 0) return 1.0;
  double hits = 0.0;
  for (const auto& row : c.counts) hits += *std::max_element(row.begin(), row.end());
  return hits / static_cast<double>(predicted.size());
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& score) {
  // Hungarian algorithm (shortest augmenting paths with potentials) on a
  // square cost matrix of side max(rows, cols), cost = −score, zero padding.
  const std::size_t rows = score.size();
  const std::size_t cols = rows ? score[0].size() : 0;
  const std::size_t n = std::max(rows, cols);
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i < rows && j < cols) ? -score[i][j] : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);  // match[col] = row, 1-based
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j] - 1;
    if (i < rows && j - 1 < cols) assignment[i] = static_cast<int>(j - 1);
  }
  return assignment;
}

double classification_rate(const Labels& predicted, const Labels& truth) {
  const Contingency c = contingency(predicted, truth);
  if (predicted.size() == 0) return 1.0;
  const std::size_t rows = c.counts.size();
  const std::size_t cols = c.counts[0].size();
  const std::size_t labels = std::max(rows, cols);
  const auto n = static_cast<double>(predicted.size());
  if (labels <= 6) return exhaustive_best(c.counts) / n;
  if (labels <= static_cast<std::size_t>(kExactMatchingLimit)) {
    const auto match = max_weight_assignment(c.counts);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (match[r] >= 0) total += c.counts[r][static_cast<std::size_t>(match[r])];
    }
    return total / n;
  }
  return purity(predicted, truth);
}

double consistency(const RunBatch& batch, BatchField field, double tol) {
  if (batch.runs.empty()) throw std::invalid_argument("consistency of an empty batch");
  auto value = [field](const RunRecord& r) {
    return field == BatchField::Modularity ? r.modularity : r.classification;
  };
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : batch.runs) best = std::max(best, value(r));
  const double bar = (1.0 - tol) * best;
  const auto hits = std::count_if(batch.runs.begin(), batch.runs.end(),
                                  [&](const RunRecord& r) { return value(r) >= bar; });
  return static_cast<double>(hits) / static_cast<double>(batch.runs.size());
}

void save_batch(const std::filesystem::path& path, const RunBatch& batch) {
  std::ostringstream out;
  out << "seed,modularity,classification,wall_time_ms\n";
  for (const auto& r : batch.runs) {
    out << r.seed << ',' << format_double(r.modularity) << ',' << format_double(r.classification) << ','
        << format_double(r.wall_time_ms) << '\n';
  }
  write_file_atomically(path, out.str());
}

RunBatch load_batch(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  RunBatch batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("seed", 0) == 0) continue;
    std::istringstream row(line);
    RunRecord r;
    char c1 = 0;
    std::string rest;
    if (!(row >> r.seed >> c1) || c1 != ',' || !std::getline(row, rest)) {
      throw ParseError(path, line_no, "expected seed,modularity,classification,wall_time_ms");
    }
    // strtod accepts "nan", which marks runs without ground truth.
    char* end = nullptr;
    r.modularity = std::strtod(rest.c_str(), &end);
    if (*end != ',') throw ParseError(path, line_no, "bad modularity");
    r.classification = std::strtod(end + 1, &end);
    if (*end != ',') throw ParseError(path, line_no, "bad classification");
    r.wall_time_ms = std::strtod(end + 1, &end);
    batch.runs.push_back(r);
  }
  return batch;
}

}  // namespace btv
