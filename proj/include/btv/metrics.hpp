#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "btv/partition.hpp"

namespace btv {

/// (1/N) Σ_α max_β #{i : predicted_i = α, truth_i = β}.
double purity(const Labels& predicted, const Labels& truth);

/// Largest label count for which classification_rate solves the matching exactly.
inline constexpr int kExactMatchingLimit = 12;

/**
 * Best fraction of nodes matched under a one-to-one pairing of predicted and
 * true labels. Exact (exhaustive up to 6 labels, Hungarian up to 12); beyond
 * that the purity is returned.
 */
double classification_rate(const Labels& predicted, const Labels& truth);

/// Optimal one-to-one assignment maximizing the total score of a rows x cols
/// table (rows, cols may differ). Returns the matched column per row, −1 if
/// the row is unmatched.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& score);

struct RunRecord {
  std::uint64_t seed = 0;
  double modularity = 0.0;
  double classification = 0.0;
  double wall_time_ms = 0.0;
};

struct RunBatch {
  std::vector<RunRecord> runs;
};

enum class BatchField { Modularity, Classification };

/// Fraction of runs whose value is at least (1 − tol) · best.
double consistency(const RunBatch& batch, BatchField field, double tol);

/// CSV "seed,modularity,classification,wall_time_ms".
void save_batch(const std::filesystem::path& path, const RunBatch& batch);
RunBatch load_batch(const std::filesystem::path& path);

}  // namespace btv
