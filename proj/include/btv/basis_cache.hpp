#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <tuple>

#include "btv/eigensolver.hpp"

namespace btv {

/*
 * On-disk EigenBasis, all fields little-endian:
 *
 *   offset  size  field
 *   0       8     magic "BTVEIG01"
 *   8       8     N (u64)
 *   16      8     n_eig (u64)
 *   24      8     gamma (f64)
 *   32      8     graph content hash (u64)
 *   40      8     lambda_1 (f64)
 *   48      8     m_inf_bound (f64)
 *   56      8     next_eigenvalue (f64, NaN when n_eig = N)
 *   64      ...   n_eig eigenvalues (f64), n_eig residuals (f64),
 *                 N x n_eig eigenvectors (f64, column-major)
 */
inline constexpr char kBasisMagic[8] = {'B', 'T', 'V', 'E', 'I', 'G', '0', '1'};

void save_basis(const std::filesystem::path& path, const EigenBasis& basis, double gamma,
                std::uint64_t graph_hash);

/// Throws std::runtime_error on a bad magic, truncated file or key mismatch
/// when `expect_*` are given.
EigenBasis load_basis(const std::filesystem::path& path, std::optional<double> expect_gamma = {},
                      std::optional<std::uint64_t> expect_hash = {});

/**
 * Memoizes EigenBasis by (graph hash, γ, n_eig), in memory and optionally in
 * a directory. A request for fewer vectors than a cached basis holds is
 * served by truncating that basis.
 */
class BasisCache {
public:
  BasisCache() = default;
  explicit BasisCache(std::filesystem::path directory);

  const EigenBasis& get(const SparseGraph& graph, double gamma, std::size_t n_eig,
                        const EigensolverOptions& options = {});

  /// Number of eigensolver invocations made through this cache.
  std::size_t computations() const { return computations_; }

private:
  using Key = std::tuple<std::uint64_t, double, std::size_t>;
  std::filesystem::path file_for(const Key& key) const;

  std::optional<std::filesystem::path> directory_;
  std::map<Key, EigenBasis> entries_;
  std::size_t computations_ = 0;
};

/// Leading `n_eig` pairs of a basis.
EigenBasis truncate_basis(const EigenBasis& basis, std::size_t n_eig);

}  // namespace btv
