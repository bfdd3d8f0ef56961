#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "btv/graph.hpp"
#include "btv/partition.hpp"

namespace btv {

/**
 * Matrix-free M = L + (γ/m) k kᵀ with L = diag(k) − W.
 *
 * Holds a reference to the graph, which must outlive the operator. M is
 * symmetric positive semi-definite; applying it costs O(nnz) and never
 * forms k kᵀ.
 */
class OperatorM {
public:
  /// Throws std::invalid_argument unless γ > 0 and the graph has positive total weight.
  OperatorM(const SparseGraph& graph, double gamma);

  std::size_t size() const { return graph_->n_nodes(); }
  double gamma() const { return gamma_; }
  /// m = 2m / 2.
  double half_total_weight() const { return m_; }
  const SparseGraph& graph() const { return *graph_; }

  void apply(std::span<const double> v, std::span<double> out) const;
  Vector apply(const Vector& v) const;
  /// Column-wise application to an N x c block.
  Matrix apply(const Matrix& block) const;

private:
  const SparseGraph* graph_;
  double gamma_;
  double m_;
};

/// 2(1 + γ) k_max, an upper bound on ‖M‖∞.
double m_inf_norm_bound(const OperatorM& op);

/// The n_eig smallest eigenpairs of M, ascending.
struct EigenBasis {
  Vector eigenvalues;
  Matrix eigenvectors;  // N x n_eig, orthonormal columns
  double lambda_1 = 0.0;
  double m_inf_bound = 0.0;
  /// Estimate of the next eigenvalue past the basis (NaN when n_eig = N).
  double next_eigenvalue = 0.0;
  /// ‖M v_i − λ_i v_i‖₂ for each retained pair.
  Vector residuals;
  std::vector<std::string> warnings;

  std::size_t n_eig() const { return static_cast<std::size_t>(eigenvalues.size()); }
  std::size_t n_nodes() const { return static_cast<std::size_t>(eigenvectors.rows()); }
};

struct EigensolverOptions {
  /// Relative residual target: ‖M v − θ v‖ ≤ tol · ‖M‖ estimate.
  double tol = 1e-8;
  /// Restart cycles per Krylov run; 0 means 50 · n_eig.
  std::size_t max_restarts = 0;
  /// Krylov subspace size; 0 picks max(2 n_eig + 16, 40), capped at N.
  std::size_t subspace_dim = 0;
  std::uint64_t seed = 0;
};

/// Raised when the restart cap is hit; carries the residuals reached.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

private:
  std::vector<double> residuals_;
};

/**
 * Thick-restart Lanczos with full reorthogonalization for the lower end of
 * the spectrum of M.
 *
 * After the requested pairs converge, the solver restarts on the orthogonal
 * complement of the converged vectors and swaps in any Ritz value found below
 * the current largest retained eigenvalue. This catches extra copies of
 * repeated eigenvalues, which a single-vector Krylov space cannot represent.
 * A final Rayleigh-Ritz step over the retained vectors fixes the ordering.
 *
 * Throws std::invalid_argument unless 1 <= n_eig <= N, and ConvergenceError
 * when a run exceeds its restart cap.
 */
EigenBasis smallest_eigenpairs(const OperatorM& op, std::size_t n_eig, const EigensolverOptions& options = {});

/// N_eig heuristic: 5 n̂, capped at N.
std::size_t default_n_eig(int nhat, std::size_t n_nodes);

}  // namespace btv
