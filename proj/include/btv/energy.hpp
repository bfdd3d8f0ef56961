#pragma once

#include <span>

#include "btv/graph.hpp"
#include "btv/partition.hpp"

// Energy functionals on a SparseGraph. All sums over node pairs run over
// ordered pairs, matching the 2m normalization. Dimension and range errors
// throw std::invalid_argument.
namespace btv {

/// Sum of w_ij over i in S, j outside S.
double cut(const SparseGraph& graph, std::span<const NodeId> subset);

/// Sum of degrees over S.
double volume(const SparseGraph& graph, std::span<const NodeId> subset);

/// ½ Σ_ij w_ij |f_i − f_j| for a node function f.
double graph_tv(const SparseGraph& graph, std::span<const double> f);

/// Column-summed TV of an N x n̂ matrix.
double graph_tv(const SparseGraph& graph, const Matrix& u);

/// trace(uᵀ L u) = ½ Σ_ij w_ij ‖u_i − u_j‖².
double dirichlet_energy(const SparseGraph& graph, const Matrix& u);

/// kᵀu, the 1 x n̂ vector of column volumes.
Vector column_volumes(const SparseGraph& graph, const Matrix& u);

/// Newman-Girvan modularity with resolution γ. Throws std::domain_error when 2m = 0.
double modularity(const SparseGraph& graph, const Labels& labels, double gamma);

/// Σ_ℓ [Cut(A_ℓ, A_ℓᶜ) + (γ/2m)(vol A_ℓ)²].
double balanced_cut_I(const SparseGraph& graph, const Labels& labels, double gamma);

/// Σ_ℓ [Cut(A_ℓ, A_ℓᶜ) + (γ/2m)(vol A_ℓ − 2m/n̂)²] + γ·2m/n̂, with ℓ over n̂ columns
/// (labels must lie in [0, n̂)).
double balanced_cut_II(const SparseGraph& graph, const Labels& labels, double gamma, int nhat);

/// |u|_TV + (γ/2m)‖kᵀu‖².
double balanced_tv_I(const SparseGraph& graph, const Matrix& u, double gamma);

/// |u|_TV + (γ/2m)‖kᵀu − 2m/n̂‖² + γ·2m/n̂ with n̂ = u.cols().
double balanced_tv_II(const SparseGraph& graph, const Matrix& u, double gamma);

/// Π_ℓ ¼‖v − e_ℓ‖²; zero exactly at the simplex corners.
double multiwell_potential(const Eigen::Ref<const Eigen::RowVectorXd>& row);

/// Ginzburg-Landau energy uᵀLu + (1/ε) Σ_i P(u_i) + (γ/2m)‖kᵀu‖². Diagnostic only.
double gl_energy(const SparseGraph& graph, const Matrix& u, double gamma, double epsilon);

/// balanced_tv_I(u) + λ Σ_{(i,ℓ) ∈ χ} (u_iℓ − f_iℓ)².
double ssl_energy(const SparseGraph& graph, const Matrix& u, double gamma, const Supervision& sup);

}  // namespace btv
