#include "btv/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace btv {

OperatorM::OperatorM(const SparseGraph& graph, double gamma) : graph_(&graph), gamma_(gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(graph.total_weight() > 0.0)) throw std::invalid_argument("graph has zero total weight");
  m_ = 0.5 * graph.total_weight();
}

void OperatorM::apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = size();
  if (v.size() != n || out.size() != n) throw std::invalid_argument("operator dimension mismatch");
  const auto k = graph_->degrees();
  double kv = 0.0;
  for (std::size_t i = 0; i < n; ++i) kv += k[i] * v[i];
  const double coef = gamma_ / m_ * kv;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = graph_->neighbors(static_cast<NodeId>(i));
    const auto ws = graph_->neighbor_weights(static_cast<NodeId>(i));
    double wv = 0.0;
    for (std::size_t p = 0; p < cols.size(); ++p) wv += ws[p] * v[cols[p]];
    out[i] = k[i] * v[i] - wv + coef * k[i];
  }
}

Vector OperatorM::apply(const Vector& v) const {
  Vector out(v.size());
  apply(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())),
        std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Matrix OperatorM::apply(const Matrix& block) const {
  Matrix out(block.rows(), block.cols());
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    apply(std::span<const double>(block.col(c).data(), static_cast<std::size_t>(block.rows())),
          std::span<double>(out.col(c).data(), static_cast<std::size_t>(out.rows())));
  }
  return out;
}

double m_inf_norm_bound(const OperatorM& op) {
  return 2.0 * (1.0 + op.gamma()) * op.graph().max_degree();
}

std::size_t default_n_eig(int nhat, std::size_t n_nodes) {
  return std::min<std::size_t>(5 * static_cast<std::size_t>(std::max(nhat, 1)), n_nodes);
}

namespace {

struct RitzPairs {
  Vector values;
  Matrix vectors;
  Vector residual_estimates;
};

// Thick-restart Lanczos for the `want` smallest eigenpairs of M restricted to
// the orthogonal complement of `locked`.
class RestartedLanczos {
public:
  RestartedLanczos(const OperatorM& op, const Matrix& locked, std::mt19937_64& rng, double tol,
                   std::size_t max_restarts, std::size_t subspace_dim)
      : op_(op), locked_(locked), rng_(rng), tol_(tol), max_restarts_(max_restarts),
        subspace_dim_(subspace_dim) {}

  RitzPairs run(std::size_t want) {
    const auto n = static_cast<Eigen::Index>(op_.size());
    const Eigen::Index free_dim = n - locked_.cols();
    want = std::min<std::size_t>(want, static_cast<std::size_t>(free_dim));
    const Eigen::Index m = std::min<Eigen::Index>(
        free_dim, subspace_dim_ ? static_cast<Eigen::Index>(subspace_dim_)
                                : std::max<Eigen::Index>(2 * static_cast<Eigen::Index>(want) + 16, 40));
    const Eigen::Index w_count = static_cast<Eigen::Index>(want);

    Matrix basis(n, m + 1);
    Matrix h = Matrix::Zero(m, m);
    Eigen::Index kept = 0;
    basis.col(0) = random_unit_vector(basis, 0);

    Vector ritz_values;
    Matrix ritz_coeffs;
    Vector estimates;
    for (std::size_t cycle = 0;; ++cycle) {
      double residual_norm = 0.0;
      for (Eigen::Index j = kept; j < m; ++j) {
        Vector w = op_.apply(Vector(basis.col(j)));
        scale_ = std::max(scale_, w.norm());
        const Vector coeffs = orthogonalize(w, basis, j + 1);
        h.col(j).head(j + 1) = coeffs;
        h.row(j).head(j + 1) = coeffs.transpose();
        double beta = w.norm();
        if (beta <= breakdown_threshold()) {
          // Invariant subspace: continue with a fresh direction, coupling zero.
          beta = 0.0;
          if (j + 1 < m) w = random_unit_vector(basis, j + 1);
        } else {
          w /= beta;
        }
        if (j + 1 < m || beta > 0.0) basis.col(j + 1) = w;
        if (j + 1 == m) residual_norm = beta;
      }

      Eigen::SelfAdjointEigenSolver<Matrix> small(h);
      ritz_values = small.eigenvalues();
      ritz_coeffs = small.eigenvectors();
      scale_ = std::max(scale_, ritz_values.cwiseAbs().maxCoeff());
      estimates = residual_norm * ritz_coeffs.row(m - 1).cwiseAbs().transpose();

      const bool done = (estimates.head(w_count).array() <= tol_ * scale_).all();
      if (done || m == free_dim) break;
      if (cycle + 1 >= max_restarts_) {
        std::ostringstream msg;
        msg << "Lanczos did not converge in " << max_restarts_ << " restarts; residuals:";
        std::vector<double> res(estimates.data(), estimates.data() + w_count);
        for (double r : res) msg << ' ' << r;
        throw ConvergenceError(msg.str(), std::move(res));
      }

      // Thick restart: keep the leading Ritz vectors plus the residual direction.
      kept = std::min<Eigen::Index>(m - 1, w_count + (m - w_count) / 2);
      const Vector residual_dir = basis.col(m);
      basis.leftCols(kept) = basis.leftCols(m) * ritz_coeffs.leftCols(kept);
      h.setZero();
      h.diagonal().head(kept) = ritz_values.head(kept);
      if (residual_norm > 0.0) {
        basis.col(kept) = residual_dir;
      } else {
        basis.col(kept) = random_unit_vector(basis, kept);
      }
    }

    RitzPairs out;
    out.values = ritz_values.head(w_count);
    out.vectors = basis.leftCols(m) * ritz_coeffs.leftCols(w_count);
    out.residual_estimates = estimates.head(w_count);
    return out;
  }

  double scale() const { return scale_; }

private:
  double breakdown_threshold() const {
    return std::max(scale_, 1.0) * 64.0 * std::numeric_limits<double>::epsilon();
  }

  // Two passes of classical Gram-Schmidt against the locked vectors and the
  // first `cols` basis vectors. Returns the accumulated basis coefficients.
  Vector orthogonalize(Vector& w, const Matrix& basis, Eigen::Index cols) const {
    Vector coeffs = Vector::Zero(cols);
    for (int pass = 0; pass < 2; ++pass) {
      if (locked_.cols() > 0) w.noalias() -= locked_ * (locked_.transpose() * w);
      const Vector c = basis.leftCols(cols).transpose() * w;
      w.noalias() -= basis.leftCols(cols) * c;
      coeffs += c;
    }
    return coeffs;
  }

  Vector random_unit_vector(const Matrix& basis, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vector v(basis.rows());
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng_);
      const double before = v.norm();
      orthogonalize(v, basis, cols);
      const double after = v.norm();
      if (after > 1e-8 * before) return v / after;
    }
    throw std::runtime_error("could not draw a vector outside the current Krylov basis");
  }

  const OperatorM& op_;
  const Matrix& locked_;
  std::mt19937_64& rng_;
  double tol_;
  std::size_t max_restarts_;
  std::size_t subspace_dim_;
  double scale_ = 0.0;
};

}  // namespace

EigenBasis smallest_eigenpairs(const OperatorM& op, std::size_t n_eig, const EigensolverOptions& options) {
  const std::size_t n = op.size();
  if (n_eig < 1 || n_eig > n) {
    throw std::invalid_argument("n_eig must satisfy 1 <= n_eig <= N (n_eig=" + std::to_string(n_eig) +
                                ", N=" + std::to_string(n) + ")");
  }
  const std::size_t max_restarts = options.max_restarts ? options.max_restarts : 50 * n_eig;
  std::mt19937_64 rng(options.seed);

  Matrix none(static_cast<Eigen::Index>(n), 0);
  RestartedLanczos first(op, none, rng, options.tol, max_restarts, options.subspace_dim);
  RitzPairs found = first.run(n_eig);
  double scale = first.scale();

  Matrix vectors = found.vectors;
  Vector values = found.values;
  double next = std::numeric_limits<double>::quiet_NaN();

  // Deflated verification: any Ritz value of the complement below the
  // current largest retained value is a missed eigenpair.
  for (std::size_t round = 0; round < n_eig + 16 && n_eig < n; ++round) {
    RestartedLanczos probe(op, vectors, rng, options.tol, max_restarts, options.subspace_dim);
    const RitzPairs extra = probe.run(std::min(n_eig, n - n_eig));
    scale = std::max(scale, probe.scale());
    next = extra.values(0);
    if (!(extra.values(0) < values.maxCoeff())) break;

    const Eigen::Index total = values.size() + extra.values.size();
    Vector all_values(total);
    all_values << values, extra.values;
    Matrix all_vectors(vectors.rows(), total);
    all_vectors << vectors, extra.vectors;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return all_values(a) < all_values(b); });
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n_eig); ++r) {
      values(r) = all_values(order[static_cast<std::size_t>(r)]);
      vectors.col(r) = all_vectors.col(order[static_cast<std::size_t>(r)]);
    }
  }

  // Re-orthonormalize and rotate to Ritz vectors of the retained subspace.
  Eigen::HouseholderQR<Matrix> qr(vectors);
  Matrix q = qr.householderQ() * Matrix::Identity(vectors.rows(), vectors.cols());
  const Matrix mq = op.apply(q);
  Matrix projected = q.transpose() * mq;
  projected = 0.5 * (projected + projected.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> rr(projected);

  EigenBasis basis;
  basis.eigenvalues = rr.eigenvalues();
  basis.eigenvectors = q * rr.eigenvectors();
  const Matrix residual = mq * rr.eigenvectors() - basis.eigenvectors * basis.eigenvalues.asDiagonal();
  basis.residuals = residual.colwise().norm().transpose();
  basis.lambda_1 = basis.eigenvalues(0);
  basis.m_inf_bound = m_inf_norm_bound(op);
  basis.next_eigenvalue = next;
  if (std::isfinite(next) && next - basis.eigenvalues(basis.eigenvalues.size() - 1) < 1e-6 * scale) {
    basis.warnings.push_back("eigenvalue " + std::to_string(n_eig) + " and the next one are clustered (" +
                             std::to_string(basis.eigenvalues(basis.eigenvalues.size() - 1)) + " vs " +
                             std::to_string(next) + "); the truncated basis splits a cluster");
  }
  return basis;
}

}  // namespace btv
