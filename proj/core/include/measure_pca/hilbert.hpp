#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "measure_pca/embeddings.hpp"

namespace measure_pca {

/// Symmetric D x D matrix of a covariance operator in whitened coordinates
/// psi = diag(sqrt(w)) phi, so that the Hilbert-Schmidt geometry is the
/// Frobenius geometry.
class CovOperator {
 public:
  /// Throws std::invalid_argument unless the matrix is square and symmetric
  /// within 1e-10 relative (Frobenius). The stored matrix is symmetrized.
  explicit CovOperator(Eigen::MatrixXd matrix);

  static CovOperator zero(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  double trace() const { return matrix_.trace(); }

  CovOperator operator-(const CovOperator& other) const;

 private:
  Eigen::MatrixXd matrix_;
};

/// Eigenpairs sorted by descending eigenvalue. Each eigenvector column has
/// its largest-magnitude entry positive (first such entry on ties).
struct SpectralDecomp {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Orthogonal projector onto span(basis); basis has q orthonormal columns.
class Projector {
 public:
  explicit Projector(Eigen::MatrixXd basis);

  std::size_t rank() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return basis_ * (basis_.transpose() * v); }

 private:
  Eigen::MatrixXd basis_;
};

/// psi_r = v_r sqrt(w_r); the dot product of whitened vectors equals the
/// embedding-space inner product.
Eigen::VectorXd whiten(const EmbeddedVector& v);

/// Whitened vectors as the rows of an n x D matrix. All must share a space tag.
Eigen::MatrixXd whitened_rows(std::span<const EmbeddedVector> vs);

/// (1/n) sum (psi_i - mean)(psi_i - mean)^T, mean = 0 when `center` is false.
///
/// Accumulation runs over the vectors in lexicographic order of their
/// coordinates, so the result is bitwise invariant under reordering of `vs`.
CovOperator empirical_covariance(std::span<const EmbeddedVector> vs, bool center);

double hs_norm(const CovOperator& a);
double hs_inner(const CovOperator& a, const CovOperator& b);

/// Cyclic Jacobi eigensolver. Converged when the off-diagonal Frobenius mass
/// falls below 1e-12 |A|_F; throws NumericalError after 100 sweeps.
SpectralDecomp spectral_decompose(const CovOperator& a);

/// Projector onto the first q eigenvectors, 1 <= q <= D.
Projector top_q_projector(const SpectralDecomp& s, std::size_t q);

/// <Sigma, I - P>_HS = tr(Sigma) - tr(B^T Sigma B). Round-off negatives above
/// -1e-9 tr(Sigma) are clamped to zero; larger negatives throw NumericalError.
double reconstruction_risk(const CovOperator& sigma, const Projector& p);

/// R(P_hat) - R(P_opt) under the population operator, where P_opt is the
/// top-q projector of sigma_pop.
double excess_risk(const CovOperator& sigma_pop, const Projector& p_hat, std::size_t q);

/// Same as above with a precomputed decomposition of sigma_pop.
double excess_risk(const CovOperator& sigma_pop, const SpectralDecomp& pop_spectrum, const Projector& p_hat,
                   std::size_t q);

/// n x q matrix whose row i is B^T (psi_i - mean).
Eigen::MatrixXd pca_scores(std::span<const EmbeddedVector> vs, const Projector& p, bool center);

/// sum_{j<=q} max{ sqrt(lambda_j T_j / n), T_j / n } with tail sums
/// T_j = sum_{k>=j} lambda_k.
double risk_bound_first_term(std::span<const double> eigenvalues, std::size_t q, std::size_t n);

}  // namespace measure_pca
