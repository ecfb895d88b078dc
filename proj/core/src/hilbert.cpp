#include "measure_pca/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "measure_pca/error.hpp"

namespace measure_pca {

CovOperator::CovOperator(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("CovOperator: matrix must be square");
  if (!matrix_.allFinite()) throw std::invalid_argument("CovOperator: non-finite entry");
  const double norm = matrix_.norm();
  const double asym = (matrix_ - matrix_.transpose()).norm();
  if (asym > 1e-10 * norm) throw std::invalid_argument("CovOperator: matrix is not symmetric");
  if (asym > 0.0) matrix_ = 0.5 * (matrix_ + matrix_.transpose()).eval();
}

CovOperator CovOperator::zero(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return CovOperator(Eigen::MatrixXd::Zero(n, n));
}

CovOperator CovOperator::operator-(const CovOperator& other) const {
  if (dim() != other.dim()) throw std::invalid_argument("CovOperator: dimension mismatch");
  return CovOperator(matrix_ - other.matrix_);
}

Projector::Projector(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  if (basis_.cols() < 1 || basis_.cols() > basis_.rows()) {
    throw std::invalid_argument("Projector: rank must be between 1 and the dimension");
  }
}

Eigen::VectorXd whiten(const EmbeddedVector& v) {
  return (v.coords().array() * v.quad_weights().array().sqrt()).matrix();
}

Eigen::MatrixXd whitened_rows(std::span<const EmbeddedVector> vs) {
  if (vs.empty()) throw std::invalid_argument("whitened_rows: no vectors");
  const auto tag = vs.front().space_tag();
  const auto dim = static_cast<Eigen::Index>(vs.front().size());
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(vs.size()), dim);
  const Eigen::ArrayXd sqrt_w = vs.front().quad_weights().array().sqrt();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].space_tag() != tag || static_cast<Eigen::Index>(vs[i].size()) != dim) {
      throw std::invalid_argument("vectors belong to different embedding spaces");
    }
    rows.row(static_cast<Eigen::Index>(i)) = (vs[i].coords().array() * sqrt_w).matrix().transpose();
  }
  return rows;
}

CovOperator empirical_covariance(std::span<const EmbeddedVector> vs, bool center) {
  const Eigen::MatrixXd psi = whitened_rows(vs);
  const Eigen::Index n = psi.rows();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < psi.cols(); ++k) {
      if (psi(a, k) != psi(b, k)) return psi(a, k) < psi(b, k);
    }
    return false;
  });
  Eigen::MatrixXd sorted(n, psi.cols());
  for (Eigen::Index i = 0; i < n; ++i) sorted.row(i) = psi.row(order[static_cast<std::size_t>(i)]);

  if (center) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(psi.cols());
    for (Eigen::Index i = 0; i < n; ++i) mean += sorted.row(i);
    mean /= static_cast<double>(n);
    sorted.rowwise() -= mean;
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(psi.cols(), psi.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(sorted.transpose(), 1.0 / static_cast<double>(n));
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return CovOperator(std::move(cov));
}

double hs_norm(const CovOperator& a) { return a.matrix().norm(); }

double hs_inner(const CovOperator& a, const CovOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("hs_inner: dimension mismatch");
  return (a.matrix().array() * b.matrix().array()).sum();
}

SpectralDecomp spectral_decompose(const CovOperator& op) {
  Eigen::MatrixXd a = op.matrix();
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double norm = a.norm();

  if (norm > 0.0) {
    const double target = 1e-12 * norm;
    // Entries this small contribute < (1e-13 |A|)^2 in total and are skipped.
    const double skip = 1e-13 * norm / static_cast<double>(std::max<Eigen::Index>(n, 1));
    bool converged = false;
    for (int sweep = 0; sweep < 100; ++sweep) {
      double off = 0.0;
      for (Eigen::Index q = 1; q < n; ++q) off += a.col(q).head(q).squaredNorm();
      if (std::sqrt(2.0 * off) < target) {
        converged = true;
        break;
      }
      for (Eigen::Index p = 0; p + 1 < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (std::abs(apq) < skip) continue;
          const double app = a(p, p);
          const double aqq = a(q, q);
          const double theta = (aqq - app) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;

          double* colp = a.col(p).data();
          double* colq = a.col(q).data();
          for (Eigen::Index k = 0; k < n; ++k) {
            const double x = colp[k];
            const double y = colq[k];
            colp[k] = c * x - s * y;
            colq[k] = s * x + c * y;
          }
          colp[p] = app - t * apq;
          colq[q] = aqq + t * apq;
          colp[q] = 0.0;
          colq[p] = 0.0;
          for (Eigen::Index k = 0; k < n; ++k) {
            a(p, k) = colp[k];
            a(q, k) = colq[k];
          }

          double* vp = v.col(p).data();
          double* vq = v.col(q).data();
          for (Eigen::Index k = 0; k < n; ++k) {
            const double x = vp[k];
            const double y = vq[k];
            vp[k] = c * x - s * y;
            vq[k] = s * x + c * y;
          }
        }
      }
    }
    if (!converged) throw NumericalError("spectral_decompose: Jacobi iteration did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  SpectralDecomp out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.eigenvalues(j) = a(src, src);
    Eigen::VectorXd col = v.col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index k = 1; k < n; ++k) {
      if (std::abs(col(k)) > std::abs(col(arg))) arg = k;
    }
    if (col(arg) < 0.0) col = -col;
    out.eigenvectors.col(j) = col;
  }
  return out;
}

Projector top_q_projector(const SpectralDecomp& s, std::size_t q) {
  const auto dim = static_cast<std::size_t>(s.eigenvectors.cols());
  if (q < 1 || q > dim) throw std::invalid_argument("top_q_projector: q out of range");
  return Projector(s.eigenvectors.leftCols(static_cast<Eigen::Index>(q)));
}

double reconstruction_risk(const CovOperator& sigma, const Projector& p) {
  if (sigma.dim() != p.dim()) throw std::invalid_argument("reconstruction_risk: dimension mismatch");
  const Eigen::MatrixXd& b = p.basis();
  const double trace = sigma.trace();
  const double captured = (b.transpose() * sigma.matrix() * b).trace();
  const double risk = trace - captured;
  if (risk < 0.0) {
    if (risk < -1e-9 * std::abs(trace)) {
      throw NumericalError("reconstruction_risk: negative risk beyond tolerance");
    }
    return 0.0;
  }
  return risk;
}

double excess_risk(const CovOperator& sigma_pop, const SpectralDecomp& pop_spectrum, const Projector& p_hat,
                   std::size_t q) {
  if (p_hat.rank() != q) throw std::invalid_argument("excess_risk: projector rank differs from q");
  if (sigma_pop.dim() != p_hat.dim()) throw std::invalid_argument("excess_risk: dimension mismatch");
  const Projector p_opt = top_q_projector(pop_spectrum, q);
  const double diff = reconstruction_risk(sigma_pop, p_hat) - reconstruction_risk(sigma_pop, p_opt);
  if (diff < 0.0) {
    if (diff < -1e-9 * std::abs(sigma_pop.trace())) {
      throw NumericalError("excess_risk: estimated projector beats the optimum beyond tolerance");
    }
    return 0.0;
  }
  return diff;
}

double excess_risk(const CovOperator& sigma_pop, const Projector& p_hat, std::size_t q) {
  return excess_risk(sigma_pop, spectral_decompose(sigma_pop), p_hat, q);
}

Eigen::MatrixXd pca_scores(std::span<const EmbeddedVector> vs, const Projector& p, bool center) {
  Eigen::MatrixXd psi = whitened_rows(vs);
  if (static_cast<std::size_t>(psi.cols()) != p.dim()) {
    throw std::invalid_argument("pca_scores: projector dimension mismatch");
  }
  if (center) {
    const Eigen::RowVectorXd mean = psi.colwise().mean();
    psi.rowwise() -= mean;
  }
  return psi * p.basis();
}

double risk_bound_first_term(std::span<const double> eigenvalues, std::size_t q, std::size_t n) {
  if (n == 0) throw std::invalid_argument("risk_bound_first_term: n must be >= 1");
  if (q > eigenvalues.size()) throw std::invalid_argument("risk_bound_first_term: q exceeds eigenvalue count");
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    if (eigenvalues[j] < -1e-12) throw std::invalid_argument("risk_bound_first_term: negative eigenvalue");
    if (j > 0 && eigenvalues[j] > eigenvalues[j - 1]) {
      throw std::invalid_argument("risk_bound_first_term: eigenvalues must be nonincreasing");
    }
  }
  std::vector<double> tail(eigenvalues.size() + 1, 0.0);
  for (std::size_t j = eigenvalues.size(); j-- > 0;) tail[j] = tail[j + 1] + std::max(eigenvalues[j], 0.0);
  const auto nn = static_cast<double>(n);
  double total = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    const double lam = std::max(eigenvalues[j], 0.0);
    total += std::max(std::sqrt(lam * tail[j] / nn), tail[j] / nn);
  }
  return total;
}

}  // namespace measure_pca
