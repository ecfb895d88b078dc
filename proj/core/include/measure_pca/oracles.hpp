#pragma once

#include <cstddef>

#include "measure_pca/embeddings.hpp"
#include "measure_pca/hilbert.hpp"
#include "measure_pca/measures.hpp"
#include "measure_pca/rng.hpp"

namespace measure_pca {

/// Second moments of the random Gaussian model: Var(b_i) per coordinate and Var(sigma).
struct GaussianModelParams {
  std::size_t d = 2;
  double tau_b2 = 1.0;
  double tau_sigma2 = 0.04;

  static GaussianModelParams from_model(const RandomMeasureModel& model);
  void validate() const;
};

/// Standard normal quantile. Rational approximation plus one Newton step on
/// the erfc residual, evaluated on the lower half only so that
/// normal_quantile(1 - t) == -normal_quantile(t) bit for bit.
double normal_quantile(double t);

/// Closed-form embedding of N(b, sigma^2 I) evaluated at the nodes of `cfg`:
///   KME (linear kernel): x_r^T b
///   LOT:                 (sigma - 1) x_r + b      (reference N(0, I) assumed)
///   SW:                  theta_r^T b + sigma z(t_l)
/// Throws std::invalid_argument for the RBF kernel.
EmbeddedVector analytic_embed(const GaussianLaw& law, const EmbeddingConfig& cfg);

/// Centered population covariance of the embedding under the random model,
/// in whitened coordinates: sum_j lambda_j f_j f_j^T with
///   KME: tau_b^2 on f_i(x) = x_i
///   LOT: tau_b^2 on f_i = e_i, tau_sigma^2 on h(x) = x (one common scale)
///   SW:  tau_b^2 / d on f_i = sqrt(d) theta_i, tau_sigma^2 on g = z(t)
/// The feature functions are evaluated at the nodes without
/// re-orthonormalization.
CovOperator analytic_covariance(const GaussianModelParams& params, const EmbeddingConfig& cfg);

/// Monte Carlo estimate of E |Phi(mu) - Phi(mu_m)|^2 with mu_m an m-point
/// sample of `law`; trial k draws from rng.substream(k).
double sampling_error_mc(const GaussianLaw& law, const EmbeddingConfig& cfg, std::size_t m, std::size_t trials,
                         const RngStream& rng);

}  // namespace measure_pca
