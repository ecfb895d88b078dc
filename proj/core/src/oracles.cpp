#include "measure_pca/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "measure_pca/parallel.hpp"

namespace measure_pca {

GaussianModelParams GaussianModelParams::from_model(const RandomMeasureModel& model) {
  model.validate();
  return GaussianModelParams{model.d, model.tau_b * model.tau_b, model.tau_sigma * model.tau_sigma};
}

void GaussianModelParams::validate() const {
  if (d < 1) throw std::invalid_argument("GaussianModelParams: d must be >= 1");
  if (!(tau_b2 >= 0.0) || !(tau_sigma2 >= 0.0) || !std::isfinite(tau_b2) || !std::isfinite(tau_sigma2)) {
    throw std::invalid_argument("GaussianModelParams: variances must be finite and nonnegative");
  }
}

namespace {

// Lower half only: 0 < t < 0.5.
double lower_quantile(double t) {
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                           1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                           6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                           -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> dd{7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                            3.754408661907416e+00};
  double x;
  if (t < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(t));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else {
    const double q = t - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // Newton step on Phi(x) - t with Phi(x) = erfc(-x / sqrt 2) / 2.
  const double residual = 0.5 * std::erfc(-x / std::numbers::sqrt2) - t;
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return x - residual / density;
}

}  // namespace

double normal_quantile(double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("normal_quantile: t must lie in (0, 1)");
  if (t == 0.5) return 0.0;
  if (t < 0.5) return lower_quantile(t);
  return -lower_quantile(1.0 - t);
}

namespace {

void require_oracle(const EmbeddingConfig& cfg) {
  if (cfg.kind() == EmbeddingKind::KME && cfg.kernel().type != Kernel::Type::Linear) {
    throw std::invalid_argument("no closed-form oracle for the RBF mean embedding");
  }
}

std::vector<double> grid_quantiles(const QuantileGrid& grid) {
  std::vector<double> z(grid.size());
  for (std::size_t l = 0; l < grid.size(); ++l) z[l] = normal_quantile(grid[l]);
  return z;
}

}  // namespace

EmbeddedVector analytic_embed(const GaussianLaw& law, const EmbeddingConfig& cfg) {
  require_oracle(cfg);
  if (law.dim() != cfg.ambient_dim()) throw std::invalid_argument("analytic_embed: dimension mismatch");
  const Eigen::VectorXd& b = law.mean();
  const double sigma = law.sigma();
  Eigen::VectorXd coords(static_cast<Eigen::Index>(cfg.size()));

  switch (cfg.kind()) {
    case EmbeddingKind::KME:
      coords = cfg.reference().points() * b;
      break;
    case EmbeddingKind::LOT: {
      const Eigen::MatrixXd& x = cfg.reference().points();
      const Eigen::Index d = x.cols();
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        coords.segment(r * d, d) = (sigma - 1.0) * x.row(r).transpose() + b;
      }
      break;
    }
    case EmbeddingKind::SW: {
      const Eigen::MatrixXd& theta = cfg.directions();
      const auto z = grid_quantiles(cfg.grid());
      const auto T = static_cast<Eigen::Index>(z.size());
      const Eigen::VectorXd proj = theta * b;
      for (Eigen::Index r = 0; r < theta.rows(); ++r) {
        for (Eigen::Index l = 0; l < T; ++l) coords(r * T + l) = proj(r) + sigma * z[static_cast<std::size_t>(l)];
      }
      break;
    }
  }
  return EmbeddedVector(std::move(coords), cfg.quad_weights(), cfg.space_tag());
}

CovOperator analytic_covariance(const GaussianModelParams& params, const EmbeddingConfig& cfg) {
  params.validate();
  require_oracle(cfg);
  if (params.d != cfg.ambient_dim()) throw std::invalid_argument("analytic_covariance: dimension mismatch");
  const auto D = static_cast<Eigen::Index>(cfg.size());
  const auto d = static_cast<Eigen::Index>(params.d);

  // Columns are feature functions at the nodes; lambda holds their weights.
  Eigen::MatrixXd f;
  Eigen::VectorXd lambda;
  switch (cfg.kind()) {
    case EmbeddingKind::KME:
      f = cfg.reference().points();
      lambda = Eigen::VectorXd::Constant(d, params.tau_b2);
      break;
    case EmbeddingKind::LOT: {
      const Eigen::MatrixXd& x = cfg.reference().points();
      f = Eigen::MatrixXd::Zero(D, d + 1);
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index i = 0; i < d; ++i) {
          f(r * d + i, i) = 1.0;
          f(r * d + i, d) = x(r, i);
        }
      }
      lambda = Eigen::VectorXd::Constant(d + 1, params.tau_b2);
      lambda(d) = params.tau_sigma2;
      break;
    }
    case EmbeddingKind::SW: {
      const Eigen::MatrixXd& theta = cfg.directions();
      const auto z = grid_quantiles(cfg.grid());
      const auto T = static_cast<Eigen::Index>(z.size());
      const double sd = std::sqrt(static_cast<double>(d));
      f = Eigen::MatrixXd::Zero(D, d + 1);
      for (Eigen::Index r = 0; r < theta.rows(); ++r) {
        for (Eigen::Index l = 0; l < T; ++l) {
          for (Eigen::Index i = 0; i < d; ++i) f(r * T + l, i) = sd * theta(r, i);
          f(r * T + l, d) = z[static_cast<std::size_t>(l)];
        }
      }
      lambda = Eigen::VectorXd::Constant(d + 1, params.tau_b2 / static_cast<double>(d));
      lambda(d) = params.tau_sigma2;
      break;
    }
  }
  const Eigen::ArrayXd sqrt_w = cfg.quad_weights()->array().sqrt();
  f = (f.array().colwise() * sqrt_w).matrix();
  const Eigen::MatrixXd scaled = f * lambda.asDiagonal();
  Eigen::MatrixXd sigma = scaled * f.transpose();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return CovOperator(std::move(sigma));
}

double sampling_error_mc(const GaussianLaw& law, const EmbeddingConfig& cfg, std::size_t m, std::size_t trials,
                         const RngStream& rng) {
  if (trials == 0) throw std::invalid_argument("sampling_error_mc: trials must be >= 1");
  if (m == 0) throw std::invalid_argument("sampling_error_mc: m must be >= 1");
  const EmbeddedVector truth = analytic_embed(law, cfg);
  std::vector<double> errors(trials);
  parallel_for(trials, [&](std::size_t k) {
    RngStream stream = rng.substream(k);
    const DiscreteMeasure sample = sample_gaussian(law, m, stream);
    const double dist = embedding_distance(truth, embed(sample, cfg));
    errors[k] = dist * dist;
  });
  double total = 0.0;
  for (double e : errors) total += e;
  return total / static_cast<double>(trials);
}

}  // namespace measure_pca
