#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>

#include <Eigen/Dense>

#include "measure_pca/rng.hpp"

namespace measure_pca {

/// Weighted point cloud in R^d: m points stored as rows of an m x d matrix.
///
/// Invariants (checked on construction): m >= 1, d >= 1, all coordinates
/// finite, weights nonnegative and summing to 1 within 1e-12.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

  /// Uniform weights 1/m over the rows of `points`.
  static DiscreteMeasure uniform(Eigen::MatrixXd points);

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  const Eigen::MatrixXd& points() const noexcept { return points_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }

  /// True when every weight equals 1/m exactly.
  bool is_uniform() const noexcept { return uniform_; }

  /// The measure shifted by `offset` (same ordering, same weights).
  DiscreteMeasure translated(const Eigen::VectorXd& offset) const;

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  bool uniform_ = false;
};

/// Isotropic Gaussian N(mean, sigma^2 I_d).
class GaussianLaw {
 public:
  GaussianLaw(Eigen::VectorXd mean, double sigma);

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  double sigma() const noexcept { return sigma_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }

 private:
  Eigen::VectorXd mean_;
  double sigma_;
};

/// Random Gaussian measure model: b ~ N(0, tau_b^2 I_d), sigma ~ N(1, tau_sigma^2)
/// truncated from below at sigma_floor.
struct RandomMeasureModel {
  std::size_t d = 2;
  double tau_b = 1.0;
  double tau_sigma = 0.2;
  double sigma_floor = 1e-3;

  void validate() const;
};

/// Draws one law from the model. Scale draws below sigma_floor are redrawn;
/// throws NumericalError after 10^6 rejected attempts.
GaussianLaw draw_random_gaussian(const RandomMeasureModel& model, RngStream& rng);

/// m i.i.d. points from `law`, uniform weights.
DiscreteMeasure sample_gaussian(const GaussianLaw& law, std::size_t m, RngStream& rng);

/// m points chosen uniformly without replacement from a uniform-weight measure.
DiscreteMeasure subsample(const DiscreteMeasure& mu, std::size_t m, RngStream& rng);

/// Reads a CSV point cloud (one point per row, optional header row).
/// Throws DataError if the file cannot be opened, ParseError on bad content.
DiscreteMeasure ingest_point_cloud(const std::filesystem::path& path);

/// Stream variant of ingest_point_cloud; `source_name` prefixes error messages.
DiscreteMeasure parse_point_cloud(std::istream& in, const std::string& source_name);

/// Sum with Neumaier compensation.
double compensated_sum(const Eigen::Ref<const Eigen::VectorXd>& values) noexcept;

}  // namespace measure_pca
