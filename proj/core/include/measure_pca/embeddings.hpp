#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "measure_pca/measures.hpp"
#include "measure_pca/ot.hpp"
#include "measure_pca/rng.hpp"

namespace measure_pca {

enum class EmbeddingKind { KME, LOT, SW };

std::string to_string(EmbeddingKind kind);
/// Accepts "KME", "LOT", "SW" (case-insensitive).
std::optional<EmbeddingKind> parse_embedding_kind(const std::string& name);

/// Kernel for the mean embedding: Gaussian RBF exp(-|x - y|^2 / (2 h^2))
/// or the linear kernel x^T y.
struct Kernel {
  enum class Type { RBF, Linear };

  Type type = Type::RBF;
  double bandwidth = 1.0;

  static Kernel rbf(double bandwidth) { return Kernel{Type::RBF, bandwidth}; }
  static Kernel linear() { return Kernel{Type::Linear, 1.0}; }
};

/// Finite discretization of one embedding space.
///
/// - KME: evaluation nodes = reference points; D = m0, weights 1/m0.
/// - LOT: reference measure (uniform); D = m0 * d laid out point-major, weights 1/m0.
/// - SW:  p unit directions x T quantile levels; D = T * p laid out
///        direction-major, weights 1/(T p).
///
/// All vectors embedded with one config share its space tag and its
/// quadrature weight vector.
class EmbeddingConfig {
 public:
  static EmbeddingConfig kme(DiscreteMeasure reference, Kernel kernel);
  static EmbeddingConfig lot(DiscreteMeasure reference);
  static EmbeddingConfig sw(Eigen::MatrixXd directions, QuantileGrid grid);

  EmbeddingKind kind() const noexcept { return kind_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  const DiscreteMeasure& reference() const;
  const Eigen::MatrixXd& directions() const noexcept { return directions_; }
  const QuantileGrid& grid() const;

  /// Ambient dimension d of the embedded measures.
  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  /// Number of coordinates D.
  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_->size()); }
  std::uint64_t space_tag() const noexcept { return space_tag_; }
  const std::shared_ptr<const Eigen::VectorXd>& quad_weights() const noexcept { return weights_; }

 private:
  EmbeddingConfig() = default;
  void finalize(std::size_t dim);

  EmbeddingKind kind_ = EmbeddingKind::KME;
  Kernel kernel_;
  std::optional<DiscreteMeasure> reference_;
  Eigen::MatrixXd directions_;
  std::optional<QuantileGrid> grid_;
  std::size_t ambient_dim_ = 0;
  std::uint64_t space_tag_ = 0;
  std::shared_ptr<const Eigen::VectorXd> weights_;
};

/// Coordinates of an embedded measure plus the quadrature weights that define
/// the inner product <u, v> = sum_r u_r v_r w_r.
class EmbeddedVector {
 public:
  EmbeddedVector(Eigen::VectorXd coords, std::shared_ptr<const Eigen::VectorXd> quad_weights,
                 std::uint64_t space_tag);

  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  const Eigen::VectorXd& quad_weights() const noexcept { return *weights_; }
  const std::shared_ptr<const Eigen::VectorXd>& shared_weights() const noexcept { return weights_; }
  std::uint64_t space_tag() const noexcept { return space_tag_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.size()); }

 private:
  Eigen::VectorXd coords_;
  std::shared_ptr<const Eigen::VectorXd> weights_;
  std::uint64_t space_tag_;
};

/// p directions drawn uniformly on the unit sphere S^{d-1} (normalized
/// Gaussian vectors), one per row.
Eigen::MatrixXd make_sphere_directions(std::size_t p, std::size_t d, RngStream& rng);

/// Reference sample of m0 points from N(0, scale^2 I_d), uniform weights.
DiscreteMeasure make_gaussian_reference(std::size_t m0, std::size_t d, double scale, RngStream& rng);

/// Reference sample of m0 points from the uniform law on [-scale, scale]^d.
DiscreteMeasure make_uniform_reference(std::size_t m0, std::size_t d, double scale, RngStream& rng);

EmbeddedVector embed_kme(const DiscreteMeasure& mu, const EmbeddingConfig& cfg);
EmbeddedVector embed_lot(const DiscreteMeasure& mu, const EmbeddingConfig& cfg);
EmbeddedVector embed_sw(const DiscreteMeasure& mu, const EmbeddingConfig& cfg);

/// Dispatches on cfg.kind().
EmbeddedVector embed(const DiscreteMeasure& mu, const EmbeddingConfig& cfg);

/// Weighted L2 distance sqrt(sum_r (u_r - v_r)^2 w_r). Vectors must share a space tag.
double embedding_distance(const EmbeddedVector& u, const EmbeddedVector& v);

}  // namespace measure_pca
