#include "measure_pca/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace measure_pca {

std::string to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::KME: return "KME";
    case EmbeddingKind::LOT: return "LOT";
    case EmbeddingKind::SW: return "SW";
  }
  return "?";
}

std::optional<EmbeddingKind> parse_embedding_kind(const std::string& name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "KME") return EmbeddingKind::KME;
  if (upper == "LOT") return EmbeddingKind::LOT;
  if (upper == "SW") return EmbeddingKind::SW;
  return std::nullopt;
}

namespace {

// FNV-1a over the raw bytes of everything that defines the discretization.
class TagHasher {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001B3ULL;
    }
  }
  void value(double v) { bytes(&v, sizeof v); }
  void value(std::uint64_t v) { bytes(&v, sizeof v); }
  void matrix(const Eigen::MatrixXd& m) {
    value(static_cast<std::uint64_t>(m.rows()));
    value(static_cast<std::uint64_t>(m.cols()));
    bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

void require_uniform_reference(const DiscreteMeasure& reference, const char* who) {
  if (!reference.is_uniform()) {
    throw std::invalid_argument(std::string(who) + ": reference measure must have uniform weights");
  }
}

}  // namespace

EmbeddingConfig EmbeddingConfig::kme(DiscreteMeasure reference, Kernel kernel) {
  require_uniform_reference(reference, "EmbeddingConfig::kme");
  if (kernel.type == Kernel::Type::RBF && !(kernel.bandwidth > 0.0)) {
    throw std::invalid_argument("EmbeddingConfig::kme: RBF bandwidth must be positive");
  }
  EmbeddingConfig cfg;
  cfg.kind_ = EmbeddingKind::KME;
  cfg.kernel_ = kernel;
  const std::size_t m0 = reference.size();
  const std::size_t d = reference.dim();
  cfg.reference_.emplace(std::move(reference));
  cfg.finalize(d);
  auto w = std::make_shared<Eigen::VectorXd>(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m0),
                                                                       1.0 / static_cast<double>(m0)));
  cfg.weights_ = std::move(w);
  return cfg;
}

EmbeddingConfig EmbeddingConfig::lot(DiscreteMeasure reference) {
  require_uniform_reference(reference, "EmbeddingConfig::lot");
  EmbeddingConfig cfg;
  cfg.kind_ = EmbeddingKind::LOT;
  const std::size_t m0 = reference.size();
  const std::size_t d = reference.dim();
  cfg.reference_.emplace(std::move(reference));
  cfg.finalize(d);
  cfg.weights_ = std::make_shared<Eigen::VectorXd>(
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m0 * d), 1.0 / static_cast<double>(m0)));
  return cfg;
}

EmbeddingConfig EmbeddingConfig::sw(Eigen::MatrixXd directions, QuantileGrid grid) {
  if (directions.rows() < 1 || directions.cols() < 1) {
    throw std::invalid_argument("EmbeddingConfig::sw: at least one direction required");
  }
  for (Eigen::Index r = 0; r < directions.rows(); ++r) {
    if (std::abs(directions.row(r).norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("EmbeddingConfig::sw: directions must have unit norm");
    }
  }
  EmbeddingConfig cfg;
  cfg.kind_ = EmbeddingKind::SW;
  const auto p = static_cast<std::size_t>(directions.rows());
  const auto d = static_cast<std::size_t>(directions.cols());
  const std::size_t T = grid.size();
  cfg.directions_ = std::move(directions);
  cfg.grid_.emplace(std::move(grid));
  cfg.finalize(d);
  cfg.weights_ = std::make_shared<Eigen::VectorXd>(
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(T * p), 1.0 / static_cast<double>(T * p)));
  return cfg;
}

void EmbeddingConfig::finalize(std::size_t dim) {
  ambient_dim_ = dim;
  TagHasher h;
  h.value(static_cast<std::uint64_t>(kind_));
  if (kind_ == EmbeddingKind::KME) {
    h.value(static_cast<std::uint64_t>(kernel_.type));
    h.value(kernel_.bandwidth);
  }
  if (reference_) h.matrix(reference_->points());
  if (kind_ == EmbeddingKind::SW) {
    h.matrix(directions_);
    for (double t : grid_->levels()) h.value(t);
  }
  space_tag_ = h.digest();
}

const DiscreteMeasure& EmbeddingConfig::reference() const {
  if (!reference_) throw std::logic_error("EmbeddingConfig: SW configuration has no reference measure");
  return *reference_;
}

const QuantileGrid& EmbeddingConfig::grid() const {
  if (!grid_) throw std::logic_error("EmbeddingConfig: only SW configurations carry a quantile grid");
  return *grid_;
}

EmbeddedVector::EmbeddedVector(Eigen::VectorXd coords, std::shared_ptr<const Eigen::VectorXd> quad_weights,
                               std::uint64_t space_tag)
    : coords_(std::move(coords)), weights_(std::move(quad_weights)), space_tag_(space_tag) {
  if (!weights_ || weights_->size() != coords_.size()) {
    throw std::invalid_argument("EmbeddedVector: coordinate and weight counts differ");
  }
}

Eigen::MatrixXd make_sphere_directions(std::size_t p, std::size_t d, RngStream& rng) {
  if (p == 0 || d == 0) throw std::invalid_argument("make_sphere_directions: p and d must be >= 1");
  Eigen::MatrixXd dirs(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < dirs.rows(); ++r) {
    double norm = 0.0;
    do {
      for (Eigen::Index k = 0; k < dirs.cols(); ++k) dirs(r, k) = rng.normal();
      norm = dirs.row(r).norm();
    } while (!(norm > 1e-150));
    dirs.row(r) /= norm;
    if (d == 1) dirs(r, 0) = dirs(r, 0) > 0.0 ? 1.0 : -1.0;
  }
  return dirs;
}

DiscreteMeasure make_gaussian_reference(std::size_t m0, std::size_t d, double scale, RngStream& rng) {
  if (m0 == 0 || d == 0) throw std::invalid_argument("make_gaussian_reference: m0 and d must be >= 1");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(m0), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index k = 0; k < pts.cols(); ++k) pts(i, k) = scale * rng.normal();
  }
  return DiscreteMeasure::uniform(std::move(pts));
}

DiscreteMeasure make_uniform_reference(std::size_t m0, std::size_t d, double scale, RngStream& rng) {
  if (m0 == 0 || d == 0) throw std::invalid_argument("make_uniform_reference: m0 and d must be >= 1");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(m0), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index k = 0; k < pts.cols(); ++k) pts(i, k) = scale * (2.0 * rng.uniform() - 1.0);
  }
  return DiscreteMeasure::uniform(std::move(pts));
}

namespace {

void require_kind(const EmbeddingConfig& cfg, EmbeddingKind kind, const char* who) {
  if (cfg.kind() != kind) throw std::invalid_argument(std::string(who) + ": configuration kind mismatch");
}

void require_dim(const DiscreteMeasure& mu, const EmbeddingConfig& cfg, const char* who) {
  if (mu.dim() != cfg.ambient_dim()) {
    throw std::invalid_argument(std::string(who) + ": measure dimension " + std::to_string(mu.dim()) +
                                " does not match the embedding space (" +
                                std::to_string(cfg.ambient_dim()) + ")");
  }
}

}  // namespace

EmbeddedVector embed_kme(const DiscreteMeasure& mu, const EmbeddingConfig& cfg) {
  require_kind(cfg, EmbeddingKind::KME, "embed_kme");
  require_dim(mu, cfg, "embed_kme");
  const Kernel& kernel = cfg.kernel();
  if (kernel.type == Kernel::Type::RBF && !(kernel.bandwidth > 0.0)) {
    throw std::invalid_argument("embed_kme: bandwidth must be positive");
  }
  const Eigen::MatrixXd& ref = cfg.reference().points();
  const Eigen::MatrixXd& x = mu.points();
  const Eigen::VectorXd& w = mu.weights();
  Eigen::VectorXd coords(ref.rows());

  if (kernel.type == Kernel::Type::Linear) {
    // sum_j w_j <X_j, x_r> = <sum_j w_j X_j, x_r>
    const Eigen::VectorXd mean = x.transpose() * w;
    coords = ref * mean;
  } else {
    const double scale = -0.5 / (kernel.bandwidth * kernel.bandwidth);
    const Eigen::MatrixXd xt = x.transpose();  // d x m, contiguous points
    for (Eigen::Index r = 0; r < ref.rows(); ++r) {
      const Eigen::VectorXd xr = ref.row(r).transpose();
      double acc = 0.0;
      for (Eigen::Index j = 0; j < xt.cols(); ++j) {
        acc += w(j) * std::exp(scale * (xt.col(j) - xr).squaredNorm());
      }
      coords(r) = acc;
    }
  }
  return EmbeddedVector(std::move(coords), cfg.quad_weights(), cfg.space_tag());
}

EmbeddedVector embed_lot(const DiscreteMeasure& mu, const EmbeddingConfig& cfg) {
  require_kind(cfg, EmbeddingKind::LOT, "embed_lot");
  require_dim(mu, cfg, "embed_lot");
  const DiscreteMeasure& ref = cfg.reference();
  const TransportPlan plan = solve_discrete_ot(ref, mu);
  const Eigen::MatrixXd mapped = barycentric_map(plan, ref, mu);
  const Eigen::MatrixXd disp = mapped - ref.points();
  const auto d = static_cast<Eigen::Index>(ref.dim());
  Eigen::VectorXd coords(disp.rows() * d);
  for (Eigen::Index r = 0; r < disp.rows(); ++r) {
    for (Eigen::Index k = 0; k < d; ++k) coords(r * d + k) = disp(r, k);
  }
  return EmbeddedVector(std::move(coords), cfg.quad_weights(), cfg.space_tag());
}

EmbeddedVector embed_sw(const DiscreteMeasure& mu, const EmbeddingConfig& cfg) {
  require_kind(cfg, EmbeddingKind::SW, "embed_sw");
  require_dim(mu, cfg, "embed_sw");
  const QuantileGrid& grid = cfg.grid();
  const Eigen::MatrixXd& dirs = cfg.directions();
  const auto T = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd coords(dirs.rows() * T);
  std::vector<double> proj(mu.size());

  if (mu.is_uniform()) {
    for (Eigen::Index r = 0; r < dirs.rows(); ++r) {
      const Eigen::VectorXd p = mu.points() * dirs.row(r).transpose();
      proj.assign(p.data(), p.data() + p.size());
      std::sort(proj.begin(), proj.end());
      const std::vector<double> q = sorted_quantiles(proj, grid);
      for (Eigen::Index l = 0; l < T; ++l) coords(r * T + l) = q[static_cast<std::size_t>(l)];
    }
  } else {
    // Weighted quantile: smallest x with F(x) >= t.
    std::vector<std::size_t> order(mu.size());
    for (Eigen::Index r = 0; r < dirs.rows(); ++r) {
      const Eigen::VectorXd p = mu.points() * dirs.row(r).transpose();
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p(static_cast<Eigen::Index>(a)) < p(static_cast<Eigen::Index>(b));
      });
      std::size_t pos = 0;
      double cdf = mu.weight(order[0]);
      for (Eigen::Index l = 0; l < T; ++l) {
        const double t = grid[static_cast<std::size_t>(l)];
        while (cdf < t - 1e-12 && pos + 1 < order.size()) cdf += mu.weight(order[++pos]);
        coords(r * T + l) = p(static_cast<Eigen::Index>(order[pos]));
      }
    }
  }
  return EmbeddedVector(std::move(coords), cfg.quad_weights(), cfg.space_tag());
}

EmbeddedVector embed(const DiscreteMeasure& mu, const EmbeddingConfig& cfg) {
  switch (cfg.kind()) {
    case EmbeddingKind::KME: return embed_kme(mu, cfg);
    case EmbeddingKind::LOT: return embed_lot(mu, cfg);
    case EmbeddingKind::SW: return embed_sw(mu, cfg);
  }
  throw std::logic_error("embed: unknown embedding kind");
}

double embedding_distance(const EmbeddedVector& u, const EmbeddedVector& v) {
  if (u.space_tag() != v.space_tag() || u.size() != v.size()) {
    throw std::invalid_argument("embedding_distance: vectors belong to different embedding spaces");
  }
  const Eigen::VectorXd diff = u.coords() - v.coords();
  return std::sqrt((diff.array().square() * u.quad_weights().array()).sum());
}

}  // namespace measure_pca
