#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "measure_pca/embeddings.hpp"
#include "measure_pca/measures.hpp"

namespace measure_pca {

enum class Regime { Dense, Sparse };

std::string to_string(Regime regime);

/// Settings of one convergence sweep. In the dense regime `values` lists the
/// number of measures n and `fixed` is the sample size m; in the sparse
/// regime the roles are swapped.
struct SweepConfig {
  Regime regime = Regime::Dense;
  RandomMeasureModel model;
  std::vector<EmbeddingKind> kinds{EmbeddingKind::KME, EmbeddingKind::LOT, EmbeddingKind::SW};
  std::vector<std::size_t> values{25, 50, 100, 200, 400};
  std::size_t fixed = 500;
  std::size_t m0 = 200;
  std::size_t T = 10;
  std::size_t p = 10;
  std::size_t q = 1;
  std::size_t trials = 10;
  std::uint64_t seed = 20240601;
  bool center = true;

  /// Smaller grids that finish in minutes.
  static SweepConfig desk(Regime regime);
  /// Full-size grids: dense m = 1000, n from 10 to 1000, m0 = 500, T = p = 20;
  /// sparse n = 500, m from 10 to 500, m0 = 100, T = p = 10; 20 trials.
  static SweepConfig full(Regime regime);

  std::size_t n_for(std::size_t value) const { return regime == Regime::Dense ? value : fixed; }
  std::size_t m_for(std::size_t value) const { return regime == Regime::Dense ? fixed : value; }

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

struct SweepRecord {
  EmbeddingKind kind;
  std::size_t value;
  std::size_t trial;
  double hs_error;
  double excess_risk;
};

struct SweepSummaryRow {
  EmbeddingKind kind;
  std::size_t value;
  double hs_error_mean;
  double hs_error_std;
  double excess_risk_mean;
  double excess_risk_std;
  std::size_t trials;
};

struct SweepResult {
  SweepConfig config;
  /// Ordered by (kind, value, trial) in config order.
  std::vector<SweepRecord> raw;

  /// Means and sample standard deviations (0 for a single trial),
  /// recomputed from `raw` in trial order.
  std::vector<SweepSummaryRow> summary() const;
};

/// Runs every (trial, value) cell. Each trial draws one discretization
/// (reference sample, directions, grid) shared by all measures and by the
/// population operator. Cells run in parallel; results do not depend on
/// the thread count.
SweepResult run_sweep(const SweepConfig& cfg);

/// Least-squares slope of log(ys) against log(xs).
double estimate_rate_slope(std::span<const double> xs, std::span<const double> ys);

/// (y - min) / (max - min).
std::vector<double> minmax_scale(std::span<const double> ys);

/// 1 - (sum of singular values of Y1^T Y2)^2 after column-centering and
/// scaling each matrix to unit Frobenius norm. Reflections are allowed.
double procrustes_disparity(const Eigen::MatrixXd& y1, const Eigen::MatrixXd& y2);

struct StabilityConfig {
  std::vector<std::size_t> m_values{10, 50, 200, 1000};
  std::size_t repeats = 20;
  std::size_t q = 2;
  std::uint64_t seed = 20240601;
  bool center = true;
};

struct StabilityRow {
  std::size_t m;
  double mean_disparity;
  double std_disparity;
  std::size_t repeats;
  /// All repeats * (repeats - 1) / 2 values, ordered (0,1), (0,2), ..., (1,2), ...
  std::vector<double> pairwise;
  /// One n x q score matrix per repeat.
  std::vector<Eigen::MatrixXd> scores;
};

struct StabilityResult {
  StabilityConfig config;
  std::vector<StabilityRow> rows;
};

/// Subsampling stability of the PCA representation: for each m, draws
/// `repeats` independent m-point subsamples of every measure, embeds them,
/// computes the rank-q PCA scores and all pairwise Procrustes disparities.
StabilityResult run_stability(std::span<const DiscreteMeasure> measures, const StabilityConfig& cfg,
                              const EmbeddingConfig& embedding);

/// Synthetic four-cluster collection in R^2: `per_group` measures around
/// each of the centers (3, 0), (-3, 0), (0, 1.5), (0, -1.5). Each measure is
/// an N(c + jitter, s^2 I) sample of `points` points with jitter ~ N(0, 0.3^2 I)
/// and s ~ N(1, 0.05^2).
std::vector<DiscreteMeasure> make_cluster_measures(std::size_t per_group, std::size_t points, std::uint64_t seed);

/// Settings of the sampling-error decay check: E |Phi(mu) - Phi(mu_m)|^2
/// averaged over `laws` random laws and `trials` samples per law.
struct RmDecayConfig {
  RandomMeasureModel model;
  std::vector<EmbeddingKind> kinds{EmbeddingKind::KME, EmbeddingKind::LOT, EmbeddingKind::SW};
  std::vector<std::size_t> m_values{50, 100, 200, 400, 800, 1600};
  std::size_t laws = 10;
  std::size_t trials = 10;
  std::size_t m0 = 500;
  std::size_t T = 20;
  std::size_t p = 20;
  /// LOT only: use a reference of size m0 = m for each m instead of a fixed
  /// m0, so the reference does not bound the attainable accuracy.
  bool lot_matched_reference = true;
  std::uint64_t seed = 20240601;

  void validate() const;
};

struct RmDecayRow {
  EmbeddingKind kind;
  std::size_t m;
  double mc_estimate;
  std::size_t draws;
};

struct RmDecayResult {
  RmDecayConfig config;
  /// Ordered by (kind, m) in config order.
  std::vector<RmDecayRow> rows;

  /// Log-log slope of mc_estimate against m for one embedding.
  double slope(EmbeddingKind kind) const;
};

RmDecayResult run_rm_decay(const RmDecayConfig& cfg);

/// Stream roles mixed into derive_stream_id.
namespace stream_role {
inline constexpr std::uint64_t reference = 1;
inline constexpr std::uint64_t directions = 2;
inline constexpr std::uint64_t law = 3;
inline constexpr std::uint64_t sample = 4;
inline constexpr std::uint64_t subsample = 5;
inline constexpr std::uint64_t cluster = 6;
inline constexpr std::uint64_t oracle = 7;
}  // namespace stream_role

/// One trial's discretization for each embedding kind, as used by run_sweep.
EmbeddingConfig make_trial_embedding(EmbeddingKind kind, std::size_t d, std::size_t m0, std::size_t T,
                                     std::size_t p, std::uint64_t seed, std::size_t trial);

}  // namespace measure_pca
