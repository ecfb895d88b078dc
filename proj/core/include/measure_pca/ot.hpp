#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "measure_pca/measures.hpp"

namespace measure_pca {

/// Strictly increasing probability levels in (0, 1).
class QuantileGrid {
 public:
  explicit QuantileGrid(std::vector<double> levels);

  std::size_t size() const noexcept { return levels_.size(); }
  const std::vector<double>& levels() const noexcept { return levels_; }
  double operator[](std::size_t i) const { return levels_[i]; }

 private:
  std::vector<double> levels_;
};

/// T midpoint levels (2l - 1) / (2T), l = 1..T.
///
/// Levels below 1/2 are computed as 1 - (upper level), which is exact, so the
/// grid is symmetric about 1/2 bit for bit.
QuantileGrid make_quantile_grid(std::size_t T);

/// Left-continuous empirical quantiles: for each level t, the order statistic
/// x_(ceil(t m)) of the sample (1-based). Levels within 1e-9 above an index
/// boundary snap to that boundary so that t m products affected by rounding
/// (0.15 * 20 = 3.0000000000000004) pick the intended index.
std::vector<double> empirical_quantiles(std::span<const double> samples, const QuantileGrid& grid);

/// Same as empirical_quantiles but for an already sorted sample.
std::vector<double> sorted_quantiles(std::span<const double> sorted, const QuantileGrid& grid);

/// Squared 2-Wasserstein distance between two uniform one-dimensional
/// measures of equal size (monotone coupling of sorted samples).
double w2_squared_1d(const DiscreteMeasure& a, const DiscreteMeasure& b);

struct TransportEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

/// Sparse coupling between a source measure (rows) and a target (cols).
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<TransportEntry> entries;

  Eigen::VectorXd row_sums() const;
  Eigen::VectorXd col_sums() const;
};

/// Exact optimal transport for the squared Euclidean cost, by the network
/// simplex method on the complete bipartite graph.
///
/// Uniform inputs are solved with integer flows (masses scaled by
/// lcm(m0, m)), so marginals are exact; other weights use floating flows.
/// The returned plan is a basic solution with at most m0 + m - 1 entries,
/// sorted by (source, target). The dual certificate is checked before
/// returning; a failed check throws NumericalError.
TransportPlan solve_discrete_ot(const DiscreteMeasure& source, const DiscreteMeasure& target);

/// Sum of mass * |x_i - y_j|^2 over plan entries.
double transport_cost(const TransportPlan& plan, const DiscreteMeasure& source,
                      const DiscreteMeasure& target);

/// Conditional mean of the plan given each source atom: an m0 x d matrix
/// whose row k is (1 / a_k) * sum_j pi_kj y_j.
Eigen::MatrixXd barycentric_map(const TransportPlan& plan, const DiscreteMeasure& source,
                                const DiscreteMeasure& target);

}  // namespace measure_pca
