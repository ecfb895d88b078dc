#include "measure_pca/ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "measure_pca/error.hpp"
#include "network_simplex.hpp"

namespace measure_pca {

QuantileGrid::QuantileGrid(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("QuantileGrid: at least one level required");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!(levels_[i] > 0.0 && levels_[i] < 1.0)) {
      throw std::invalid_argument("QuantileGrid: levels must lie in (0, 1)");
    }
    if (i > 0 && !(levels_[i] > levels_[i - 1])) {
      throw std::invalid_argument("QuantileGrid: levels must be strictly increasing");
    }
  }
}

QuantileGrid make_quantile_grid(std::size_t T) {
  if (T == 0) throw std::invalid_argument("make_quantile_grid: T must be >= 1");
  std::vector<double> levels(T);
  const double denom = 2.0 * static_cast<double>(T);
  for (std::size_t l = 0; l < T; ++l) {
    const std::size_t mirror = T - 1 - l;
    if (2 * l + 1 >= T) {
      levels[l] = static_cast<double>(2 * l + 1) / denom;
    } else {
      levels[l] = 1.0 - static_cast<double>(2 * mirror + 1) / denom;
    }
  }
  return QuantileGrid(std::move(levels));
}

std::vector<double> sorted_quantiles(std::span<const double> sorted, const QuantileGrid& grid) {
  if (sorted.empty()) throw std::invalid_argument("empirical_quantiles: empty sample");
  const auto m = static_cast<double>(sorted.size());
  std::vector<double> out(grid.size());
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double r = grid[l] * m;
    double k = std::ceil(r);
    if (k - r > 1.0 - 1e-9) k -= 1.0;
    const auto idx = static_cast<std::size_t>(std::clamp(k, 1.0, m)) - 1;
    out[l] = sorted[idx];
  }
  return out;
}

std::vector<double> empirical_quantiles(std::span<const double> samples, const QuantileGrid& grid) {
  if (samples.empty()) throw std::invalid_argument("empirical_quantiles: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantiles(sorted, grid);
}

double w2_squared_1d(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != 1 || b.dim() != 1) throw std::invalid_argument("w2_squared_1d: measures must be 1-D");
  if (a.size() != b.size()) throw std::invalid_argument("w2_squared_1d: support sizes differ");
  if (!a.is_uniform() || !b.is_uniform()) {
    throw std::invalid_argument("w2_squared_1d: weights must be uniform");
  }
  std::vector<double> xa(a.points().data(), a.points().data() + a.size());
  std::vector<double> xb(b.points().data(), b.points().data() + b.size());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  double acc = 0.0;
  for (std::size_t j = 0; j < xa.size(); ++j) {
    const double diff = xa[j] - xb[j];
    acc += diff * diff;
  }
  return acc / static_cast<double>(xa.size());
}

Eigen::VectorXd TransportPlan::row_sums() const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
  for (const auto& e : entries) s(static_cast<Eigen::Index>(e.source)) += e.mass;
  return s;
}

Eigen::VectorXd TransportPlan::col_sums() const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  for (const auto& e : entries) s(static_cast<Eigen::Index>(e.target)) += e.mass;
  return s;
}

namespace {

std::vector<double> squared_distance_matrix(const DiscreteMeasure& source, const DiscreteMeasure& target,
                                            double& max_cost) {
  const auto m0 = static_cast<Eigen::Index>(source.size());
  const auto m = static_cast<Eigen::Index>(target.size());
  std::vector<double> cost(static_cast<std::size_t>(m0 * m));
  max_cost = 0.0;
  for (Eigen::Index i = 0; i < m0; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double c = 0.0;
      for (Eigen::Index k = 0; k < source.points().cols(); ++k) {
        const double diff = source.points()(i, k) - target.points()(j, k);
        c += diff * diff;
      }
      cost[static_cast<std::size_t>(i * m + j)] = c;
      max_cost = std::max(max_cost, c);
    }
  }
  return cost;
}

template <typename Flow>
TransportPlan solve_with(std::span<const Flow> supply, std::span<const Flow> demand,
                         std::span<const double> cost, double max_cost, double unit_mass) {
  const double tolerance = 1e-9 * std::max(max_cost, 1e-300);
  detail::BipartiteNetworkSimplex<Flow> simplex(supply, demand, cost, tolerance);
  const Flow residual = simplex.run();
  if (static_cast<double>(residual) * unit_mass > 1e-12) {
    throw NumericalError("solve_discrete_ot: unbalanced marginals");
  }

  TransportPlan plan;
  plan.rows = supply.size();
  plan.cols = demand.size();
  // Dual certificate: reduced costs are nonnegative everywhere and vanish on
  // arcs that carry flow. Slack scales with the potentials' magnitude.
  double pi_scale = 0.0;
  for (std::size_t u = 0; u < supply.size() + demand.size(); ++u) {
    pi_scale = std::max(pi_scale, std::abs(simplex.potential(static_cast<int>(u))));
  }
  const double slack = 10.0 * tolerance + 1e-12 * pi_scale;
  for (int e = 0; e < simplex.arc_count(); ++e) {
    const double rc = simplex.reduced_cost(e);
    if (rc < -slack) throw NumericalError("solve_discrete_ot: dual infeasible arc after pivoting");
    const Flow f = simplex.flow(e);
    if (f > Flow{0}) {
      if (rc > slack) throw NumericalError("solve_discrete_ot: complementary slackness violated");
      plan.entries.push_back({static_cast<std::size_t>(simplex.source_node(e)),
                              static_cast<std::size_t>(simplex.target_node(e)),
                              static_cast<double>(f) * unit_mass});
    }
  }
  return plan;
}

}  // namespace

TransportPlan solve_discrete_ot(const DiscreteMeasure& source, const DiscreteMeasure& target) {
  if (source.dim() != target.dim()) {
    throw std::invalid_argument("solve_discrete_ot: dimension mismatch (" + std::to_string(source.dim()) +
                                " vs " + std::to_string(target.dim()) + ")");
  }
  double max_cost = 0.0;
  const std::vector<double> cost = squared_distance_matrix(source, target, max_cost);
  const std::size_t m0 = source.size();
  const std::size_t m = target.size();

  if (source.is_uniform() && target.is_uniform()) {
    const std::uint64_t g = std::gcd(m0, m);
    const auto total = static_cast<std::uint64_t>(m0 / g) * m;  // lcm(m0, m)
    std::vector<std::int64_t> supply(m0, static_cast<std::int64_t>(m / g));
    std::vector<std::int64_t> demand(m, static_cast<std::int64_t>(m0 / g));
    return solve_with<std::int64_t>(supply, demand, cost, max_cost, 1.0 / static_cast<double>(total));
  }

  // General weights: floating flows. Rescale the target so both totals agree
  // exactly in floating point before pivoting.
  std::vector<double> supply(source.weights().data(), source.weights().data() + m0);
  std::vector<double> demand(target.weights().data(), target.weights().data() + m);
  const double s_total = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double d_total = std::accumulate(demand.begin(), demand.end(), 0.0);
  demand.back() += s_total - d_total;
  if (demand.back() < 0.0) demand.back() = 0.0;
  TransportPlan plan = solve_with<double>(supply, demand, cost, max_cost, 1.0);
  std::erase_if(plan.entries, [](const TransportEntry& e) { return !(e.mass > 0.0); });
  return plan;
}

double transport_cost(const TransportPlan& plan, const DiscreteMeasure& source, const DiscreteMeasure& target) {
  if (plan.rows != source.size() || plan.cols != target.size() || source.dim() != target.dim()) {
    throw std::invalid_argument("transport_cost: plan shape does not match the measures");
  }
  double acc = 0.0;
  for (const auto& e : plan.entries) {
    if (e.source >= plan.rows || e.target >= plan.cols) {
      throw std::invalid_argument("transport_cost: plan entry out of range");
    }
    const double c = (source.points().row(static_cast<Eigen::Index>(e.source)) -
                      target.points().row(static_cast<Eigen::Index>(e.target)))
                         .squaredNorm();
    acc += e.mass * c;
  }
  return acc;
}

Eigen::MatrixXd barycentric_map(const TransportPlan& plan, const DiscreteMeasure& source,
                                const DiscreteMeasure& target) {
  if (plan.rows != source.size() || plan.cols != target.size() || source.dim() != target.dim()) {
    throw std::invalid_argument("barycentric_map: plan shape does not match the measures");
  }
  for (std::size_t k = 0; k < source.size(); ++k) {
    if (!(source.weight(k) > 0.0)) {
      throw std::invalid_argument("barycentric_map: source atom " + std::to_string(k) + " has zero weight");
    }
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(source.size()),
                                              static_cast<Eigen::Index>(source.dim()));
  Eigen::VectorXd row_mass = Eigen::VectorXd::Zero(out.rows());
  for (const auto& e : plan.entries) {
    const auto k = static_cast<Eigen::Index>(e.source);
    out.row(k) += e.mass * target.points().row(static_cast<Eigen::Index>(e.target));
    row_mass(k) += e.mass;
  }
  // Divide by the plan's own row mass: equal to the source weight up to
  // rounding, and keeps every row an exact convex combination.
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    if (!(row_mass(k) > 0.0)) {
      throw std::invalid_argument("barycentric_map: plan assigns no mass to source atom " + std::to_string(k));
    }
    out.row(k) /= row_mass(k);
  }
  return out;
}

}  // namespace measure_pca
