#include <gtest/gtest.h>

#include <cmath>

#include "measure_pca/ot.hpp"
#include "measure_pca/rng.hpp"
#include "reference.hpp"

using namespace measure_pca;

namespace {

DiscreteMeasure points_1d(std::initializer_list<double> xs) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return DiscreteMeasure::uniform(pts);
}

Eigen::MatrixXd random_integer_points(std::size_t m, std::size_t d, RngStream& rng) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = static_cast<double>(rng.uniform_index(11)) - 5.0;
  return pts;
}

void expect_marginals(const TransportPlan& plan, const DiscreteMeasure& a, const DiscreteMeasure& b) {
  EXPECT_LE((plan.row_sums() - a.weights()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((plan.col_sums() - b.weights()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(plan.entries.size(), a.size() + b.size() - 1);
  for (const auto& e : plan.entries) EXPECT_GE(e.mass, 0.0);
}

}  // namespace

TEST(QuantileGrid, MidpointLevels) {
  EXPECT_EQ(make_quantile_grid(1).levels(), std::vector<double>{0.5});
  EXPECT_EQ(make_quantile_grid(2).levels(), (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(make_quantile_grid(4).levels(), (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
}

TEST(QuantileGrid, SymmetricBitForBit) {
  for (std::size_t T : {3u, 7u, 10u, 20u, 99u}) {
    const auto g = make_quantile_grid(T);
    for (std::size_t l = 0; l < T; ++l) ASSERT_EQ(g[l], 1.0 - g[T - 1 - l]);
  }
}

TEST(QuantileGrid, RejectsBadLevels) {
  EXPECT_THROW(QuantileGrid({0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(QuantileGrid({0.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(QuantileGrid({0.5, 1.0}), std::invalid_argument);
  EXPECT_THROW(make_quantile_grid(0), std::invalid_argument);
}

TEST(EmpiricalQuantiles, HandEvaluatedOrderStatistics) {
  const std::vector<double> xs{3, 1, 2};
  EXPECT_EQ(empirical_quantiles(xs, QuantileGrid({0.2, 0.5, 0.9})), (std::vector<double>{1, 2, 3}));
}

TEST(EmpiricalQuantiles, DiracAndSingleSample) {
  const std::vector<double> c(5, 2.5);
  for (double v : empirical_quantiles(c, make_quantile_grid(7))) EXPECT_EQ(v, 2.5);
  const std::vector<double> one{-4.0};
  for (double v : empirical_quantiles(one, make_quantile_grid(3))) EXPECT_EQ(v, -4.0);
  EXPECT_THROW(empirical_quantiles(std::vector<double>{}, make_quantile_grid(3)), std::invalid_argument);
}

TEST(EmpiricalQuantiles, IndexAtExactBoundaries) {
  // ceil(t m) for t = 0.15, m = 20 is 3 even though 0.15 * 20 rounds above 3.
  std::vector<double> xs(20);
  for (int i = 0; i < 20; ++i) xs[static_cast<std::size_t>(i)] = i;
  EXPECT_EQ(empirical_quantiles(xs, QuantileGrid({0.15}))[0], 2.0);
  EXPECT_EQ(empirical_quantiles(xs, QuantileGrid({0.05, 0.5, 0.95})), (std::vector<double>{0, 9, 18}));
}

TEST(W2OneD, HandExamples) {
  EXPECT_DOUBLE_EQ(w2_squared_1d(points_1d({0, 2}), points_1d({1, 3})), 1.0);
  EXPECT_DOUBLE_EQ(w2_squared_1d(points_1d({0, 0}), points_1d({1, 1})), 1.0);
  EXPECT_EQ(w2_squared_1d(points_1d({4, -1, 2}), points_1d({4, -1, 2})), 0.0);
  EXPECT_THROW(w2_squared_1d(points_1d({0, 1}), points_1d({0})), std::invalid_argument);
}

TEST(SolveOt, VerticalMatching) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 0, 1, 0;
  Eigen::MatrixXd b(2, 2);
  b << 0, 1, 1, 1;
  const auto src = DiscreteMeasure::uniform(a);
  const auto dst = DiscreteMeasure::uniform(b);
  const auto plan = solve_discrete_ot(src, dst);
  EXPECT_NEAR(transport_cost(plan, src, dst), 1.0, 1e-12);
  expect_marginals(plan, src, dst);
}

TEST(SolveOt, IdenticalMeasuresCostZero) {
  RngStream rng(1, 1);
  const auto mu = DiscreteMeasure::uniform(random_integer_points(6, 2, rng));
  const auto plan = solve_discrete_ot(mu, mu);
  EXPECT_EQ(transport_cost(plan, mu, mu), 0.0);
}

TEST(SolveOt, MatchesExhaustivePermutations) {
  RngStream rng(2, 2);
  for (int inst = 0; inst < 150; ++inst) {
    const std::size_t m = 1 + rng.uniform_index(6);
    const std::size_t d = 1 + rng.uniform_index(3);
    const Eigen::MatrixXd x = random_integer_points(m, d, rng);
    const Eigen::MatrixXd y = random_integer_points(m, d, rng);
    const auto src = DiscreteMeasure::uniform(x);
    const auto dst = DiscreteMeasure::uniform(y);
    const auto plan = solve_discrete_ot(src, dst);
    const double expected = reference::brute_force_ot_cost(x, y);
    ASSERT_NEAR(transport_cost(plan, src, dst), expected, 1e-9 * std::max(1.0, expected)) << "instance " << inst;
    expect_marginals(plan, src, dst);
  }
}

TEST(SolveOt, UnequalSizesMatchReplicatedPermutation) {
  // Uniform m0 = 2 vs m = 4: duplicate each source point twice to get an
  // equal-size problem with the same optimal cost.
  RngStream rng(3, 3);
  for (int inst = 0; inst < 40; ++inst) {
    const Eigen::MatrixXd x = random_integer_points(2, 2, rng);
    const Eigen::MatrixXd y = random_integer_points(4, 2, rng);
    Eigen::MatrixXd xx(4, 2);
    xx << x.row(0), x.row(0), x.row(1), x.row(1);
    const auto src = DiscreteMeasure::uniform(x);
    const auto dst = DiscreteMeasure::uniform(y);
    const auto plan = solve_discrete_ot(src, dst);
    ASSERT_NEAR(transport_cost(plan, src, dst), reference::brute_force_ot_cost(xx, y), 1e-9);
    expect_marginals(plan, src, dst);
  }
}

TEST(SolveOt, WeightedMatchesReplicatedPermutation) {
  // Weights (1/2, 1/4, 1/4) against uniform 4 points equal the uniform
  // problem with the first source atom duplicated.
  RngStream rng(4, 4);
  for (int inst = 0; inst < 40; ++inst) {
    const Eigen::MatrixXd x = random_integer_points(3, 2, rng);
    const Eigen::MatrixXd y = random_integer_points(4, 2, rng);
    Eigen::MatrixXd xx(4, 2);
    xx << x.row(0), x.row(0), x.row(1), x.row(2);
    const DiscreteMeasure src(x, Eigen::Vector3d(0.5, 0.25, 0.25));
    const auto dst = DiscreteMeasure::uniform(y);
    const auto plan = solve_discrete_ot(src, dst);
    ASSERT_NEAR(transport_cost(plan, src, dst), reference::brute_force_ot_cost(xx, y), 1e-9);
    expect_marginals(plan, src, dst);
  }
}

TEST(SolveOt, OneDimensionalAgreesWithSortedCoupling) {
  RngStream rng(5, 5);
  for (int inst = 0; inst < 30; ++inst) {
    Eigen::MatrixXd x(40, 1);
    Eigen::MatrixXd y(40, 1);
    for (Eigen::Index i = 0; i < 40; ++i) {
      x(i, 0) = rng.normal();
      y(i, 0) = 2.0 * rng.normal() + 1.0;
    }
    const auto a = DiscreteMeasure::uniform(x);
    const auto b = DiscreteMeasure::uniform(y);
    const double w = w2_squared_1d(a, b);
    EXPECT_NEAR(transport_cost(solve_discrete_ot(a, b), a, b), w, 1e-9 * std::max(1.0, w));
  }
}

TEST(SolveOt, SymmetricCost) {
  RngStream rng(6, 6);
  for (int inst = 0; inst < 20; ++inst) {
    const auto a = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(30, 2, [&] { return rng.normal(); }));
    const auto b = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(45, 2, [&] { return rng.normal(); }));
    const double ab = transport_cost(solve_discrete_ot(a, b), a, b);
    const double ba = transport_cost(solve_discrete_ot(b, a), b, a);
    EXPECT_NEAR(ab, ba, 1e-9 * std::max(1.0, ab));
  }
}

TEST(SolveOt, TranslationCostsSquaredShift) {
  RngStream rng(7, 7);
  const auto a = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(50, 3, [&] { return rng.normal(); }));
  const Eigen::Vector3d v(0.3, -0.2, 0.1);
  const auto b = a.translated(v);
  EXPECT_NEAR(transport_cost(solve_discrete_ot(a, b), a, b), v.squaredNorm(), 1e-9);
}

TEST(SolveOt, LargerInstanceSatisfiesMarginals) {
  RngStream rng(8, 8);
  const auto a = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(120, 2, [&] { return rng.normal(); }));
  const auto b = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(300, 2, [&] { return rng.normal(); }));
  expect_marginals(solve_discrete_ot(a, b), a, b);
}

TEST(SolveOt, DimensionMismatchThrows) {
  const auto a = DiscreteMeasure::uniform(Eigen::MatrixXd::Zero(2, 2));
  const auto b = DiscreteMeasure::uniform(Eigen::MatrixXd::Zero(2, 3));
  EXPECT_THROW(solve_discrete_ot(a, b), std::invalid_argument);
}

TEST(SolveOt, DeterministicForFixedInput) {
  RngStream rng(9, 9);
  const auto a = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(60, 2, [&] { return rng.normal(); }));
  const auto b = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(80, 2, [&] { return rng.normal(); }));
  const auto p1 = solve_discrete_ot(a, b);
  const auto p2 = solve_discrete_ot(a, b);
  ASSERT_EQ(p1.entries.size(), p2.entries.size());
  for (std::size_t i = 0; i < p1.entries.size(); ++i) {
    EXPECT_EQ(p1.entries[i].source, p2.entries[i].source);
    EXPECT_EQ(p1.entries[i].target, p2.entries[i].target);
    EXPECT_EQ(p1.entries[i].mass, p2.entries[i].mass);
  }
}

TEST(TransportCost, SingleAtoms) {
  const auto a = points_1d({0.0});
  const auto b = points_1d({3.0});
  EXPECT_DOUBLE_EQ(transport_cost(solve_discrete_ot(a, b), a, b), 9.0);
}

TEST(BarycentricMap, PermutationPlanReturnsMatchedPoints) {
  RngStream rng(10, 10);
  const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(5, 2, [&] { return rng.normal(); });
  const Eigen::MatrixXd y = Eigen::MatrixXd::NullaryExpr(5, 2, [&] { return rng.normal(); });
  const auto src = DiscreteMeasure::uniform(x);
  const auto dst = DiscreteMeasure::uniform(y);
  const auto plan = solve_discrete_ot(src, dst);
  const Eigen::MatrixXd map = barycentric_map(plan, src, dst);
  for (const auto& e : plan.entries) {
    EXPECT_LT((map.row(static_cast<Eigen::Index>(e.source)) - y.row(static_cast<Eigen::Index>(e.target))).norm(),
              1e-14);
  }
}

TEST(BarycentricMap, SplitMassAveragesToMidpoint) {
  const auto src = points_1d({0.0});
  const auto dst = points_1d({-1.0, 1.0});
  const Eigen::MatrixXd map = barycentric_map(solve_discrete_ot(src, dst), src, dst);
  EXPECT_NEAR(map(0, 0), 0.0, 1e-15);
}

TEST(BarycentricMap, RowsInTargetBoundingBox) {
  RngStream rng(11, 11);
  const auto src = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(20, 2, [&] { return rng.normal(); }));
  const auto dst = DiscreteMeasure::uniform(Eigen::MatrixXd::NullaryExpr(70, 2, [&] { return rng.normal(); }));
  const Eigen::MatrixXd map = barycentric_map(solve_discrete_ot(src, dst), src, dst);
  const Eigen::RowVectorXd lo = dst.points().colwise().minCoeff();
  const Eigen::RowVectorXd hi = dst.points().colwise().maxCoeff();
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    EXPECT_TRUE(((map.row(i) - lo).array() >= -1e-12).all());
    EXPECT_TRUE(((hi - map.row(i)).array() >= -1e-12).all());
  }
}

TEST(BarycentricMap, ZeroWeightSourceAtomThrows) {
  Eigen::MatrixXd x(2, 1);
  x << 0, 1;
  const DiscreteMeasure src(x, Eigen::Vector2d(1.0, 0.0));
  const auto dst = points_1d({0.5});
  EXPECT_THROW(barycentric_map(solve_discrete_ot(src, dst), src, dst), std::invalid_argument);
}
