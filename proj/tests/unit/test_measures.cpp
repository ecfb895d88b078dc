#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "measure_pca/error.hpp"
#include "measure_pca/measures.hpp"

using namespace measure_pca;

TEST(DiscreteMeasure, RejectsInvalidInput) {
  EXPECT_THROW(DiscreteMeasure(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)), std::invalid_argument);
  Eigen::MatrixXd pts(2, 1);
  pts << 0, 1;
  EXPECT_THROW(DiscreteMeasure(pts, Eigen::Vector2d(0.5, 0.6)), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure(pts, Eigen::Vector2d(1.5, -0.5)), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure(pts, Eigen::Vector3d(0.2, 0.3, 0.5)), std::invalid_argument);
  pts(1, 0) = std::nan("");
  EXPECT_THROW(DiscreteMeasure::uniform(pts), std::invalid_argument);
}

TEST(DiscreteMeasure, UniformWeightsSumToOne) {
  const auto mu = DiscreteMeasure::uniform(Eigen::MatrixXd::Random(7, 3));
  EXPECT_TRUE(mu.is_uniform());
  EXPECT_NEAR(mu.weights().sum(), 1.0, 1e-12);
  EXPECT_EQ(mu.size(), 7u);
  EXPECT_EQ(mu.dim(), 3u);
}

TEST(DrawRandomGaussian, DegenerateVariancesGiveStandardLaw) {
  RandomMeasureModel model{2, 0.0, 0.0, 1e-3};
  RngStream rng(1, 1);
  const GaussianLaw law = draw_random_gaussian(model, rng);
  EXPECT_EQ(law.mean(), Eigen::Vector2d::Zero());
  EXPECT_EQ(law.sigma(), 1.0);
}

TEST(DrawRandomGaussian, ScaleRespectsFloorAndIsDeterministic) {
  RandomMeasureModel model{2, 1.0, 3.0, 0.5};
  for (std::uint64_t s = 0; s < 200; ++s) {
    RngStream a(11, s);
    RngStream b(11, s);
    const GaussianLaw la = draw_random_gaussian(model, a);
    const GaussianLaw lb = draw_random_gaussian(model, b);
    ASSERT_GE(la.sigma(), 0.5);
    ASSERT_EQ(la.sigma(), lb.sigma());
    ASSERT_EQ(la.mean(), lb.mean());
  }
}

TEST(DrawRandomGaussian, RejectsInvalidModel) {
  RngStream rng(1, 1);
  EXPECT_THROW(draw_random_gaussian(RandomMeasureModel{0, 1.0, 0.2, 1e-3}, rng), std::invalid_argument);
  EXPECT_THROW(draw_random_gaussian(RandomMeasureModel{2, -1.0, 0.2, 1e-3}, rng), std::invalid_argument);
  EXPECT_THROW(draw_random_gaussian(RandomMeasureModel{2, 1.0, 0.2, 0.0}, rng), std::invalid_argument);
}

TEST(SampleGaussian, ConcentratesForSmallScale) {
  RngStream rng(2, 2);
  const auto mu = sample_gaussian(GaussianLaw(Eigen::Vector2d(5, 5), 1e-3), 3, rng);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_LT((mu.points().row(i) - Eigen::RowVector2d(5, 5)).norm(), 1e-2);
  EXPECT_NEAR(mu.weights().sum(), 1.0, 1e-15);
}

TEST(SampleGaussian, SampleMeanWithinCltBound) {
  const std::size_t m = 100000;
  for (std::uint64_t s = 0; s < 5; ++s) {
    RngStream rng(3, s);
    const auto mu = sample_gaussian(GaussianLaw(Eigen::Vector2d::Zero(), 1.0), m, rng);
    const Eigen::RowVectorXd mean = mu.points().colwise().mean();
    EXPECT_LT(mean.cwiseAbs().maxCoeff(), 4.0 / std::sqrt(static_cast<double>(m)));
  }
}

TEST(SampleGaussian, CoordinateVarianceMatchesScale) {
  RngStream rng(4, 4);
  const double sigma = 1.7;
  const auto mu = sample_gaussian(GaussianLaw(Eigen::Vector2d(1, -2), sigma), 100000, rng);
  const Eigen::MatrixXd c = mu.points().rowwise() - mu.points().colwise().mean();
  for (Eigen::Index k = 0; k < 2; ++k) {
    const double var = c.col(k).squaredNorm() / static_cast<double>(c.rows());
    EXPECT_NEAR(var / (sigma * sigma), 1.0, 0.05);
  }
}

TEST(SampleGaussian, ZeroSizeThrows) {
  RngStream rng(1, 1);
  EXPECT_THROW(sample_gaussian(GaussianLaw(Eigen::Vector2d::Zero(), 1.0), 0, rng), std::invalid_argument);
}

namespace {

DiscreteMeasure line_measure(std::size_t m) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(m), 1);
  for (std::size_t i = 0; i < m; ++i) pts(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i);
  return DiscreteMeasure::uniform(pts);
}

std::vector<double> sorted_values(const DiscreteMeasure& mu) {
  std::vector<double> v(mu.points().data(), mu.points().data() + mu.points().size());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Subsample, FullSizeIsPermutation) {
  const auto mu = line_measure(9);
  RngStream rng(5, 5);
  const auto sub = subsample(mu, 9, rng);
  EXPECT_EQ(sorted_values(sub), sorted_values(mu));
  EXPECT_TRUE(sub.is_uniform());
}

TEST(Subsample, SinglePointHasWeightOne) {
  const auto mu = line_measure(9);
  RngStream rng(5, 6);
  const auto sub = subsample(mu, 1, rng);
  EXPECT_EQ(sub.size(), 1u);
  EXPECT_EQ(sub.weight(0), 1.0);
  EXPECT_GE(sub.points()(0, 0), 0.0);
  EXPECT_LE(sub.points()(0, 0), 8.0);
}

TEST(Subsample, NoRepeatedPoints) {
  const auto mu = line_measure(50);
  RngStream rng(5, 7);
  const auto v = sorted_values(subsample(mu, 30, rng));
  EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
}

TEST(Subsample, CollisionRateMatchesEnumeration) {
  // Of the C(5,2) = 10 equally likely 2-subsets, two independent draws agree with probability 1/10.
  const auto mu = line_measure(5);
  const int pairs = 4000;
  int same = 0;
  for (int s = 0; s < pairs; ++s) {
    RngStream a(6, 2 * static_cast<std::uint64_t>(s));
    RngStream b(6, 2 * static_cast<std::uint64_t>(s) + 1);
    same += sorted_values(subsample(mu, 2, a)) == sorted_values(subsample(mu, 2, b));
  }
  const double rate = static_cast<double>(same) / pairs;
  EXPECT_NEAR(rate, 0.1, 4.0 * std::sqrt(0.1 * 0.9 / pairs));
}

TEST(Subsample, RejectsOversizeAndWeightedInput) {
  RngStream rng(1, 1);
  EXPECT_THROW(subsample(line_measure(3), 4, rng), std::invalid_argument);
  Eigen::MatrixXd pts(2, 1);
  pts << 0, 1;
  EXPECT_THROW(subsample(DiscreteMeasure(pts, Eigen::Vector2d(0.25, 0.75)), 1, rng), std::invalid_argument);
}

TEST(PointCloud, ParsesPlainRows) {
  std::istringstream in("0,0\n1,1\n");
  const auto mu = parse_point_cloud(in, "mem");
  ASSERT_EQ(mu.size(), 2u);
  ASSERT_EQ(mu.dim(), 2u);
  EXPECT_EQ(mu.points()(1, 1), 1.0);
  EXPECT_EQ(mu.weight(0), 0.5);
}

TEST(PointCloud, SkipsHeaderRow) {
  std::istringstream in("x0,x1\n0,0\n1,1\n");
  const auto mu = parse_point_cloud(in, "mem");
  EXPECT_EQ(mu.size(), 2u);
  EXPECT_EQ(mu.points()(0, 0), 0.0);
}

TEST(PointCloud, NonNumericFieldNamesLine) {
  std::istringstream in("1,a\n");
  try {
    parse_point_cloud(in, "bad.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("bad.csv:1"), std::string::npos);
  }
}

TEST(PointCloud, RaggedRowNamesLine) {
  std::istringstream in("x,y\n0,0\n1\n");
  try {
    parse_point_cloud(in, "ragged.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(PointCloud, EmptyInputIsAnError) {
  std::istringstream empty("");
  EXPECT_THROW(parse_point_cloud(empty, "empty.csv"), ParseError);
  std::istringstream header_only("a,b\n");
  EXPECT_THROW(parse_point_cloud(header_only, "h.csv"), ParseError);
}

TEST(PointCloud, MissingFileIsDataError) {
  EXPECT_THROW(ingest_point_cloud("/nonexistent/cloud.csv"), DataError);
}
