#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "measure_pca/error.hpp"
#include "measure_pca/hilbert.hpp"
#include "reference.hpp"

using namespace measure_pca;

namespace {

struct Space {
  std::shared_ptr<const Eigen::VectorXd> weights;
  std::uint64_t tag;

  EmbeddedVector vec(const Eigen::VectorXd& coords) const { return EmbeddedVector(coords, weights, tag); }
};

Space make_space(Eigen::Index dim, RngStream& rng, bool unit = false) {
  Eigen::VectorXd w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) w(i) = unit ? 1.0 : 0.1 + rng.uniform();
  return Space{std::make_shared<const Eigen::VectorXd>(w), rng.next_u64()};
}

Eigen::VectorXd gaussian_vector(Eigen::Index dim, RngStream& rng) {
  return Eigen::VectorXd::NullaryExpr(dim, [&] { return rng.normal(); });
}

Eigen::MatrixXd random_symmetric(Eigen::Index n, RngStream& rng) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return rng.normal(); });
  return 0.5 * (a + a.transpose());
}

Projector random_projector(Eigen::Index dim, Eigen::Index q, RngStream& rng) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(dim, q, [&] { return rng.normal(); });
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return Projector(qr.householderQ() * Eigen::MatrixXd::Identity(dim, q));
}

}  // namespace

TEST(Whiten, UnitWeightsAreIdentityAndNormMatches) {
  RngStream rng(1, 1);
  const Space unit = make_space(6, rng, true);
  const Eigen::VectorXd c = gaussian_vector(6, rng);
  EXPECT_EQ(whiten(unit.vec(c)), c);
  const Space s = make_space(6, rng);
  const auto v = s.vec(c);
  EXPECT_NEAR(whiten(v).squaredNorm(), (c.array().square() * s.weights->array()).sum(), 1e-14);
}

TEST(EmpiricalCovariance, SingleVectorCases) {
  RngStream rng(2, 2);
  const Space s = make_space(4, rng);
  const std::vector<EmbeddedVector> one{s.vec(gaussian_vector(4, rng))};
  EXPECT_EQ(empirical_covariance(one, true).matrix(), Eigen::MatrixXd::Zero(4, 4));
  const Eigen::VectorXd psi = whiten(one[0]);
  EXPECT_LT((empirical_covariance(one, false).matrix() - psi * psi.transpose()).norm(), 1e-15);
}

TEST(EmpiricalCovariance, SymmetricPairCentered) {
  RngStream rng(3, 3);
  const Space s = make_space(5, rng);
  const Eigen::VectorXd v = gaussian_vector(5, rng);
  const std::vector<EmbeddedVector> pair{s.vec(v), s.vec(-v)};
  const Eigen::VectorXd psi = whiten(pair[0]);
  EXPECT_LT((empirical_covariance(pair, true).matrix() - psi * psi.transpose()).norm(), 1e-14);
}

TEST(EmpiricalCovariance, PermutationInvariantBitForBit) {
  RngStream rng(4, 4);
  const Space s = make_space(12, rng);
  std::vector<EmbeddedVector> vs;
  for (int i = 0; i < 30; ++i) vs.push_back(s.vec(gaussian_vector(12, rng)));
  const CovOperator a = empirical_covariance(vs, true);
  std::mt19937 gen(7);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(vs.begin(), vs.end(), gen);
    ASSERT_TRUE((empirical_covariance(vs, true).matrix().array() == a.matrix().array()).all());
  }
}

TEST(EmpiricalCovariance, MixedSpacesThrow) {
  RngStream rng(5, 5);
  const Space a = make_space(3, rng);
  const Space b = make_space(3, rng);
  const std::vector<EmbeddedVector> vs{a.vec(gaussian_vector(3, rng)), b.vec(gaussian_vector(3, rng))};
  EXPECT_THROW(empirical_covariance(vs, true), std::invalid_argument);
}

TEST(HsNorm, RankOneIdentity) {
  RngStream rng(6, 6);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd psi = gaussian_vector(8, rng);
    const CovOperator a(psi * psi.transpose());
    EXPECT_NEAR(hs_norm(a), psi.squaredNorm(), 1e-12 * psi.squaredNorm());
    EXPECT_NEAR(hs_inner(a, a), hs_norm(a) * hs_norm(a), 1e-10 * hs_inner(a, a));
  }
  EXPECT_EQ(hs_norm(CovOperator::zero(3)), 0.0);
  EXPECT_THROW(hs_inner(CovOperator::zero(3), CovOperator::zero(4)), std::invalid_argument);
}

TEST(CovOperator, RejectsAsymmetricMatrix) {
  Eigen::Matrix2d a;
  a << 1, 2, 0, 1;
  EXPECT_THROW(CovOperator{Eigen::MatrixXd(a)}, std::invalid_argument);
}

TEST(SpectralDecompose, DiagonalInput) {
  Eigen::Matrix2d a;
  a << 3, 0, 0, 1;
  const auto s = spectral_decompose(CovOperator(a));
  EXPECT_EQ(s.eigenvalues, Eigen::Vector2d(3, 1));
  EXPECT_EQ(s.eigenvectors, Eigen::MatrixXd(Eigen::Matrix2d::Identity()));
}

TEST(SpectralDecompose, RankOne) {
  RngStream rng(7, 7);
  const Eigen::VectorXd psi = gaussian_vector(6, rng);
  const auto s = spectral_decompose(CovOperator(psi * psi.transpose()));
  EXPECT_NEAR(s.eigenvalues(0), psi.squaredNorm(), 1e-12 * psi.squaredNorm());
  EXPECT_LT(s.eigenvalues.tail(5).cwiseAbs().maxCoeff(), 1e-12 * psi.squaredNorm());
}

TEST(SpectralDecompose, MatchesLongDoubleReference) {
  RngStream rng(8, 8);
  for (int inst = 0; inst < 20; ++inst) {
    const Eigen::MatrixXd a = random_symmetric(5, rng);
    const auto s = spectral_decompose(CovOperator(a));
    const Eigen::VectorXd expected = reference::jacobi_eigenvalues_ld(a);
    EXPECT_LT((s.eigenvalues - expected).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(SpectralDecompose, InvariantsOnLargerMatrices) {
  RngStream rng(9, 9);
  for (Eigen::Index n : {1, 2, 17, 60}) {
    const Eigen::MatrixXd a = random_symmetric(n, rng);
    const auto s = spectral_decompose(CovOperator(a));
    const Eigen::MatrixXd& v = s.eigenvectors;
    EXPECT_LE((a - v * s.eigenvalues.asDiagonal() * v.transpose()).norm(), 1e-8 * a.norm());
    EXPECT_LE((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(s.eigenvalues.sum(), a.trace(), 1e-9 * std::max(1.0, a.cwiseAbs().sum()));
    for (Eigen::Index j = 1; j < n; ++j) EXPECT_GE(s.eigenvalues(j - 1), s.eigenvalues(j));
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Index arg = 0;
      v.col(j).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(v(arg, j), 0.0);
    }
  }
}

TEST(SpectralDecompose, LowRankCovarianceOfDimensionHundreds) {
  RngStream rng(10, 10);
  const Eigen::MatrixXd f = Eigen::MatrixXd::NullaryExpr(300, 3, [&] { return rng.normal(); });
  const Eigen::MatrixXd a = f * Eigen::Vector3d(2.0, 1.0, 0.5).asDiagonal() * f.transpose();
  const auto s = spectral_decompose(CovOperator(a));
  const Eigen::MatrixXd g = f.transpose() * f;
  const Eigen::Vector3d lam(2.0, 1.0, 0.5);
  const Eigen::MatrixXd small = lam.cwiseSqrt().asDiagonal() * g * lam.cwiseSqrt().asDiagonal();
  const Eigen::VectorXd expected = reference::jacobi_eigenvalues_ld(small);
  EXPECT_LT((s.eigenvalues.head(3) - expected).cwiseAbs().maxCoeff(), 1e-8 * expected(0));
  EXPECT_LT(s.eigenvalues.tail(297).cwiseAbs().maxCoeff(), 1e-9 * expected(0));
}

TEST(TopQProjector, BasisAndRangeChecks) {
  Eigen::Matrix2d a;
  a << 3, 0, 0, 1;
  const auto s = spectral_decompose(CovOperator(a));
  const Projector p1 = top_q_projector(s, 1);
  EXPECT_EQ(p1.basis(), Eigen::MatrixXd(Eigen::Vector2d(1, 0)));
  const Projector full = top_q_projector(s, 2);
  EXPECT_LT((full.basis().transpose() * full.basis() - Eigen::Matrix2d::Identity()).norm(), 1e-15);
  EXPECT_THROW(top_q_projector(s, 0), std::invalid_argument);
  EXPECT_THROW(top_q_projector(s, 3), std::invalid_argument);
}

TEST(Projector, Idempotent) {
  RngStream rng(11, 11);
  const Projector p = random_projector(10, 3, rng);
  const Eigen::VectorXd v = gaussian_vector(10, rng);
  EXPECT_LT((p.apply(p.apply(v)) - p.apply(v)).norm(), 1e-10 * v.norm());
}

TEST(ReconstructionRisk, HandExamples) {
  Eigen::Matrix2d a;
  a << 3, 0, 0, 1;
  const CovOperator sigma(a);
  const auto s = spectral_decompose(sigma);
  EXPECT_EQ(reconstruction_risk(sigma, top_q_projector(s, 2)), 0.0);
  EXPECT_DOUBLE_EQ(reconstruction_risk(sigma, top_q_projector(s, 1)), 1.0);
  EXPECT_THROW(reconstruction_risk(CovOperator::zero(3), top_q_projector(s, 1)), std::invalid_argument);
}

TEST(ReconstructionRisk, EqualsMeanResidualOfWhitenedVectors) {
  RngStream rng(12, 12);
  for (int inst = 0; inst < 50; ++inst) {
    const Space s = make_space(9, rng);
    std::vector<EmbeddedVector> vs;
    for (int i = 0; i < 15; ++i) vs.push_back(s.vec(gaussian_vector(9, rng)));
    const Projector p = random_projector(9, 1 + static_cast<Eigen::Index>(rng.uniform_index(8)), rng);
    double direct = 0.0;
    for (const auto& v : vs) {
      const Eigen::VectorXd psi = whiten(v);
      direct += (psi - p.apply(psi)).squaredNorm();
    }
    direct /= static_cast<double>(vs.size());
    EXPECT_NEAR(reconstruction_risk(empirical_covariance(vs, false), p), direct, 1e-9 * direct);
  }
}

TEST(ExcessRisk, HandExamples) {
  Eigen::Matrix2d a;
  a << 3, 0, 0, 1;
  const CovOperator sigma(a);
  const auto s = spectral_decompose(sigma);
  EXPECT_EQ(excess_risk(sigma, top_q_projector(s, 1), 1), 0.0);
  EXPECT_DOUBLE_EQ(excess_risk(sigma, Projector(Eigen::MatrixXd(Eigen::Vector2d(0, 1))), 1), 2.0);
  EXPECT_THROW(excess_risk(sigma, top_q_projector(s, 2), 1), std::invalid_argument);
}

TEST(ExcessRisk, IsotropicOperatorHasNoExcess) {
  RngStream rng(13, 13);
  const CovOperator sigma(2.5 * Eigen::MatrixXd::Identity(8, 8));
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(excess_risk(sigma, random_projector(8, 3, rng), 3), 0.0, 1e-12);
}

TEST(ExcessRisk, NonnegativeForRandomProjectors) {
  RngStream rng(14, 14);
  const Eigen::MatrixXd f = Eigen::MatrixXd::NullaryExpr(12, 12, [&] { return rng.normal(); });
  const CovOperator sigma(f * f.transpose());
  const auto s = spectral_decompose(sigma);
  for (int i = 0; i < 20; ++i) EXPECT_GE(excess_risk(sigma, s, random_projector(12, 2, rng), 2), 0.0);
}

TEST(PcaScores, CenteredSingleVectorIsZero) {
  RngStream rng(15, 15);
  const Space s = make_space(4, rng);
  const std::vector<EmbeddedVector> one{s.vec(gaussian_vector(4, rng))};
  const Projector p = random_projector(4, 2, rng);
  EXPECT_EQ(pca_scores(one, p, true), Eigen::MatrixXd::Zero(1, 2));
}

TEST(PcaScores, IsometryOnTheSubspace) {
  RngStream rng(16, 16);
  const Space s = make_space(6, rng, true);
  const Projector p = random_projector(6, 2, rng);
  std::vector<EmbeddedVector> vs;
  for (int i = 0; i < 8; ++i) vs.push_back(s.vec(p.basis() * gaussian_vector(2, rng)));
  const Eigen::MatrixXd y = pca_scores(vs, p, false);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(y.row(i).norm(), whiten(vs[static_cast<std::size_t>(i)]).norm(), 1e-12);
}

TEST(PcaScores, CollinearDataHasFlatSecondComponent) {
  RngStream rng(17, 17);
  const Space s = make_space(5, rng);
  const Eigen::VectorXd dir = gaussian_vector(5, rng);
  const Eigen::VectorXd offset = gaussian_vector(5, rng);
  std::vector<EmbeddedVector> vs;
  for (int i = 0; i < 10; ++i) vs.push_back(s.vec(offset + rng.normal() * dir));
  const auto cov = empirical_covariance(vs, true);
  const Eigen::MatrixXd y = pca_scores(vs, top_q_projector(spectral_decompose(cov), 2), true);
  EXPECT_LT(y.col(1).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(RiskBound, HandEvaluation) {
  const std::vector<double> lam{1.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(risk_bound_first_term(lam, 1, 4), 0.5);
  const std::vector<double> zeros(5, 0.0);
  EXPECT_EQ(risk_bound_first_term(zeros, 3, 10), 0.0);
  const std::vector<double> neg{1.0, -1e-6};
  EXPECT_THROW(risk_bound_first_term(neg, 1, 10), std::invalid_argument);
  const std::vector<double> rising{1.0, 2.0};
  EXPECT_THROW(risk_bound_first_term(rising, 1, 10), std::invalid_argument);
}

TEST(RiskBound, RootNScalingForSquareSummableSpectrum) {
  std::vector<double> lam(2000);
  for (std::size_t j = 0; j < lam.size(); ++j) lam[j] = 1.0 / static_cast<double>((j + 1) * (j + 1));
  const double first = risk_bound_first_term(lam, 1, 100) * std::sqrt(100.0);
  for (std::size_t n = 200; n <= 100000; n *= 2) {
    const double scaled = risk_bound_first_term(lam, 1, n) * std::sqrt(static_cast<double>(n));
    EXPECT_NEAR(scaled / first, 1.0, 0.1) << "n = " << n;
  }
}

TEST(Hilbert, TriangleDecompositionThroughIntermediateOperator) {
  RngStream rng(18, 18);
  const Space s = make_space(10, rng);
  const Eigen::MatrixXd f = Eigen::MatrixXd::NullaryExpr(10, 3, [&] { return rng.normal(); });
  const CovOperator pop(f * f.transpose() / 10.0);
  std::vector<EmbeddedVector> clean;
  std::vector<EmbeddedVector> noisy;
  for (int i = 0; i < 40; ++i) {
    const Eigen::VectorXd c = f * gaussian_vector(3, rng);
    clean.push_back(s.vec(c));
    noisy.push_back(s.vec(c + 0.1 * gaussian_vector(10, rng)));
  }
  const CovOperator mid = empirical_covariance(clean, true);
  const CovOperator hat = empirical_covariance(noisy, true);
  EXPECT_LE(hs_norm(pop - hat), hs_norm(pop - mid) + hs_norm(mid - hat) + 1e-12);
}
