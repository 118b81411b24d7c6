#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "blab/geometry.hpp"
#include "blab/measures.hpp"
#include "oracles.hpp"

using namespace blab;

TEST(RadialMoment, MatchesBetaFunction)
{
  for (int n = 1; n <= 3; ++n)
    for (double beta : {-0.5, 0.0, 1.0, 3.25})
      EXPECT_NEAR(radial_moment(n, beta), n * boost::math::beta(double(n), beta + 1), 1e-13);
  EXPECT_TRUE(std::isinf(radial_moment(2, -1.0)));
}

TEST(BallMeasure, Construction)
{
  EXPECT_TRUE(BallMeasure::zero(2).is_zero());
  EXPECT_TRUE(BallMeasure::atomic(2, {}).is_zero());
  EXPECT_THROW(BallMeasure::atomic(2, {{make_point({0.1}), 1.0}}), DomainError);
  EXPECT_THROW(BallMeasure::atomic(2, {{make_point({0.1, 0.0}), -1.0}}), DomainError);
  EXPECT_THROW(BallMeasure::atomic(2, {{make_point({1.0, 0.0}), 1.0}}), DomainError);
  EXPECT_THROW(BallMeasure::radial_density(2, 1.0, 0.0), DomainError);
  EXPECT_TRUE(BallMeasure::radial_density(2, 1.0).is_radial());
  EXPECT_TRUE(BallMeasure::atomic(2, {{zero_point(2), 1.0}}).is_radial());
  EXPECT_FALSE(BallMeasure::atomic(2, {{make_point({0.1, 0.0}), 1.0}}).is_radial());
}

TEST(BallMeasure, TotalMass)
{
  EXPECT_EQ(total_mass(BallMeasure::zero(2)), 0.0);
  EXPECT_NEAR(total_mass(BallMeasure::atomic(2, {{make_point({0.1, 0.0}), 0.3}, {make_point({0.0, 0.5}), 0.2}})), 0.5, 1e-15);
  EXPECT_NEAR(total_mass(BallMeasure::radial_density(2, 1.0, 3.0)), 3 * 2 * boost::math::beta(2.0, 2.0), 1e-14);
}

TEST(BoundaryMeasure, AtomsProjectedOntoSphere)
{
  const auto nu = BoundaryMeasure::atomic(2, {{make_point({1.0 + 5e-7, 0.0}), 1.0}});
  EXPECT_NEAR(nu.as_atomic()->atoms[0].point.norm(), 1.0, 1e-15);
  EXPECT_THROW(BoundaryMeasure::atomic(2, {{make_point({0.9, 0.0}), 1.0}}), DomainError);
  EXPECT_THROW(BoundaryMeasure::uniform(2, 0.0), DomainError);
  EXPECT_NEAR(total_mass(BoundaryMeasure::uniform(2, 2.5)), 2.5, 0.0);
}

TEST(BallMass, AtomicIsExact)
{
  const CPoint a = make_point({0.5, 0.0});
  const CPoint b = make_point({0.0, 0.5});
  const auto mu = BallMeasure::atomic(2, {{a, 0.3}, {b, 0.7}});
  const double r = bergman_metric(a, b);
  EXPECT_NEAR(ball_mass(mu, a, r * 1.01).value, 1.0, 1e-15);
  EXPECT_NEAR(ball_mass(mu, a, r * 0.99).value, 0.3, 1e-15);
  EXPECT_EQ(ball_mass(mu, a, r * 0.99).std_error, 0.0);
}

TEST(BallMass, RadialAtOriginMatchesOneDimensionalIntegral)
{
  const double r = 0.7, R = std::tanh(r);
  for (double beta : {-0.5, 0.0, 2.0}) {
    const auto eta = BallMeasure::radial_density(2, beta);
    const double ref = oracle::integrate([&](double x) { return 2 * x * std::pow(1 - x, beta); }, 0.0, R * R);
    EXPECT_NEAR(ball_mass(eta, zero_point(2), r).value, ref, 1e-10);
  }
}

TEST(BallMass, InvariantMeasureIsTranslationInvariant)
{
  // (1-|z|^2)^{-(n+1)} dv is Moebius invariant, so every Bergman ball of radius r has the same mass.
  const double r = 0.5, R = std::tanh(r);
  const auto lambda = BallMeasure::radial_density(2, -3.0);
  const double ref = oracle::integrate([&](double x) { return 2 * x * std::pow(1 - x, -3.0); }, 0.0, R * R);
  for (double level : {0.0, 0.5, 0.9, 0.99}) {
    const CPoint a = make_point({cplx(level * 0.6, level * 0.8), 0.0});
    EXPECT_NEAR(ball_mass(lambda, a, r).value / ref, 1.0, 1e-10) << "level " << level;
  }
}

TEST(BallMass, MonteCarloAgreesWithProduct)
{
  const auto eta = BallMeasure::radial_density(2, 1.5);
  const CPoint a = make_point({0.7, cplx(0.0, 0.2)});
  const double exact = ball_mass(eta, a, 0.6).value;
  BallMassOptions mc;
  mc.method = MassMethod::MonteCarlo;
  mc.samples = 40000;
  mc.seed = 3;
  const auto est = ball_mass(eta, a, 0.6, mc);
  EXPECT_GT(est.std_error, 0.0);
  EXPECT_NEAR(est.value, exact, 4 * est.std_error);
}

TEST(Sampling, RadialDensityMoments)
{
  const auto eta = BallMeasure::radial_density(2, 1.0);
  const auto pts = sample(eta, 20000, 11);
  double mean = 0, mean_sq = 0;
  for (const auto& z : pts) {
    mean += z.squaredNorm();
    mean_sq += std::pow(z.squaredNorm(), 2);
  }
  mean /= pts.size();
  mean_sq /= pts.size();
  // |z|^2 ~ Beta(2, 2).
  const double se = std::sqrt((mean_sq - mean * mean) / pts.size());
  EXPECT_NEAR(mean, 0.5, 4 * se);
  EXPECT_THROW(sample(BallMeasure::radial_density(2, -1.0), 10, 1), DomainError);
}

TEST(Sampling, DeterministicInSeed)
{
  const auto mu = BallMeasure::atomic(2, {{make_point({0.1, 0.0}), 1.0}, {make_point({0.0, 0.3}), 3.0}});
  const auto a = sample(mu, 1000, 5);
  const auto b = sample(mu, 1000, 5);
  int second = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ((a[k] - b[k]).norm(), 0.0);
    second += a[k](1) != 0.0 ? 1 : 0;
  }
  EXPECT_NEAR(second / 1000.0, 0.75, 0.06);
  const auto xs = sample(BoundaryMeasure::uniform(3), 100, 2);
  for (const auto& xi : xs)
    EXPECT_NEAR(xi.norm(), 1.0, 1e-14);
  EXPECT_THROW(sample(BallMeasure::zero(2), 1, 1), DomainError);
}
