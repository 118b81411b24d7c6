#include <cmath>

#include <gtest/gtest.h>

#include "blab/estimate_lab.hpp"
#include "blab/random.hpp"

using namespace blab;

namespace {

BallMeasure three_atoms()
{
  return BallMeasure::atomic(2, {{make_point({cplx(0.55, 0.3), cplx(-0.2, 0.5)}), 0.2},
                                 {make_point({cplx(-0.6, 0.1), cplx(0.3, -0.45)}), 0.2},
                                 {make_point({cplx(0.1, -0.4), cplx(0.6, 0.35)}), 0.2}});
}

GridSpec kernel_grid()
{
  return GridSpec{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 8, 5};
}

const BergmanModel& unweighted_model()
{
  static const BergmanModel m = BergmanModel::build(WeightSpec::unweighted(2), 12, QuadratureRule::product(2, 32, 1024));
  return m;
}

const BergmanModel& ph_model()
{
  static const BergmanModel m =
      BergmanModel::build(WeightSpec::potential_harmonic(three_atoms(), 0.0, 1.0, BoundaryMeasure::uniform(2)), 10,
                          QuadratureRule::product(2, 32, 2048));
  return m;
}

} // namespace

TEST(Verdict, ClassifyLevels)
{
  EXPECT_EQ(classify_levels({1, 1.1, 1.05, 1.1, 1.12, 1.1}, {}, false), Verdict::Bounded);
  EXPECT_EQ(classify_levels({1, 2, 4, 8, 16, 32}, {}, false), Verdict::Diverging);
  EXPECT_EQ(classify_levels({1, 1.3, 1.7, 2.2, 2.9, 3.8}, {}, false), Verdict::Inconclusive);
  EXPECT_EQ(classify_levels({1, 1}, {}, false), Verdict::Inconclusive);
  EXPECT_EQ(classify_levels({1, 1, 1, 1, 1}, {1, 1, 0.4, 0.2, 0.1}, true), Verdict::Diverging);
  EXPECT_EQ(classify_levels({1, 1, 1, 1, 1}, {1, 1, 0.7, 0.7, 0.7}, true), Verdict::Inconclusive);
  EXPECT_EQ(classify_levels({1, 1, 1, 1, 1}, {0.9, 0.9, 0.8, 0.8, 0.8}, true), Verdict::Bounded);
  EXPECT_EQ(classify_levels({1, 1, 1, 1, INFINITY}, {}, false), Verdict::Inconclusive);
  EXPECT_EQ(to_string(Verdict::Bounded), "bounded");
  EXPECT_EQ(to_string(Verdict::Diverging), "diverging");
  EXPECT_EQ(to_string(Verdict::Inconclusive), "inconclusive");
}

TEST(Verdict, SeriesGroupsByParameterAndPower)
{
  RatioSeries s;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.98})
    for (int k = 0; k < 3; ++k)
      s.points.push_back({level * (1 + 1e-15 * k), 0, std::pow(1 - level * level, -0.4) * (1 + 0.01 * k), 0});
  s.finalize();
  EXPECT_EQ(classify_series(s, false), Verdict::Inconclusive);
  EXPECT_EQ(classify_series(s, false, 4.0), Verdict::Diverging);
  EXPECT_NEAR(boundary_slope(s), -0.4, 1e-9);
  EXPECT_NEAR(boundary_slope(s, 3, 2.0), -0.8, 1e-9);
  EXPECT_NEAR(s.sup, std::pow(1 - 0.98 * 0.98, -0.4) * 1.02, 1e-12);
}

TEST(Slope, PowerLaw)
{
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 3 * std::pow(2, 1.7), 3 * std::pow(4, 1.7), 3 * std::pow(8, 1.7)}), 1.7, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), DomainError);
}

TEST(Grid, PointsAndValidation)
{
  const GridSpec g{{0.2, 0.5}, 4, 9};
  const auto pts = grid_points(g, 3);
  ASSERT_EQ(pts.size(), 8u);
  EXPECT_NEAR(std::abs(pts[0](0) - 0.2), 0.0, 1e-15);
  for (std::size_t k = 0; k < pts.size(); ++k)
    EXPECT_NEAR(pts[k].norm(), k < 4 ? 0.2 : 0.5, 1e-14);
  EXPECT_NEAR((pts[5] / 0.5 - pts[1] / 0.2).norm(), 0.0, 1e-14);
  EXPECT_THROW(validate_grid(GridSpec{{0.5, 1.0}, 4, 0}), DomainError);
  EXPECT_THROW(validate_grid(GridSpec{{}, 4, 0}), DomainError);
  EXPECT_THROW(validate_grid(GridSpec{{0.5}, 0, 0}), DomainError);
}

TEST(NormEstimate, UnweightedMatchesTruncation)
{
  const auto s = norm_estimate_sweep(unweighted_model(), kernel_grid());
  EXPECT_EQ(s.points.size(), 48u);
  for (const auto& p : s.points) {
    // K_N(z,z)(1-|z|^2)^3 for the truncated series at x = |z|^2.
    const double x = p.parameter * p.parameter;
    double kn = 0, xk = 1;
    for (int k = 0; k <= 12; ++k) {
      kn += (k + 1.0) * (k + 2.0) / 2.0 * xk;
      xk *= x;
    }
    EXPECT_NEAR(p.ratio, kn * std::pow(1 - x, 3), 1e-9);
  }
  EXPECT_EQ(s.verdict, Verdict::Bounded);
  EXPECT_NEAR(s.notes.at("band"), s.sup / s.inf, 0.0);
}

TEST(NormEstimate, PotentialHarmonicBand)
{
  const auto s = norm_estimate_sweep(ph_model(), kernel_grid());
  EXPECT_GT(s.inf, 0.0);
  EXPECT_LT(s.sup / s.inf, 10.0);
}

TEST(LocalEquivalence, RatiosInUnitInterval)
{
  const double a_r = estimate_a_r(ph_model(), 0.5, 500, 3);
  const auto s = local_kernel_equivalence_sweep(ph_model(), 0.5, kernel_grid(), a_r, 4, 16);
  EXPECT_LE(s.sup, 1 + 1e-10);
  EXPECT_GT(s.inf, 0.05);
  EXPECT_NEAR(s.notes.at("proof_lower"), 1 / (2 * a_r), 1e-15);
  EXPECT_NEAR(s.notes.at("a_r"), a_r, 0.0);
}

TEST(PointwiseDecay, CauchySchwarzAndParameter)
{
  const auto s = pointwise_decay_sweep(unweighted_model(), 0.5, 100, 4);
  EXPECT_EQ(s.points.size(), 100u);
  for (const auto& p : s.points) {
    EXPECT_LE(p.value, 1 + 1e-10);
    EXPECT_GT(p.parameter, 0.0);
    EXPECT_LE(p.parameter, 1.0);
    EXPECT_NEAR(p.ratio, p.value / std::pow(p.parameter, 0.5), 1e-12 * p.ratio);
  }
  EXPECT_NEAR(s.notes.at("proof_constant"), 1 / (0.5 * 0.25), 1e-12);
  EXPECT_THROW(pointwise_decay_sweep(unweighted_model(), 1.0, 10, 4), DomainError);
}

TEST(DifferenceBound, NoViolations)
{
  const double a_r = estimate_a_r(ph_model(), 0.5, 500, 3);
  const auto s = difference_bound_sweep(ph_model(), 0.5, 200, 8, a_r);
  EXPECT_EQ(s.points.size(), 200u);
  EXPECT_EQ(s.notes.at("violations"), 0.0);
  EXPECT_LE(s.sup, s.notes.at("bound"));
  const auto k = inclusion_constants(0.5, 2, a_r, 4);
  EXPECT_NEAR(s.notes.at("bound"), 4 * a_r * std::sqrt(2.0) / k.big_c, 1e-12);
}

TEST(Hessian, ClosedFormInverseAndFiniteDifferences)
{
  Engine rng = make_stream(12);
  for (int n = 2; n <= 3; ++n) {
    for (int k = 0; k < 20; ++k) {
      const CPoint z = sample_ball(n, rng, 0.8);
      const CPoint w = sample_ball(n, rng, 0.8);
      const auto h = hessian_inverse_check(z, w, 0.25 + 0.25 * (k % 3));
      EXPECT_LT(h.identity_residual, 1e-10);
      EXPECT_LT(h.inverse_sum_residual, 1e-12);
      EXPECT_LT(h.finite_difference_error, 1e-5);
      EXPECT_NEAR(h.g, z.squaredNorm() / (1 - z.squaredNorm()), 1e-14);
    }
  }
  EXPECT_THROW(hessian_inverse_check(make_point({0.1, 0.0}), make_point({0.0, 0.1}), 1.5), DomainError);
}

TEST(Hessian, DiagonalEntryHasSquaredDenominator)
{
  const CPoint z = make_point({0.6, 0.0});
  const auto h = hessian_inverse_check(z, make_point({0.0, 0.3}), 0.5);
  const double rho = 1 - 0.36;
  EXPECT_NEAR(h.m_matrix(0, 0).real(), 0.5 * (rho + 0.36) / (rho * rho), 1e-14);
  EXPECT_NEAR(h.m_matrix(1, 1).real(), 0.5 / rho, 1e-14);
}

TEST(ForelliRudin, SlopeMatchesPowerCounting)
{
  const auto rule = QuadratureRule::product(2, 48, 4096);
  const auto s = forelli_rudin_slope(0.0, 1.0, 2, {0.5, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99}, rule);
  EXPECT_NEAR(s.notes.at("predicted_slope"), -2.0, 0.0);
  EXPECT_NEAR(s.notes.at("slope"), -2.0, 0.1);
  EXPECT_EQ(s.verdict, Verdict::Bounded);
}

TEST(TestFunctions, BoundedNormsAndDecreasingMaxima)
{
  const auto spec = WeightSpec::reference_radial(2, 0.5);
  std::vector<double> levels;
  for (int k = 0; k < 12; ++k)
    levels.push_back(1 - 0.5 * std::pow(0.7, k));
  const auto out = test_function_sweep(spec, 3.0, 2.0, levels, make_point({1.0, 0.0}),
                                       QuadratureRule::product(2, 48, 4096), GridSpec{{0.1, 0.3, 0.5}, 4, 2});
  EXPECT_TRUE(out.hypotheses.norm_bound);
  EXPECT_TRUE(out.hypotheses.vanishing);
  EXPECT_EQ(out.norms.verdict, Verdict::Bounded);
  EXPECT_EQ(out.maxima.notes.at("tail_decreasing"), 1.0);
  EXPECT_LT(out.norms.sup, 10.0);
}

TEST(Comparability, ReferenceRadialBounded)
{
  const auto s = comparability_sweep(WeightSpec::reference_radial(2, 0.0), 0.5, {0.5, 0.7, 0.9, 0.95, 0.99},
                                     make_point({1.0, 0.0}), 500, 6);
  for (const auto& p : s.points)
    EXPECT_NEAR(p.ratio, 1.0, 1e-12);
  EXPECT_EQ(s.verdict, Verdict::Bounded);
}

TEST(Carleson, RadialDensitySlope)
{
  // eta(D(w,r)) ~ (1-|w|^2)^{beta+n+1}, so the ratio behaves like (1-|w|^2)^{beta-alpha}.
  const auto spec = WeightSpec::reference_radial(2, 0.5);
  const GridSpec grid{{0.5, 0.8, 0.9, 0.95, 0.98, 0.99, 0.995}, 2, 1};
  const auto good = carleson_ratio_sweep(BallMeasure::radial_density(2, 1.0), spec, 2, 2, 0.5, grid);
  EXPECT_EQ(good.verdict, Verdict::Bounded);
  EXPECT_NEAR(good.notes.at("slope"), 0.5, 0.05);
  const auto bad = carleson_ratio_sweep(BallMeasure::radial_density(2, -1.0), spec, 2, 2, 0.5, grid);
  EXPECT_NEAR(bad.notes.at("slope"), -1.5, 0.05);
  EXPECT_EQ(bad.verdict, Verdict::Diverging);
}

TEST(Carleson, SkipsWeightPoles)
{
  const CPoint atom = make_point({0.5, 0.0});
  const auto mu = BallMeasure::atomic(2, {{atom, 0.3}});
  const auto spec = WeightSpec::potential_harmonic(mu, 0.0, 1.0, BoundaryMeasure::uniform(2));
  // The first grid direction is e_1, so the level-0.5 point sits on the atom.
  const GridSpec grid{{0.5, 0.9, 0.95, 0.99}, 1, 0};
  const auto s = carleson_ratio_sweep(BallMeasure::radial_density(2, 1.0), spec, 2, 2, 0.5, grid);
  EXPECT_EQ(s.notes.at("skipped"), 1.0);
  EXPECT_EQ(s.points.size(), 3u);
}

TEST(Embedding, MatchesCarlesonOnGoodMeasure)
{
  const auto spec = WeightSpec::reference_radial(2, 0.5);
  std::vector<TestFunctionParams> family;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.98, 0.99, 0.995})
    family.push_back({make_point({level, 0.0}), 3.0, 2.0});
  const auto rule = QuadratureRule::product(2, 48, 4096);
  const auto s = embedding_ratio_sweep(BallMeasure::radial_density(2, 1.0), spec, 2, 2, family, rule);
  EXPECT_EQ(s.verdict, Verdict::Bounded);
  EXPECT_NEAR(s.notes.at("slope"), 0.5, 0.1);
}
