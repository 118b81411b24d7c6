#include <cmath>

#include <boost/math/special_functions/binomial.hpp>
#include <gtest/gtest.h>

#include "blab/bergman_model.hpp"
#include "blab/random.hpp"

using namespace blab;

namespace {

// Truncated kernel of (1-|z|^2)^alpha dv: sum over |b| <= N of z^b conj(w^b) / c_b
// with c_b = n! b! Gamma(alpha+1) / Gamma(n+|b|+alpha+1). Grouping by degree k gives
// sum_k Gamma(n+k+alpha+1) / (n! k! Gamma(alpha+1)) <z,w>^k.
cplx radial_kernel_oracle(int n, int N, double alpha, const CPoint& z, const CPoint& w)
{
  const cplx x = hermitian_inner(z, w);
  cplx sum = 0, xk = 1;
  for (int k = 0; k <= N; ++k) {
    const double c = std::exp(std::lgamma(n + k + alpha + 1) - std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                              std::lgamma(alpha + 1));
    sum += c * xk;
    xk *= x;
  }
  return sum;
}

// int |1 - <z,w>|^{-2c} dv = sum_k (c)_k^2 / k!^2 * k! n! / (n+k)! |w|^{2k}.
double forelli_rudin_series(int n, double c, double w2)
{
  double sum = 0, term = 1;
  for (int k = 0; k < 4000; ++k) {
    const double add = term * std::exp(std::lgamma(k + 1.0) + std::lgamma(n + 1.0) - std::lgamma(n + k + 1.0));
    sum += add;
    if (add < 1e-17 * sum && k > 10)
      break;
    term *= (c + k) * (c + k) / ((k + 1.0) * (k + 1.0)) * w2;
  }
  return sum;
}

BallMeasure three_atoms()
{
  return BallMeasure::atomic(2, {{make_point({cplx(0.55, 0.3), cplx(-0.2, 0.5)}), 0.2},
                                 {make_point({cplx(-0.6, 0.1), cplx(0.3, -0.45)}), 0.2},
                                 {make_point({cplx(0.1, -0.4), cplx(0.6, 0.35)}), 0.2}});
}

} // namespace

TEST(Basis, GradedLexOrder)
{
  const auto b = graded_lex_basis(2, 2);
  ASSERT_EQ(b.size(), 6u);
  const int expect[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (int k = 0; k < 6; ++k) {
    EXPECT_EQ(b[k].exponents[0], expect[k][0]);
    EXPECT_EQ(b[k].exponents[1], expect[k][1]);
    EXPECT_EQ(b[k].degree, expect[k][0] + expect[k][1]);
  }
  for (int n = 1; n <= 3; ++n)
    for (int N : {0, 5, 12})
      EXPECT_EQ(graded_lex_basis(n, N).size(), boost::math::binomial_coefficient<double>(n + N, n));
}

TEST(Model, UnweightedMatchesTruncatedSeries)
{
  const auto rule = QuadratureRule::product(2, 16, 1000);
  const auto model = BergmanModel::build(WeightSpec::unweighted(2), 6, rule);
  Engine rng = make_stream(31);
  for (int k = 0; k < 50; ++k) {
    const CPoint z = sample_ball(2, rng, 0.9);
    const CPoint w = sample_ball(2, rng, 0.9);
    const cplx ref = radial_kernel_oracle(2, 6, 0.0, z, w);
    EXPECT_NEAR(std::abs(model.kernel(z, w) - ref) / std::abs(ref), 0.0, 1e-11);
  }
}

TEST(Model, ReferenceRadialMatchesTruncatedSeries)
{
  const auto rule = QuadratureRule::product(3, 16, 1000);
  const auto model = BergmanModel::build(WeightSpec::reference_radial(3, 1.0), 5, rule);
  Engine rng = make_stream(32);
  for (int k = 0; k < 30; ++k) {
    const CPoint z = sample_ball(3, rng, 0.8);
    const CPoint w = sample_ball(3, rng, 0.8);
    const cplx ref = radial_kernel_oracle(3, 5, 1.0, z, w);
    EXPECT_NEAR(std::abs(model.kernel(z, w) - ref) / std::abs(ref), 0.0, 1e-11);
    EXPECT_NEAR(model.kernel_diag(z), radial_kernel_oracle(3, 5, 1.0, z, z).real(), 1e-10 * model.kernel_diag(z));
  }
}

TEST(Model, OrthonormalUnderTheRule)
{
  const auto spec = WeightSpec::potential_harmonic(three_atoms(), 0.0, 1.0, BoundaryMeasure::uniform(2));
  const auto rule = QuadratureRule::product(2, 24, 1024);
  const auto model = BergmanModel::build(spec, 5, rule);
  const auto B = static_cast<Eigen::Index>(model.size());
  CMatrix gram = CMatrix::Zero(B, B);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const CColumn y = model.orthonormal(rule.point(k));
    gram += (rule.weight(k) * weight_eval(spec, rule.point(k))) * (y * y.adjoint());
  }
  EXPECT_LT((gram - CMatrix::Identity(B, B)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Model, KernelIsHermitianAndPositive)
{
  const auto spec = WeightSpec::potential_harmonic(three_atoms(), 0.0, 1.0, BoundaryMeasure::uniform(2));
  const auto model = BergmanModel::build(spec, 6, QuadratureRule::product(2, 24, 1024));
  const CPoint z = make_point({0.2, cplx(0.1, -0.3)});
  const CPoint w = make_point({cplx(-0.4, 0.1), 0.2});
  EXPECT_NEAR(std::abs(model.kernel(z, w) - std::conj(model.kernel(w, z))), 0.0, 1e-12);
  EXPECT_GT(model.kernel_diag(z), 0.0);
  EXPECT_NEAR(model.kernel_diag(z), model.kernel(z, z).real(), 1e-12 * model.kernel_diag(z));
  EXPECT_LE(std::norm(model.kernel(z, w)), model.kernel_diag(z) * model.kernel_diag(w) * (1 + 1e-12));
  EXPECT_NEAR(kernel_norm_sq(model, z), model.kernel_diag(z), 0.0);
}

TEST(Model, RadialGramIsDiagonal)
{
  const auto model = BergmanModel::build(WeightSpec::reference_radial(2, 0.5), 4, QuadratureRule::product(2, 16, 400));
  const CMatrix& g = model.gram();
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (i != j) {
        EXPECT_EQ(std::abs(g(i, j)), 0.0);
      }
}

TEST(Model, SingularGramIsRefused)
{
  const auto spec = WeightSpec::potential_harmonic(three_atoms(), 0.0, 1.0, BoundaryMeasure::uniform(2));
  const auto rule = QuadratureRule::product(2, 2, 4);
  EXPECT_THROW(BergmanModel::build(spec, 8, rule), NumericalGuard);
}

TEST(Model, FromGramReproducesBuild)
{
  const auto spec = WeightSpec::potential_harmonic(three_atoms(), 0.0, 1.0, BoundaryMeasure::uniform(2));
  const auto rule = QuadratureRule::product(2, 24, 1024);
  const auto built = BergmanModel::build(spec, 5, rule);
  const auto loaded = BergmanModel::from_gram(spec, 5, rule.params(), built.gram());
  const CPoint z = make_point({0.3, 0.1});
  const CPoint w = make_point({0.0, cplx(0.2, 0.2)});
  EXPECT_EQ(built.kernel(z, w), loaded.kernel(z, w));
  CMatrix bad = built.gram();
  bad(0, 1) += 1.0;
  EXPECT_THROW(BergmanModel::from_gram(spec, 5, rule.params(), bad), NumericalGuard);
  EXPECT_THROW(BergmanModel::from_gram(spec, 6, rule.params(), built.gram()), DomainError);
}

TEST(Model, BuildIndependentOfThreads)
{
  const auto spec = WeightSpec::potential_harmonic(three_atoms(), 0.0, 1.0, BoundaryMeasure::uniform(2));
  const auto rule = QuadratureRule::product(2, 24, 4096);
  set_thread_count(1);
  const auto a = BergmanModel::build(spec, 5, rule);
  set_thread_count(4);
  const auto b = BergmanModel::build(spec, 5, rule);
  set_thread_count(0);
  EXPECT_EQ((a.gram() - b.gram()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(TestFunction, FormulaAndBranch)
{
  const auto spec = WeightSpec::reference_radial(2, 0.5);
  const CPoint w = make_point({0.6, cplx(0.0, 0.3)});
  const TestFunctionParams tp{w, 3.0, 2.0};
  const CPoint z = make_point({cplx(-0.4, 0.5), 0.2});
  const double rho = 1 - w.squaredNorm();
  const double scale = std::sqrt(std::pow(rho, 3.0 + 1.0) / std::pow(rho, 0.5));
  const cplx expected = scale * std::exp(-3.5 * std::log(1.0 - hermitian_inner(z, w)));
  EXPECT_NEAR(std::abs(test_function_eval(tp, spec, z) - expected), 0.0, 1e-13);
  EXPECT_NEAR(TestFunction(tp, spec).weight_at_center(), std::pow(rho, 0.5), 1e-15);
}

TEST(TestFunction, UnweightedNormMatchesSeries)
{
  const auto spec = WeightSpec::unweighted(2);
  const auto rule = QuadratureRule::product(2, 64, 4096);
  for (double level : {0.0, 0.5, 0.8}) {
    const CPoint w = make_point({level, 0.0});
    const double t = 2.5;
    const TestFunction f({w, t, 2.0}, spec);
    const double ref = std::sqrt(std::pow(1 - level * level, t + 1) * forelli_rudin_series(2, (4 + t) / 2, level * level));
    EXPECT_NEAR(p_norm(f, spec, 2.0, rule, &w).value, ref, 1e-5 * ref) << level;
  }
}

TEST(TestFunction, Hypotheses)
{
  const auto ph = WeightSpec::potential_harmonic(three_atoms(), 0.0, 1.0, BoundaryMeasure::uniform(2));
  const auto h = check_test_function_hypotheses(ph, 4.0);
  EXPECT_TRUE(h.norm_bound);
  EXPECT_TRUE(h.vanishing);
  const auto low = check_test_function_hypotheses(ph, 2.0);
  EXPECT_FALSE(low.norm_bound);
  EXPECT_EQ(low.diagnostics.size(), 1u);
  EXPECT_FALSE(check_test_function_hypotheses(ph, 0.5).vanishing);
  const auto big_q = WeightSpec::reference_radial(2, 1.5);
  EXPECT_FALSE(check_test_function_hypotheses(big_q, 5.0).norm_bound);
}

TEST(ArEstimate, AtLeastOneAndMonotone)
{
  const auto spec = WeightSpec::potential_harmonic(three_atoms(), 0.0, 1.0, BoundaryMeasure::uniform(2));
  const auto model = BergmanModel::build(spec, 8, QuadratureRule::product(2, 24, 2048));
  double prev = 1.0;
  for (double r : {0.1, 0.25, 0.5, 0.75}) {
    const double a = estimate_a_r(model, r, 500, 17);
    EXPECT_GE(a, prev);
    prev = a;
  }
  EXPECT_GT(prev, 1.0);
  EXPECT_EQ(estimate_a_r(model, 0.5, 500, 17), estimate_a_r(model, 0.5, 500, 17));
}
