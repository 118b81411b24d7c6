#ifndef BLAB_BERGMAN_MODEL_HPP
#define BLAB_BERGMAN_MODEL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "blab/quadrature.hpp"
#include "blab/types.hpp"
#include "blab/weights.hpp"

namespace blab {

struct MultiIndex {
  std::array<int, kMaxDimension> exponents{};
  int degree = 0;

  bool operator==(const MultiIndex& o) const { return exponents == o.exponents; }
};

/// All multi-indices of degree <= N, graded by degree, lexicographically
/// descending inside a degree: 1, z1, z2, z1^2, z1 z2, z2^2, ...
std::vector<MultiIndex> graded_lex_basis(int n, int degree_cap);

/// Kernel evaluations are documented reliable for |z||w| below this product.
inline constexpr double kReliableProduct = 0.6;

/// Truncated model of A^2_omega: monomials z^alpha with |alpha| <= N, their
/// Gram matrix under a quadrature rule and its Cholesky factor G = L L^H.
/// Immutable and shareable once built.
class BergmanModel {
public:
  /// Throws NumericalGuard when the Gram matrix is numerically singular
  /// (smallest eigenvalue <= 1e-12 largest, or condition estimate above 1e12).
  static BergmanModel build(const WeightSpec& spec, int degree_cap, const QuadratureRule& rule);

  /// Rebuilds a model from a stored Gram matrix (model cache).
  static BergmanModel from_gram(const WeightSpec& spec, int degree_cap, const RuleParams& rule,
                                const CMatrix& gram);

  const WeightSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension(); }
  int degree_cap() const { return degree_cap_; }
  const std::vector<MultiIndex>& basis() const { return basis_; }
  std::size_t size() const { return basis_.size(); }
  const CMatrix& gram() const { return gram_; }
  const CMatrix& factor() const { return factor_; }
  const RuleParams& rule_params() const { return rule_; }
  double condition_estimate() const { return condition_; }
  double min_eigenvalue() const { return min_eig_; }

  /// (z^alpha) over the basis.
  CColumn monomials(const CPoint& z) const;
  /// Values e_k(z) of the orthonormal basis e = L^{-1} (z^alpha).
  CColumn orthonormal(const CPoint& z) const;

  /// K_N(z, w) = sum_k e_k(z) conj(e_k(w)).
  cplx kernel(const CPoint& z, const CPoint& w) const;
  double kernel_diag(const CPoint& z) const;

private:
  BergmanModel(WeightSpec spec) : spec_(std::move(spec)) {}
  void factorize();

  WeightSpec spec_;
  int degree_cap_ = 0;
  std::vector<MultiIndex> basis_;
  RuleParams rule_;
  CMatrix gram_;
  CMatrix factor_;
  double condition_ = 0.0;
  double min_eig_ = 0.0;
};

inline BergmanModel build_model(const WeightSpec& spec, int degree_cap, const QuadratureRule& rule)
{
  return BergmanModel::build(spec, degree_cap, rule);
}

inline cplx kernel_eval(const BergmanModel& model, const CPoint& z, const CPoint& w)
{
  return model.kernel(z, w);
}

/// ||K_z||^2 = K_N(z, z).
inline double kernel_norm_sq(const BergmanModel& model, const CPoint& z)
{
  return model.kernel_diag(z);
}

struct TestFunctionParams {
  CPoint w;
  double t = 0.0;
  double p = 2.0;
};

/// f_{w,t}(z) = ((1-|w|^2)^{t+n-1} / omega(w))^{1/p} (1 - <z,w>)^{-(2n+t)/p}, principal branch.
class TestFunction {
public:
  TestFunction(const TestFunctionParams& params, const WeightSpec& spec);
  cplx operator()(const CPoint& z) const;
  const TestFunctionParams& params() const { return params_; }
  double weight_at_center() const { return omega_w_; }

private:
  TestFunctionParams params_;
  double omega_w_ = 0.0;
  double scale_ = 0.0;
  double exponent_ = 0.0;
};

cplx test_function_eval(const TestFunctionParams& params, const WeightSpec& spec, const CPoint& z);

struct TestFunctionHypotheses {
  bool norm_bound = false; // t + q > n + 1 > 2 + q
  bool vanishing = false;  // t + n - 1 > q + n s
  std::vector<std::string> diagnostics;
};

TestFunctionHypotheses check_test_function_hypotheses(const WeightSpec& spec, double t);

/// ||f||_{A^p_omega} = (int |f|^p omega dv)^{1/p}. With a center the integral
/// is computed after the change of variables z = phi_center(u).
template <typename F>
Estimate<double> p_norm(F&& f, const WeightSpec& spec, double p, const QuadratureRule& rule,
                        const CPoint* center = nullptr)
{
  if (!(p > 0.0))
    throw DomainError("p must be positive");
  auto integrand = [&](const CPoint& z) { return std::pow(std::abs(f(z)), p) * weight_eval(spec, z); };
  const Estimate<double> raw =
      center ? integrate_ball_recentered(integrand, rule, *center) : integrate_ball(integrand, rule);
  Estimate<double> out;
  out.value = std::pow(raw.value, 1.0 / p);
  if (raw.value > 0.0)
    out.std_error = raw.std_error * out.value / (p * raw.value);
  return out;
}

/// Empirical a_r: max of ||K_z||/||K_a|| and its inverse over sampled pairs
/// with |a| <= 0.4 and z in D(a, r). The pair set is drawn once for radius 1
/// and filtered, so the estimate is nondecreasing in r for a fixed seed.
/// Pairs outside the reliable zone |z|^2 <= 0.6 are dropped.
double estimate_a_r(const BergmanModel& model, double r, std::size_t pair_count, std::uint64_t seed);

} // namespace blab

#endif
