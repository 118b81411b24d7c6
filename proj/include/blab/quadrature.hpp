#ifndef BLAB_QUADRATURE_HPP
#define BLAB_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "blab/geometry.hpp"
#include "blab/parallel.hpp"
#include "blab/random.hpp"
#include "blab/types.hpp"

namespace blab {

/// Nodes and weights of a one-dimensional rule on [0, 1].
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule on [0, 1] for the weight (1-x)^a x^b (Golub-Welsch).
/// Weights sum to B(a+1, b+1).
Rule1D gauss_jacobi_01(int order, double a, double b);

inline Rule1D gauss_legendre_01(int order)
{
  return gauss_jacobi_01(order, 0.0, 0.0);
}

enum class SphereKind {
  Structured, // Dirichlet-simplex Gauss rule times equispaced phases
  Random      // seeded uniform point set with equal weights
};

enum class RuleKind { Product, MonteCarlo };

struct RuleParams {
  RuleKind kind = RuleKind::Product;
  int radial_order = 64;
  int sphere_count = 4096;
  SphereKind sphere = SphereKind::Structured;
  std::size_t mc_count = 100000;
  std::uint64_t seed = 0;
};

template <typename T>
struct Estimate {
  T value{};
  double std_error = 0.0;
};

/// A node set realizing integrals against the normalized volume measure of B.
/// Product rules are deterministic (radial Gauss-Jacobi in x = |z|^2 with the
/// x^{n-1} Jacobian, times a sphere rule); Monte Carlo rules are uniform samples.
/// Immutable after construction.
class QuadratureRule {
public:
  static QuadratureRule product(int n, int radial_order = 64, int sphere_count = 4096,
                                SphereKind sphere = SphereKind::Structured,
                                std::uint64_t seed = 0);
  static QuadratureRule monte_carlo(int n, std::size_t count, std::uint64_t seed);
  static QuadratureRule from_params(int n, const RuleParams& params);

  int dimension() const { return n_; }
  bool is_monte_carlo() const { return params_.kind == RuleKind::MonteCarlo; }
  const RuleParams& params() const { return params_; }
  std::size_t size() const { return points_.size(); }

  const CPoint& point(std::size_t k) const { return points_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  std::span<const CPoint> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }

  /// Product rules only: (|z|, weight) pairs and the unit sphere points.
  const std::vector<std::pair<double, double>>& radial_nodes() const { return radial_; }
  const std::vector<CPoint>& sphere_points() const { return sphere_points_; }
  const std::vector<double>& sphere_weights() const { return sphere_weights_; }

  /// Angular resolution per real angular coordinate of the structured sphere rule.
  int angular_order() const { return angular_order_; }

  std::string describe() const;

private:
  int n_ = 0;
  RuleParams params_;
  int angular_order_ = 0;
  std::vector<std::pair<double, double>> radial_;
  std::vector<CPoint> sphere_points_;
  std::vector<double> sphere_weights_;
  std::vector<CPoint> points_;
  std::vector<double> weights_;
};

/// Sphere rule on S^{2n-1} against normalized surface measure.
struct SphereRule {
  std::vector<CPoint> points;
  std::vector<double> weights;
};

SphereRule structured_sphere_rule(int n, int angular_order);
SphereRule random_sphere_rule(int n, int count, std::uint64_t seed);

/// Angular order giving roughly `count` structured points: round(count^{1/(2n-1)}).
int angular_order_for_count(int n, int count);

/// Pairwise summation in index order; the result does not depend on thread count.
template <typename T>
T pairwise_sum(std::span<const T> v)
{
  if (v.size() <= 16) {
    T acc{};
    for (const auto& x : v)
      acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace detail {
inline bool finite_value(double x) { return std::isfinite(x); }
inline bool finite_value(const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }
inline double abs_sq(double x) { return x * x; }
inline double abs_sq(const cplx& x) { return std::norm(x); }

inline std::string describe_point(const CPoint& z)
{
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index j = 0; j < z.size(); ++j)
    os << (j ? ", " : "") << z(j).real() << (z(j).imag() < 0 ? "-" : "+")
       << std::abs(z(j).imag()) << "i";
  os << ")";
  return os.str();
}

template <typename F>
auto integrate_impl(const QuadratureRule& rule, F&& f, const CPoint* center)
{
  using T = std::decay_t<decltype(f(std::declval<const CPoint&>()))>;
  const std::size_t count = rule.size();
  std::vector<T> values(count);
  constexpr std::size_t block = 4096;
  const std::size_t blocks = (count + block - 1) / block;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(count, (b + 1) * block);
    for (std::size_t k = b * block; k < end; ++k) {
      const CPoint& u = rule.point(k);
      T fx;
      double jac = 1.0;
      if (center) {
        fx = f(involution(*center, u));
        jac = mobius_jacobian(*center, u);
      } else {
        fx = f(u);
      }
      if (!finite_value(fx))
        throw NumericalGuard("non-finite integrand at quadrature node " + std::to_string(k) +
                             " " + describe_point(center ? involution(*center, u) : u));
      values[k] = rule.is_monte_carlo() ? T(fx * jac) : T(fx * (jac * rule.weight(k)));
    }
  });
  Estimate<T> out;
  const T total = pairwise_sum(std::span<const T>(values));
  if (!rule.is_monte_carlo()) {
    out.value = total;
    return out;
  }
  const double m = static_cast<double>(count);
  out.value = total / m;
  std::vector<double> dev(count);
  for (std::size_t k = 0; k < count; ++k)
    dev[k] = abs_sq(values[k] - out.value);
  const double var = count > 1 ? pairwise_sum(std::span<const double>(dev)) / (m - 1.0) : 0.0;
  out.std_error = std::sqrt(var / m);
  return out;
}
} // namespace detail

/// Integral of f over B against normalized volume. Monte Carlo rules report a standard error.
template <typename F>
auto integrate_ball(F&& f, const QuadratureRule& rule)
{
  return detail::integrate_impl(rule, std::forward<F>(f), nullptr);
}

/// Same integral after the measure-preserving change of variables z = phi_c(u).
/// Concentrates nodes near c; used for integrands peaked at a point near the boundary.
template <typename F>
auto integrate_ball_recentered(F&& f, const QuadratureRule& rule, const CPoint& center)
{
  require_interior(center, "recentering point");
  return detail::integrate_impl(rule, std::forward<F>(f), &center);
}

/// Monte Carlo integral over the unit sphere against normalized surface measure.
template <typename F>
auto integrate_sphere(F&& f, int n, std::size_t count, std::uint64_t seed)
{
  using T = std::decay_t<decltype(f(std::declval<const CPoint&>()))>;
  if (count < 1)
    throw DomainError("sphere sample count must be >= 1");
  Engine rng = make_stream(seed, 0);
  std::vector<T> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    const CPoint xi = sample_sphere(n, rng);
    values[k] = f(xi);
    if (!detail::finite_value(values[k]))
      throw NumericalGuard("non-finite integrand at sphere sample " + std::to_string(k) + " " +
                           detail::describe_point(xi));
  }
  const double m = static_cast<double>(count);
  Estimate<T> out;
  out.value = pairwise_sum(std::span<const T>(values)) / m;
  double ss = 0.0;
  for (const auto& v : values)
    ss += detail::abs_sq(v - out.value);
  out.std_error = count > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  return out;
}

} // namespace blab

#endif
