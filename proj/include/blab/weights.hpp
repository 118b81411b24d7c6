#ifndef BLAB_WEIGHTS_HPP
#define BLAB_WEIGHTS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "blab/measures.hpp"
#include "blab/types.hpp"

namespace blab {

/// Invariant Green function g(z) of the ball, a = |z|^2 and y = 1 - a given
/// separately so that points near the sphere keep full relative accuracy.
double green_g_radial(int n, double a, double one_minus_a);

/// g(z) = (n+1)/(2n) int_{|z|}^1 r^{1-2n} (1-r^2)^{n-1} dr. Throws PoleError at z = 0.
double green_g(const CPoint& z);

/// G(z, w) = g(phi_z(w)). Throws PoleError when z = w.
double green_G(const CPoint& z, const CPoint& w);

/// Euclidean radius around atoms of mu inside which U is treated as a pole.
inline constexpr double kPoleRadius = 1e-6;

/// U_{mu,s}(z) = int G(z,w)^s dmu(w); s = 0 gives the total mass.
/// Non-atomic mu is only supported for s = 0.
double potential_U(const BallMeasure& mu, double s, const CPoint& z);

/// P(z, xi) = (1-|z|^2)^n / |1 - <z,xi>|^{2n}, |xi| = 1 to 1e-12.
double poisson_kernel(const CPoint& z, const CPoint& xi);

/// P_nu(z). Exact for atomic nu; the uniform measure of mass m gives m.
double poisson_integral(const BoundaryMeasure& nu, const CPoint& z);

struct PotentialHarmonic {
  BallMeasure mu;
  double q = 0.0;
  double s = 0.0;
  BoundaryMeasure nu;
};

/// (1-|z|^2)^alpha.
struct ReferenceRadial {
  double alpha = 0.0;
};

/// (1-|z|^2)^alpha (1 + sin(|z|^{-2})), with |z| clamped below at 1e-3.
struct Oscillatory {
  double alpha = 0.0;
};

/// A weight on the ball: the potential-harmonic class or one of two radial
/// reference weights (flagged non-class in reports).
class WeightSpec {
public:
  using Variant = std::variant<PotentialHarmonic, ReferenceRadial, Oscillatory>;

  /// Validates q > -2, s >= 0, q + s > -1, matching dimensions and that mu, nu are not both zero.
  static WeightSpec potential_harmonic(BallMeasure mu, double q, double s, BoundaryMeasure nu);
  static WeightSpec reference_radial(int n, double alpha);
  static WeightSpec oscillatory(int n, double alpha);
  /// omega == 1: mu = 0, q = s = 0, nu uniform of mass 1.
  static WeightSpec unweighted(int n);

  int dimension() const { return n_; }
  const Variant& variant() const { return v_; }
  const PotentialHarmonic* as_potential_harmonic() const { return std::get_if<PotentialHarmonic>(&v_); }
  const ReferenceRadial* as_reference_radial() const { return std::get_if<ReferenceRadial>(&v_); }
  const Oscillatory* as_oscillatory() const { return std::get_if<Oscillatory>(&v_); }

  bool is_class() const { return as_potential_harmonic() != nullptr; }
  bool is_radial() const;
  /// Boundary exponent used by the test functions: q for the class, alpha otherwise.
  double q_exponent() const;
  /// q + n s for the class (alpha otherwise); the exponent the estimates actually use.
  double q_plus_ns() const;
  std::string describe() const;

private:
  WeightSpec(int n, Variant v) : n_(n), v_(std::move(v)) {}
  int n_ = 0;
  Variant v_;
};

double weight_eval(const WeightSpec& spec, const CPoint& z);

struct ComparabilityResult {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::size_t samples = 0;
};

/// Extremes of f(z)/f(a) over z = phi_a(u), u uniform in B(0, tanh r), i.e. z in D(a, r).
template <typename F>
ComparabilityResult comparability_extremes(F&& f, const CPoint& a, double r,
                                           std::size_t sample_count, std::uint64_t seed);

ComparabilityResult comparability_ratio(const WeightSpec& spec, const CPoint& a, double r,
                                        std::size_t sample_count, std::uint64_t seed);

} // namespace blab

#include "blab/geometry.hpp"
#include "blab/parallel.hpp"
#include "blab/random.hpp"

namespace blab {

template <typename F>
ComparabilityResult comparability_extremes(F&& f, const CPoint& a, double r,
                                           std::size_t sample_count, std::uint64_t seed)
{
  if (!(r > 0.0))
    throw DomainError("comparability radius must be positive");
  if (sample_count < 1)
    throw DomainError("comparability needs at least one sample");
  require_interior(a, "comparability center");
  const double f_a = f(a);
  if (!(f_a > 0.0) || !std::isfinite(f_a))
    throw NumericalGuard("function is not positive and finite at the comparability center");
  const double R = std::tanh(r);
  const int n = static_cast<int>(a.size());
  constexpr std::size_t block = 256;
  const std::size_t blocks = (sample_count + block - 1) / block;
  std::vector<std::pair<double, double>> extremes(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    Engine rng = make_stream(seed, b);
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    const std::size_t end = std::min(sample_count, (b + 1) * block);
    for (std::size_t k = b * block; k < end; ++k) {
      const CPoint z = involution(a, sample_ball(n, rng, R));
      const double ratio = f(z) / f_a;
      hi = std::max(hi, ratio);
      lo = std::min(lo, ratio);
    }
    extremes[b] = {hi, lo};
  });
  ComparabilityResult out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& [hi, lo] : extremes) {
    out.max_ratio = std::max(out.max_ratio, hi);
    out.min_ratio = std::min(out.min_ratio, lo);
  }
  out.samples = sample_count;
  return out;
}

} // namespace blab

#endif
