#ifndef BLAB_GEOMETRY_HPP
#define BLAB_GEOMETRY_HPP

// Exact geometry of the unit ball in C^n: the involutive automorphisms phi_w,
// the pseudo-hyperbolic and Bergman metrics, Bergman balls, their Euclidean
// ellipsoid description and volumes. Everything is templated on the real
// scalar so the same code runs in double, long double or a multiprecision type.
//
// Volumes use the normalized Lebesgue measure, v(B) = 1. Multiply by
// pi^n / n! to convert to raw Lebesgue measure on R^{2n}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blab/types.hpp"

namespace blab {

template <typename S>
S norm_sq(const CVector<S>& z)
{
  return z.squaredNorm();
}

template <typename S>
void require_same_dim(const CVector<S>& z, const CVector<S>& w)
{
  if (z.size() != w.size())
    throw DomainError("dimension mismatch: " + std::to_string(z.size()) + " vs " +
                      std::to_string(w.size()));
}

template <typename S>
void require_interior(const CVector<S>& z, const char* what = "point")
{
  using std::isfinite;
  const S r2 = norm_sq(z);
  if (!(r2 < S(1)) || !isfinite(static_cast<double>(r2)))
    throw DomainError(std::string(what) + " must lie in the open unit ball");
}

/// <z, w> = sum_j z_j conj(w_j).
template <typename S>
Complex<S> hermitian_inner(const CVector<S>& z, const CVector<S>& w)
{
  require_same_dim(z, w);
  // Eigen's dot conjugates its first argument.
  return w.dot(z);
}

/// The involution phi_w(z) = (w - P_w z - s_w Q_w z) / (1 - <z,w>), s_w = sqrt(1-|w|^2).
/// phi_0 is z -> -z.
template <typename S>
CVector<S> involution(const CVector<S>& w, const CVector<S>& z)
{
  require_same_dim(z, w);
  require_interior(w, "involution center");
  require_interior(z, "involution argument");
  const S w2 = norm_sq(w);
  if (w2 == S(0))
    return -z;
  const Complex<S> zw = hermitian_inner(z, w);
  const CVector<S> proj = (zw / w2) * w;
  const S s_w = std::sqrt(S(1) - w2);
  const CVector<S> numer = w - proj - s_w * (z - proj);
  return numer / (Complex<S>(S(1)) - zw);
}

/// 1 - |phi_z(w)|^2 = (1-|z|^2)(1-|w|^2) / |1-<w,z>|^2, accurate near the boundary.
template <typename S>
S one_minus_gamma_sq(const CVector<S>& z, const CVector<S>& w)
{
  require_same_dim(z, w);
  require_interior(z);
  require_interior(w);
  const S d = std::norm(Complex<S>(S(1)) - hermitian_inner(w, z));
  return (S(1) - norm_sq(z)) * (S(1) - norm_sq(w)) / d;
}

/// gamma(z, w) = |phi_z(w)|.
template <typename S>
S pseudo_hyperbolic(const CVector<S>& z, const CVector<S>& w)
{
  return involution(z, w).norm();
}

/// beta(z, w) = atanh(gamma(z, w)).
template <typename S>
S bergman_metric(const CVector<S>& z, const CVector<S>& w)
{
  const S g = pseudo_hyperbolic(z, w);
  if (g >= S(1))
    return std::numeric_limits<S>::infinity();
  return std::atanh(g);
}

/// w in D(center, r), i.e. beta(center, w) < r.
template <typename S>
bool in_bergman_ball(const CVector<S>& center, S r, const CVector<S>& w)
{
  if (!(r > S(0)))
    throw DomainError("Bergman ball radius must be positive");
  // beta < r  <=>  gamma < tanh r; comparing gammas avoids atanh overflow.
  return pseudo_hyperbolic(center, w) < std::tanh(r);
}

/// v(D(z, r)) = R^{2n} (1-|z|^2)^{n+1} / (1 - R^2 |z|^2)^{n+1}, R = tanh r.
template <typename S>
S bergman_ball_volume(const CVector<S>& z, S r)
{
  if (!(r > S(0)))
    throw DomainError("Bergman ball radius must be positive");
  require_interior(z);
  const int n = static_cast<int>(z.size());
  const S R = std::tanh(r);
  const S z2 = norm_sq(z);
  return std::pow(R, 2 * n) * std::pow((S(1) - z2) / (S(1) - R * R * z2), n + 1);
}

/// Real Jacobian of phi_c with respect to dv: ((1-|c|^2) / |1-<u,c>|^2)^{n+1}.
template <typename S>
S mobius_jacobian(const CVector<S>& c, const CVector<S>& u)
{
  const int n = static_cast<int>(c.size());
  const S d = std::norm(Complex<S>(S(1)) - hermitian_inner(u, c));
  return std::pow((S(1) - norm_sq(c)) / d, n + 1);
}

template <typename S>
struct EllipsoidParams {
  CVector<S> center;
  S t_param;
  S radius_tangential; // r * t, radius of the slice along the complex line [z]
  S radius_normal;     // r * sqrt(t), radius orthogonal to [z]
};

/// Euclidean description of the pseudo-hyperbolic ball Delta(z, r), 0 < r < 1.
template <typename S>
EllipsoidParams<S> ellipsoid_params(const CVector<S>& z, S r)
{
  if (!(r > S(0) && r < S(1)))
    throw DomainError("pseudo-hyperbolic radius must lie in (0, 1)");
  require_interior(z);
  const S z2 = norm_sq(z);
  const S denom = S(1) - r * r * z2;
  EllipsoidParams<S> e;
  e.center = ((S(1) - r * r) / denom) * z;
  e.t_param = (S(1) - z2) / denom;
  e.radius_tangential = r * e.t_param;
  e.radius_normal = r * std::sqrt(e.t_param);
  return e;
}

/// Comparability constant used for Bergman-ball neighbours:
/// (1-|z|^2)/(1-|w|^2) and (1-|w|^2)/|1-<w,z>| lie in [1/C, C] when beta(z,w) < r.
template <typename S>
S comparability_constant(S r)
{
  return S(4) * std::exp(S(2) * r);
}

/// r1 = 4 e^{2r} / (e^{2r} + 1)^2, the lower bound of 1 - gamma^2 on D(z, r).
template <typename S>
S r1_constant(S r)
{
  const S c = std::cosh(r);
  return S(1) / (c * c);
}

template <typename S>
struct InclusionConstants {
  S r1;
  S big_c;         // B(z, C (1-|z|^2)) lies in D(z, r)
  S alpha;         // radius factor of the local kernel equivalence
  S a_r_estimate;  // kernel-norm comparability constant on D(., r)
  int divisor;     // 4 for the difference bound, 16 for local equivalence
};

template <typename S>
InclusionConstants<S> inclusion_constants(S r, int n, S a_r_estimate, int divisor = 4)
{
  if (!(r > S(0) && r < S(1)))
    throw DomainError("inclusion constants need 0 < r < 1");
  if (!(a_r_estimate >= S(1)))
    throw DomainError("a_r estimate must be >= 1");
  if (n < 1)
    throw DomainError("dimension must be positive");
  if (divisor != 4 && divisor != 16)
    throw DomainError("inclusion divisor must be 4 or 16");
  InclusionConstants<S> k;
  k.r1 = r1_constant(r);
  k.divisor = divisor;
  k.a_r_estimate = a_r_estimate;
  const S scale = S(8) * a_r_estimate * std::sqrt(S(n));
  k.big_c = std::min(scale * k.r1 / S(divisor), k.r1 / S(divisor));
  k.alpha = k.big_c / scale;
  return k;
}

} // namespace blab

#endif
