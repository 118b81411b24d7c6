#ifndef BLAB_TESTS_ORACLES_HPP
#define BLAB_TESTS_ORACLES_HPP

// Independent reference computations for the unit tests: 50-digit arithmetic
// and adaptive quadrature, written against the defining formulas only.

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "blab/types.hpp"

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_50;

struct hc {
  hp re = 0, im = 0;
};

inline hc operator+(hc a, hc b) { return {a.re + b.re, a.im + b.im}; }
inline hc operator-(hc a, hc b) { return {a.re - b.re, a.im - b.im}; }
inline hc operator*(hc a, hc b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline hc operator*(hp s, hc a) { return {s * a.re, s * a.im}; }
inline hc conj(hc a) { return {a.re, -a.im}; }
inline hp norm(hc a) { return a.re * a.re + a.im * a.im; }
inline hc div(hc a, hc b)
{
  const hp d = norm(b);
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

using hvec = std::vector<hc>;

inline hvec lift(const blab::CPoint& z)
{
  hvec out(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k)
    out[k] = {hp(z(k).real()), hp(z(k).imag())};
  return out;
}

inline hc inner(const hvec& z, const hvec& w)
{
  hc s;
  for (std::size_t k = 0; k < z.size(); ++k)
    s = s + z[k] * conj(w[k]);
  return s;
}

inline hp norm_sq(const hvec& z) { return inner(z, z).re; }

// phi_w(z) = (w - P_w z - s_w Q_w z) / (1 - <z,w>), w != 0.
inline hvec involution(const hvec& w, const hvec& z)
{
  const hp w2 = norm_sq(w);
  const hc zw = inner(z, w);
  const hp s = boost::multiprecision::sqrt(hp(1) - w2);
  const hc den = hc{hp(1), hp(0)} - zw;
  hvec out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    const hc p = (hp(1) / w2) * (zw * w[k]);
    const hc q = z[k] - p;
    out[k] = div(w[k] - p - s * q, den);
  }
  return out;
}

inline double to_d(const hp& x) { return static_cast<double>(x); }

// Adaptive Gauss-Kronrod on [a, b].
template <typename F>
double integrate(F f, double a, double b, double* error = nullptr)
{
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, error);
}

} // namespace oracle

#endif
