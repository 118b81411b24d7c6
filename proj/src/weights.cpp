#include "blab/weights.hpp"

#include <cmath>
#include <sstream>

#include "blab/geometry.hpp"

namespace blab {

namespace {

double binomial(int n, int k)
{
  if (k < 0 || k > n)
    return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i)
    b = b * (n - k + i) / i;
  return b;
}

std::string point_text(const CPoint& z)
{
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (Eigen::Index j = 0; j < z.size(); ++j)
    os << (j ? ", " : "") << z(j);
  os << ")";
  return os.str();
}

} // namespace

double green_g_radial(int n, double a, double y)
{
  if (n < 1)
    throw DomainError("dimension must be positive");
  if (!(a > 0.0))
    throw PoleError("Green function has a pole at the origin");
  if (y <= 0.0)
    return 0.0;
  const double c = (n + 1.0) / (4.0 * n);
  if (y <= 0.25) {
    // int_0^y u^{n-1} (1-u)^{-n} du = sum_m C(n+m-1, m) y^{n+m} / (n+m).
    double sum = 0.0;
    double coef = 1.0; // C(n+m-1, m)
    double ypow = std::pow(y, n);
    for (int m = 0; m < 200; ++m) {
      const double term = coef * ypow / (n + m);
      sum += term;
      if (term < 1e-18 * sum)
        break;
      coef = coef * (n + m) / (m + 1.0);
      ypow *= y;
    }
    return c * sum;
  }
  // Expand (1-x)^{n-1} and integrate x^{k-n} over [a, 1] term by term.
  double sum = 0.0;
  for (int k = 0; k <= n - 1; ++k) {
    const double b = binomial(n - 1, k) * ((k % 2) ? -1.0 : 1.0);
    const int e = k - n + 1;
    const double piece = (e == 0) ? -std::log(a) : (1.0 - std::pow(a, e)) / e;
    sum += b * piece;
  }
  return c * sum;
}

double green_g(const CPoint& z)
{
  const double a = z.squaredNorm();
  if (!(a <= 1.0 + 1e-15))
    throw DomainError("green_g needs |z| <= 1");
  return green_g_radial(static_cast<int>(z.size()), a, std::max(0.0, 1.0 - a));
}

double green_G(const CPoint& z, const CPoint& w)
{
  const double y = one_minus_gamma_sq(z, w);
  const double a = involution(z, w).squaredNorm();
  if (!(a > 0.0))
    throw PoleError("Green function pole: z = w");
  return green_g_radial(static_cast<int>(z.size()), a, std::min(1.0, y));
}

double potential_U(const BallMeasure& mu, double s, const CPoint& z)
{
  if (!(s >= 0.0))
    throw DomainError("potential exponent s must be >= 0");
  if (z.size() != mu.dimension())
    throw DomainError("potential point dimension does not match mu");
  require_interior(z);
  if (mu.is_zero())
    return 0.0;
  if (s == 0.0)
    return total_mass(mu);
  const auto* atomic = mu.as_atomic();
  if (!atomic)
    throw DomainError("Green potentials with s > 0 need an atomic mu");
  double u = 0.0;
  for (const auto& atom : atomic->atoms) {
    if ((z - atom.point).norm() < kPoleRadius)
      throw PoleError("point " + point_text(z) + " lies on the atom " + point_text(atom.point) +
                      " of mu");
    u += atom.mass * std::pow(green_G(z, atom.point), s);
  }
  return u;
}

double poisson_kernel(const CPoint& z, const CPoint& xi)
{
  require_same_dim(z, xi);
  require_interior(z);
  if (!(std::abs(xi.norm() - 1.0) <= 1e-12))
    throw DomainError("Poisson kernel needs a unit boundary point");
  const int n = static_cast<int>(z.size());
  const double d = std::norm(1.0 - hermitian_inner(z, xi));
  return std::pow((1.0 - z.squaredNorm()) / d, n);
}

double poisson_integral(const BoundaryMeasure& nu, const CPoint& z)
{
  if (z.size() != nu.dimension())
    throw DomainError("Poisson integral point dimension does not match nu");
  require_interior(z);
  if (const auto* u = nu.as_uniform())
    return u->mass;
  const auto* atomic = nu.as_atomic();
  if (!atomic)
    return 0.0;
  double p = 0.0;
  for (const auto& atom : atomic->atoms)
    p += atom.mass * poisson_kernel(z, atom.point);
  return p;
}

WeightSpec WeightSpec::potential_harmonic(BallMeasure mu, double q, double s, BoundaryMeasure nu)
{
  if (mu.dimension() != nu.dimension())
    throw DomainError("mu and nu live in different dimensions");
  if (!std::isfinite(q) || !std::isfinite(s))
    throw DomainError("q and s must be finite");
  if (!(q > -2.0))
    throw DomainError("weight exponent q must satisfy q > -2 (got " + std::to_string(q) + ")");
  if (!(s >= 0.0))
    throw DomainError("potential exponent s must satisfy s >= 0 (got " + std::to_string(s) + ")");
  if (!(q + s > -1.0))
    throw DomainError("weight exponents must satisfy q + s > -1");
  if (mu.is_zero() && nu.is_zero())
    throw DomainError("mu and nu cannot both be zero: the weight would vanish identically");
  if (s > 0.0 && !mu.is_zero() && !mu.as_atomic())
    throw DomainError("Green potentials with s > 0 need an atomic mu");
  const int n = mu.dimension();
  return WeightSpec(n, PotentialHarmonic{std::move(mu), q, s, std::move(nu)});
}

WeightSpec WeightSpec::reference_radial(int n, double alpha)
{
  if (n < 1 || n > kMaxDimension)
    throw DomainError("unsupported dimension " + std::to_string(n));
  if (!(alpha > -1.0) || !std::isfinite(alpha))
    throw DomainError("reference weight exponent must exceed -1");
  return WeightSpec(n, ReferenceRadial{alpha});
}

WeightSpec WeightSpec::oscillatory(int n, double alpha)
{
  if (n < 1 || n > kMaxDimension)
    throw DomainError("unsupported dimension " + std::to_string(n));
  if (!(alpha > -1.0) || !std::isfinite(alpha))
    throw DomainError("oscillatory weight exponent must exceed -1");
  return WeightSpec(n, Oscillatory{alpha});
}

WeightSpec WeightSpec::unweighted(int n)
{
  return potential_harmonic(BallMeasure::zero(n), 0.0, 0.0, BoundaryMeasure::uniform(n, 1.0));
}

bool WeightSpec::is_radial() const
{
  if (const auto* ph = as_potential_harmonic()) {
    const bool mu_radial = ph->mu.is_radial() || ph->s == 0.0;
    return mu_radial && ph->nu.is_radial();
  }
  return true;
}

double WeightSpec::q_exponent() const
{
  if (const auto* ph = as_potential_harmonic())
    return ph->q;
  if (const auto* r = as_reference_radial())
    return r->alpha;
  return as_oscillatory()->alpha;
}

double WeightSpec::q_plus_ns() const
{
  if (const auto* ph = as_potential_harmonic())
    return ph->q + n_ * ph->s;
  return q_exponent();
}

std::string WeightSpec::describe() const
{
  std::ostringstream os;
  os.precision(17);
  if (const auto* ph = as_potential_harmonic()) {
    os << "potential_harmonic(n=" << n_ << ", q=" << ph->q << ", s=" << ph->s
       << ", mu_mass=" << total_mass(ph->mu) << ", nu_mass=" << total_mass(ph->nu) << ")";
  } else if (const auto* r = as_reference_radial()) {
    os << "reference_radial(n=" << n_ << ", alpha=" << r->alpha << ") [non-class]";
  } else {
    os << "oscillatory(n=" << n_ << ", alpha=" << as_oscillatory()->alpha << ") [non-class]";
  }
  return os.str();
}

double weight_eval(const WeightSpec& spec, const CPoint& z)
{
  if (z.size() != spec.dimension())
    throw DomainError("weight point dimension does not match the weight");
  require_interior(z);
  const double rho = 1.0 - z.squaredNorm();
  if (const auto* ph = spec.as_potential_harmonic()) {
    double w = poisson_integral(ph->nu, z);
    if (!ph->mu.is_zero())
      w += std::pow(rho, ph->q) * potential_U(ph->mu, ph->s, z);
    return w;
  }
  if (const auto* r = spec.as_reference_radial())
    return std::pow(rho, r->alpha);
  const double alpha = spec.as_oscillatory()->alpha;
  const double zn = std::max(z.norm(), 1e-3);
  return std::pow(rho, alpha) * (1.0 + std::sin(1.0 / (zn * zn)));
}

ComparabilityResult comparability_ratio(const WeightSpec& spec, const CPoint& a, double r,
                                        std::size_t sample_count, std::uint64_t seed)
{
  return comparability_extremes([&](const CPoint& z) { return weight_eval(spec, z); }, a, r,
                                sample_count, seed);
}

} // namespace blab
