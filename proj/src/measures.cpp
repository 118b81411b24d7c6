#include "blab/measures.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "blab/geometry.hpp"
#include "blab/random.hpp"

namespace blab {

namespace {

constexpr double kSphereInputTolerance = 1e-6;

void check_dimension(int n)
{
  if (n < 1 || n > kMaxDimension)
    throw DomainError("unsupported dimension " + std::to_string(n));
}

void check_atoms_dims(int n, const std::vector<Atom>& atoms)
{
  for (const auto& a : atoms) {
    if (a.point.size() != n)
      throw DomainError("atom dimension " + std::to_string(a.point.size()) +
                        " does not match measure dimension " + std::to_string(n));
    if (!(a.mass > 0.0) || !std::isfinite(a.mass))
      throw DomainError("atom masses must be positive and finite");
  }
}

std::size_t pick_atom(const std::vector<Atom>& atoms, double total, Engine& rng)
{
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (u < atoms[i].mass)
      return i;
    u -= atoms[i].mass;
  }
  return atoms.size() - 1;
}

} // namespace

double radial_moment(int n, double beta)
{
  if (!(beta > -1.0))
    return std::numeric_limits<double>::infinity();
  return std::exp(std::lgamma(n + 1.0) + std::lgamma(beta + 1.0) - std::lgamma(n + beta + 1.0));
}

BallMeasure BallMeasure::atomic(int n, std::vector<Atom> atoms)
{
  check_dimension(n);
  check_atoms_dims(n, atoms);
  if (atoms.empty())
    return zero(n);
  for (const auto& a : atoms)
    require_interior(a.point, "ball atom");
  return BallMeasure(n, AtomicBall{std::move(atoms)});
}

BallMeasure BallMeasure::radial_density(int n, double beta, double scale)
{
  check_dimension(n);
  if (!std::isfinite(beta))
    throw DomainError("radial density exponent must be finite");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw DomainError("radial density scale must be positive");
  return BallMeasure(n, RadialDensity{beta, scale});
}

BallMeasure BallMeasure::zero(int n)
{
  check_dimension(n);
  return BallMeasure(n, ZeroMeasure{});
}

bool BallMeasure::is_radial() const
{
  if (const auto* a = as_atomic()) {
    for (const auto& atom : a->atoms)
      if (atom.point.squaredNorm() != 0.0)
        return false;
  }
  return true;
}

BoundaryMeasure BoundaryMeasure::atomic(int n, std::vector<Atom> atoms)
{
  check_dimension(n);
  check_atoms_dims(n, atoms);
  if (atoms.empty())
    return zero(n);
  for (auto& a : atoms) {
    const double r = a.point.norm();
    if (!(std::abs(r - 1.0) <= kSphereInputTolerance))
      throw DomainError("boundary atom must lie on the unit sphere (|xi| = " + std::to_string(r) +
                        ")");
    a.point /= r;
  }
  return BoundaryMeasure(n, AtomicBall{std::move(atoms)});
}

BoundaryMeasure BoundaryMeasure::uniform(int n, double mass)
{
  check_dimension(n);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw DomainError("uniform boundary mass must be positive");
  return BoundaryMeasure(n, UniformBoundary{mass});
}

BoundaryMeasure BoundaryMeasure::zero(int n)
{
  check_dimension(n);
  return BoundaryMeasure(n, ZeroMeasure{});
}

double total_mass(const BallMeasure& m)
{
  if (const auto* a = m.as_atomic()) {
    double s = 0.0;
    for (const auto& atom : a->atoms)
      s += atom.mass;
    return s;
  }
  if (const auto* d = m.as_radial())
    return d->scale * radial_moment(m.dimension(), d->beta);
  return 0.0;
}

double total_mass(const BoundaryMeasure& m)
{
  if (const auto* a = m.as_atomic()) {
    double s = 0.0;
    for (const auto& atom : a->atoms)
      s += atom.mass;
    return s;
  }
  if (const auto* u = m.as_uniform())
    return u->mass;
  return 0.0;
}

Estimate<double> ball_mass(const BallMeasure& m, const CPoint& center, double r,
                           const BallMassOptions& options)
{
  if (!(r > 0.0))
    throw DomainError("Bergman ball radius must be positive");
  if (center.size() != m.dimension())
    throw DomainError("center dimension does not match measure");
  require_interior(center, "ball center");

  Estimate<double> out;
  if (const auto* a = m.as_atomic()) {
    for (const auto& atom : a->atoms)
      if (in_bergman_ball(center, r, atom.point))
        out.value += atom.mass;
    return out;
  }
  const auto* d = m.as_radial();
  if (!d)
    return out;

  // With w = phi_a(u): 1-|w|^2 = (1-|a|^2)(1-|u|^2)/|1-<u,a>|^2 and the Jacobian is
  // ((1-|a|^2)/|1-<u,a>|^2)^{n+1}, so eta(D(a,r)) equals
  // scale (1-|a|^2)^{beta+n+1} int_{|u|<R} (1-|u|^2)^beta |1-<u,a>|^{-2(beta+n+1)} dv(u).
  const int n = m.dimension();
  const double R = std::tanh(r);
  const double a2 = center.squaredNorm();
  const double expo = d->beta + n + 1.0;
  auto integrand = [&](const CPoint& u) {
    const double u2 = u.squaredNorm();
    const double den = std::norm(1.0 - center.dot(u));
    return std::pow(1.0 - u2, d->beta) * std::pow(den, -expo);
  };
  const double prefactor = d->scale * std::pow(1.0 - a2, expo) * std::pow(R, 2 * n);

  if (options.method == MassMethod::MonteCarlo) {
    if (options.samples < 2)
      throw DomainError("Monte Carlo ball mass needs at least 2 samples");
    Engine rng = make_stream(options.seed, 0xd0);
    const auto count = options.samples;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const double v = integrand(sample_ball(n, rng, R));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / count;
    const double var = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0));
    out.value = prefactor * mean;
    out.std_error = prefactor * std::sqrt(var / count);
    return out;
  }

  const QuadratureRule rule = QuadratureRule::product(n, options.radial_order, options.sphere_count);
  const auto est = integrate_ball([&](const CPoint& v) { return integrand(R * v); }, rule);
  out.value = prefactor * est.value;
  return out;
}

std::vector<CPoint> sample(const BallMeasure& m, std::size_t count, std::uint64_t seed)
{
  if (count < 1)
    throw DomainError("sample count must be >= 1");
  if (m.is_zero())
    throw DomainError("cannot sample the zero measure");
  const int n = m.dimension();
  Engine rng = make_stream(seed, 0x5a);
  std::vector<CPoint> out;
  out.reserve(count);
  if (const auto* a = m.as_atomic()) {
    const double total = total_mass(m);
    for (std::size_t k = 0; k < count; ++k)
      out.push_back(a->atoms[pick_atom(a->atoms, total, rng)].point);
    return out;
  }
  const auto* d = m.as_radial();
  if (!(d->beta > -1.0))
    throw DomainError("radial density with beta <= -1 has infinite mass and cannot be sampled");
  // |z|^2 ~ Beta(n, beta + 1).
  std::gamma_distribution<double> g1(static_cast<double>(n), 1.0);
  std::gamma_distribution<double> g2(d->beta + 1.0, 1.0);
  while (out.size() < count) {
    const double x1 = g1(rng);
    const double x2 = g2(rng);
    const double x = x1 / (x1 + x2);
    const CPoint dir = sample_sphere(n, rng);
    if (!(x < 1.0))
      continue;
    out.push_back(std::sqrt(x) * dir);
  }
  return out;
}

std::vector<CPoint> sample(const BoundaryMeasure& m, std::size_t count, std::uint64_t seed)
{
  if (count < 1)
    throw DomainError("sample count must be >= 1");
  if (m.is_zero())
    throw DomainError("cannot sample the zero measure");
  const int n = m.dimension();
  Engine rng = make_stream(seed, 0x5b);
  std::vector<CPoint> out;
  out.reserve(count);
  if (const auto* a = m.as_atomic()) {
    const double total = total_mass(m);
    for (std::size_t k = 0; k < count; ++k)
      out.push_back(a->atoms[pick_atom(a->atoms, total, rng)].point);
    return out;
  }
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(sample_sphere(n, rng));
  return out;
}

} // namespace blab
