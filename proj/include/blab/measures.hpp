#ifndef BLAB_MEASURES_HPP
#define BLAB_MEASURES_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "blab/quadrature.hpp"
#include "blab/types.hpp"

namespace blab {

struct Atom {
  CPoint point;
  double mass = 0.0;
};

struct AtomicBall {
  std::vector<Atom> atoms;
};

/// d(eta) = scale * (1-|z|^2)^beta dv. beta <= -1 gives a locally finite
/// measure of infinite total mass; ball masses stay finite, sampling is refused.
struct RadialDensity {
  double beta = 0.0;
  double scale = 1.0;
};

struct ZeroMeasure {};

/// Finite positive measure on the open ball (mu or eta).
class BallMeasure {
public:
  using Variant = std::variant<AtomicBall, RadialDensity, ZeroMeasure>;

  static BallMeasure atomic(int n, std::vector<Atom> atoms);
  static BallMeasure radial_density(int n, double beta, double scale = 1.0);
  static BallMeasure zero(int n);

  int dimension() const { return n_; }
  const Variant& variant() const { return v_; }
  bool is_zero() const { return std::holds_alternative<ZeroMeasure>(v_); }
  /// Invariant under unitary maps of C^n.
  bool is_radial() const;

  const AtomicBall* as_atomic() const { return std::get_if<AtomicBall>(&v_); }
  const RadialDensity* as_radial() const { return std::get_if<RadialDensity>(&v_); }

private:
  BallMeasure(int n, Variant v) : n_(n), v_(std::move(v)) {}
  int n_ = 0;
  Variant v_;
};

struct UniformBoundary {
  double mass = 1.0;
};

/// Finite positive measure on the unit sphere (nu).
class BoundaryMeasure {
public:
  using Variant = std::variant<AtomicBall, UniformBoundary, ZeroMeasure>;

  /// Atoms closer than 1e-6 to the sphere are projected onto it; others are rejected.
  static BoundaryMeasure atomic(int n, std::vector<Atom> atoms);
  static BoundaryMeasure uniform(int n, double mass = 1.0);
  static BoundaryMeasure zero(int n);

  int dimension() const { return n_; }
  const Variant& variant() const { return v_; }
  bool is_zero() const { return std::holds_alternative<ZeroMeasure>(v_); }
  bool is_radial() const { return !std::holds_alternative<AtomicBall>(v_); }

  const AtomicBall* as_atomic() const { return std::get_if<AtomicBall>(&v_); }
  const UniformBoundary* as_uniform() const { return std::get_if<UniformBoundary>(&v_); }

private:
  BoundaryMeasure(int n, Variant v) : n_(n), v_(std::move(v)) {}
  int n_ = 0;
  Variant v_;
};

double total_mass(const BallMeasure& m);
double total_mass(const BoundaryMeasure& m);

enum class MassMethod { Product, MonteCarlo };

struct BallMassOptions {
  MassMethod method = MassMethod::Product;
  int radial_order = 32;
  int sphere_count = 4096;
  std::size_t samples = 20000;
  std::uint64_t seed = 0;
};

/// eta(D(center, r)). Exact for atomic measures; for radial densities the
/// ball is pulled back to B(0, tanh r) through phi_center and integrated by
/// product quadrature (std_error 0) or Monte Carlo.
Estimate<double> ball_mass(const BallMeasure& m, const CPoint& center, double r,
                           const BallMassOptions& options = {});

/// i.i.d. draws from the normalized measure; deterministic in (count, seed).
std::vector<CPoint> sample(const BallMeasure& m, std::size_t count, std::uint64_t seed);
std::vector<CPoint> sample(const BoundaryMeasure& m, std::size_t count, std::uint64_t seed);

/// Normalized-volume mass of (1-|z|^2)^beta: n! Gamma(beta+1) / Gamma(n+beta+1).
double radial_moment(int n, double beta);

} // namespace blab

#endif
