#ifndef BLAB_RANDOM_HPP
#define BLAB_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "blab/types.hpp"

namespace blab {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for task `index` of a computation seeded with `seed`.
/// Streams depend only on (seed, index), never on scheduling.
inline Engine make_stream(std::uint64_t seed, std::uint64_t index = 0)
{
  return Engine(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

inline double uniform01(Engine& rng)
{
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform point on the unit sphere of C^n: normalized standard complex Gaussian.
inline CPoint sample_sphere(int n, Engine& rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  CPoint z(n);
  double r2 = 0.0;
  do {
    for (int j = 0; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(j) = cplx(re, im);
    }
    r2 = z.squaredNorm();
  } while (r2 == 0.0);
  return z / std::sqrt(r2);
}

/// Uniform point in the ball of radius `radius`: sphere direction times radius * U^{1/(2n)}.
inline CPoint sample_ball(int n, Engine& rng, double radius = 1.0)
{
  for (;;) {
    const CPoint dir = sample_sphere(n, rng);
    const double u = uniform01(rng);
    const double rho = radius * std::pow(u, 1.0 / (2.0 * n));
    // Rounding can push rho onto the sphere; points must stay strictly inside.
    if (u > 0.0 && rho < radius)
      return rho * dir;
  }
}

} // namespace blab

#endif
