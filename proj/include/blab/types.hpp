#ifndef BLAB_TYPES_HPP
#define BLAB_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#ifndef BLAB_MAX_DIMENSION
#define BLAB_MAX_DIMENSION 3
#endif

namespace blab {

inline constexpr int kMaxDimension = BLAB_MAX_DIMENSION;

template <typename Scalar>
using Complex = std::complex<Scalar>;

/// A point of C^n. Storage is inline (no heap) up to kMaxDimension.
template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1, Eigen::ColMajor,
                              kMaxDimension, 1>;

template <typename Scalar>
using CSquare = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::ColMajor, kMaxDimension, kMaxDimension>;

using cplx = Complex<double>;
using CPoint = CVector<double>;
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CColumn = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by an argument (dimension mismatch, non-interior point, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Evaluation hit a singularity (Green pole at an atom, g at the origin).
class PoleError : public Error {
public:
  using Error::Error;
};

/// A numerical safeguard refused to continue (gram conditioning, non-finite integrand).
class NumericalGuard : public Error {
public:
  using Error::Error;
};

/// A checked inequality from the estimates failed on computed data.
class InvariantViolation : public Error {
public:
  using Error::Error;
};

/// Ill-formed or invalid experiment configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Builds a point from a braced list, e.g. make_point({0.5, {0.0, 0.3}}).
inline CPoint make_point(std::initializer_list<cplx> coords)
{
  if (coords.size() == 0 || coords.size() > static_cast<std::size_t>(kMaxDimension))
    throw DomainError("point dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
  CPoint z(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (const auto& c : coords)
    z(i++) = c;
  return z;
}

inline CPoint zero_point(int n)
{
  return CPoint::Zero(n);
}

} // namespace blab

#endif
