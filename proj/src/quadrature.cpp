#include "blab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace blab {

Rule1D gauss_jacobi_01(int order, double a, double b)
{
  if (order < 1)
    throw DomainError("Gauss-Jacobi order must be >= 1");
  if (!(a > -1.0 && b > -1.0))
    throw DomainError("Gauss-Jacobi exponents must exceed -1");

  // Three-term recurrence of monic Jacobi polynomials P^{(a,b)} on [-1, 1].
  const int m = order;
  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max(m - 1, 1));
  const double ab = a + b;
  for (int k = 0; k < m; ++k) {
    if (k == 0) {
      diag(k) = (b - a) / (ab + 2.0);
    } else {
      const double s = 2.0 * k + ab;
      diag(k) = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < m; ++k) {
    const double s = 2.0 * k + ab;
    const double beta =
        4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    sub(k - 1) = std::sqrt(beta);
  }

  Rule1D rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  // Total mass on [0, 1] is B(a+1, b+1).
  const double mass = std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  if (m == 1) {
    rule.nodes[0] = 0.5 * (1.0 + diag(0));
    rule.weights[0] = mass;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericalGuard("Golub-Welsch eigen-decomposition failed");
  for (int k = 0; k < m; ++k) {
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[k] = 0.5 * (1.0 + solver.eigenvalues()(k));
    rule.weights[k] = mass * v0 * v0;
  }
  return rule;
}

int angular_order_for_count(int n, int count)
{
  if (count < 1)
    throw DomainError("sphere point count must be >= 1");
  const double m = std::round(std::pow(static_cast<double>(count), 1.0 / (2.0 * n - 1.0)));
  return std::max(1, static_cast<int>(m));
}

SphereRule structured_sphere_rule(int n, int angular_order)
{
  if (n < 1 || n > kMaxDimension)
    throw DomainError("unsupported dimension " + std::to_string(n));
  if (angular_order < 1)
    throw DomainError("angular order must be >= 1");
  const int m = angular_order;

  // |zeta_j|^2 is uniform on the (n-1)-simplex; sample it by stick breaking,
  // the j-th break having density (n-1-j) (1-s)^{n-2-j}.
  std::vector<Rule1D> sticks;
  for (int j = 0; j + 1 < n; ++j) {
    Rule1D r = gauss_jacobi_01(m, static_cast<double>(n - 2 - j), 0.0);
    for (auto& w : r.weights)
      w *= static_cast<double>(n - 1 - j);
    sticks.push_back(std::move(r));
  }

  std::vector<double> phases(m);
  for (int k = 0; k < m; ++k)
    phases[k] = 2.0 * std::numbers::pi * (k + 0.5) / m;

  std::size_t simplex_count = 1;
  for (int j = 0; j + 1 < n; ++j)
    simplex_count *= static_cast<std::size_t>(m);
  std::size_t phase_count = 1;
  for (int j = 0; j < n; ++j)
    phase_count *= static_cast<std::size_t>(m);

  SphereRule out;
  out.points.reserve(simplex_count * phase_count);
  out.weights.reserve(simplex_count * phase_count);
  const double phase_weight = 1.0 / static_cast<double>(phase_count);
  std::vector<double> x(n);
  for (std::size_t si = 0; si < simplex_count; ++si) {
    double w = 1.0;
    double remaining = 1.0;
    std::size_t idx = si;
    for (int j = 0; j + 1 < n; ++j) {
      const std::size_t k = idx % m;
      idx /= m;
      const double s = sticks[j].nodes[k];
      w *= sticks[j].weights[k];
      x[j] = remaining * s;
      remaining *= (1.0 - s);
    }
    x[n - 1] = remaining;
    for (std::size_t pi = 0; pi < phase_count; ++pi) {
      CPoint zeta(n);
      std::size_t pidx = pi;
      for (int j = 0; j < n; ++j) {
        const double th = phases[pidx % m];
        pidx /= m;
        zeta(j) = std::polar(std::sqrt(x[j]), th);
      }
      out.points.push_back(zeta);
      out.weights.push_back(w * phase_weight);
    }
  }
  return out;
}

SphereRule random_sphere_rule(int n, int count, std::uint64_t seed)
{
  if (count < 1)
    throw DomainError("sphere point count must be >= 1");
  Engine rng = make_stream(seed, 0x5e);
  SphereRule out;
  out.points.reserve(count);
  for (int k = 0; k < count; ++k)
    out.points.push_back(sample_sphere(n, rng));
  out.weights.assign(count, 1.0 / count);
  return out;
}

QuadratureRule QuadratureRule::product(int n, int radial_order, int sphere_count,
                                       SphereKind sphere, std::uint64_t seed)
{
  if (n < 1 || n > kMaxDimension)
    throw DomainError("unsupported dimension " + std::to_string(n));
  QuadratureRule q;
  q.n_ = n;
  q.params_.kind = RuleKind::Product;
  q.params_.radial_order = radial_order;
  q.params_.sphere_count = sphere_count;
  q.params_.sphere = sphere;
  q.params_.seed = seed;

  // dv = n x^{n-1} dx dsigma with x = |z|^2 under the normalized measure.
  const Rule1D radial = gauss_jacobi_01(radial_order, 0.0, static_cast<double>(n - 1));
  for (std::size_t i = 0; i < radial.nodes.size(); ++i)
    q.radial_.emplace_back(std::sqrt(radial.nodes[i]), n * radial.weights[i]);

  SphereRule s;
  if (sphere == SphereKind::Structured) {
    q.angular_order_ = angular_order_for_count(n, sphere_count);
    s = structured_sphere_rule(n, q.angular_order_);
  } else {
    s = random_sphere_rule(n, sphere_count, seed);
  }
  q.sphere_points_ = std::move(s.points);
  q.sphere_weights_ = std::move(s.weights);

  const std::size_t total = q.radial_.size() * q.sphere_points_.size();
  q.points_.reserve(total);
  q.weights_.reserve(total);
  for (const auto& [r, wr] : q.radial_) {
    for (std::size_t k = 0; k < q.sphere_points_.size(); ++k) {
      q.points_.push_back(r * q.sphere_points_[k]);
      q.weights_.push_back(wr * q.sphere_weights_[k]);
    }
  }
  return q;
}

QuadratureRule QuadratureRule::monte_carlo(int n, std::size_t count, std::uint64_t seed)
{
  if (n < 1 || n > kMaxDimension)
    throw DomainError("unsupported dimension " + std::to_string(n));
  if (count < 2)
    throw DomainError("Monte Carlo rule needs at least 2 samples");
  QuadratureRule q;
  q.n_ = n;
  q.params_.kind = RuleKind::MonteCarlo;
  q.params_.mc_count = count;
  q.params_.seed = seed;
  Engine rng = make_stream(seed, 0xba11);
  q.points_.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    q.points_.push_back(sample_ball(n, rng));
  q.weights_.assign(count, 1.0 / static_cast<double>(count));
  return q;
}

QuadratureRule QuadratureRule::from_params(int n, const RuleParams& p)
{
  if (p.kind == RuleKind::MonteCarlo)
    return monte_carlo(n, p.mc_count, p.seed);
  return product(n, p.radial_order, p.sphere_count, p.sphere, p.seed);
}

std::string QuadratureRule::describe() const
{
  std::ostringstream os;
  if (is_monte_carlo()) {
    os << "monte_carlo(n=" << n_ << ", count=" << params_.mc_count << ", seed=" << params_.seed
       << ")";
  } else {
    os << "product(n=" << n_ << ", radial=" << params_.radial_order << ", sphere="
       << (params_.sphere == SphereKind::Structured ? "structured" : "random") << ":"
       << sphere_points_.size() << ")";
  }
  return os.str();
}

} // namespace blab
