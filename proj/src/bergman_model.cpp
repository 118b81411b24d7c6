#include "blab/bergman_model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "blab/geometry.hpp"
#include "blab/parallel.hpp"
#include "blab/random.hpp"

namespace blab {

namespace {

void add_indices(int n, int degree, int pos, MultiIndex& cur, std::vector<MultiIndex>& out)
{
  if (pos == n - 1) {
    cur.exponents[pos] = degree;
    out.push_back(cur);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur.exponents[pos] = e;
    add_indices(n, degree - e, pos + 1, cur, out);
  }
}

// Powers z_j^k for k <= N, then products over the basis.
void fill_monomials(const CPoint& z, const std::vector<MultiIndex>& basis, int degree_cap,
                    cplx scale, cplx* out, Eigen::Index stride)
{
  const int n = static_cast<int>(z.size());
  std::array<std::vector<cplx>, kMaxDimension> pw;
  for (int j = 0; j < n; ++j) {
    pw[j].resize(degree_cap + 1);
    pw[j][0] = 1.0;
    for (int k = 1; k <= degree_cap; ++k)
      pw[j][k] = pw[j][k - 1] * z(j);
  }
  for (std::size_t b = 0; b < basis.size(); ++b) {
    cplx v = scale;
    for (int j = 0; j < n; ++j)
      v *= pw[j][basis[b].exponents[j]];
    out[static_cast<Eigen::Index>(b) * stride] = v;
  }
}

template <typename M>
M pairwise_reduce(std::vector<M>& parts, std::size_t lo, std::size_t hi)
{
  if (hi - lo == 1)
    return std::move(parts[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  M left = pairwise_reduce(parts, lo, mid);
  left += pairwise_reduce(parts, mid, hi);
  return left;
}

} // namespace

std::vector<MultiIndex> graded_lex_basis(int n, int degree_cap)
{
  if (n < 1 || n > kMaxDimension)
    throw DomainError("unsupported dimension " + std::to_string(n));
  if (degree_cap < 0)
    throw DomainError("degree cap must be >= 0");
  std::vector<MultiIndex> out;
  for (int d = 0; d <= degree_cap; ++d) {
    MultiIndex cur;
    cur.degree = d;
    add_indices(n, d, 0, cur, out);
  }
  return out;
}

BergmanModel BergmanModel::build(const WeightSpec& spec, int degree_cap, const QuadratureRule& rule)
{
  if (degree_cap < 1)
    throw DomainError("model degree cap must be >= 1");
  if (rule.dimension() != spec.dimension())
    throw DomainError("quadrature rule and weight have different dimensions");
  BergmanModel m(spec);
  m.degree_cap_ = degree_cap;
  m.basis_ = graded_lex_basis(spec.dimension(), degree_cap);
  m.rule_ = rule.params();

  const auto B = static_cast<Eigen::Index>(m.basis_.size());
  const std::size_t count = rule.size();
  constexpr std::size_t chunk = 2048;
  const std::size_t chunks = (count + chunk - 1) / chunk;
  const bool radial = spec.is_radial();

  // With W_k = sqrt(w_k omega(z_k)) (z_k^alpha), W^H W is the conjugate of the Gram matrix.
  std::vector<CMatrix> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    CMatrix W(static_cast<Eigen::Index>(end - begin), B);
    for (std::size_t k = begin; k < end; ++k) {
      const CPoint& z = rule.point(k);
      const double om = weight_eval(spec, z);
      if (!(om > 0.0) || !std::isfinite(om))
        throw NumericalGuard("weight is not positive and finite at quadrature node " +
                             std::to_string(k));
      const auto row = static_cast<Eigen::Index>(k - begin);
      fill_monomials(z, m.basis_, degree_cap, cplx(std::sqrt(rule.weight(k) * om)), &W(row, 0),
                     W.outerStride());
    }
    if (radial) {
      partial[c] = W.cwiseAbs2().colwise().sum().transpose().cast<cplx>();
    } else {
      CMatrix H = CMatrix::Zero(B, B);
      H.selfadjointView<Eigen::Lower>().rankUpdate(W.adjoint());
      partial[c] = std::move(H);
    }
  });
  CMatrix H = chunks ? pairwise_reduce(partial, 0, chunks) : CMatrix::Zero(B, radial ? 1 : B);

  if (radial) {
    // Distinct monomials are orthogonal for radial weights.
    m.gram_ = H.col(0).asDiagonal();
  } else {
    m.gram_ = CMatrix(B, B);
    for (Eigen::Index i = 0; i < B; ++i) {
      m.gram_(i, i) = cplx(H(i, i).real(), 0.0);
      for (Eigen::Index j = 0; j < i; ++j) {
        m.gram_(i, j) = std::conj(H(i, j));
        m.gram_(j, i) = H(i, j);
      }
    }
  }
  m.factorize();
  return m;
}

BergmanModel BergmanModel::from_gram(const WeightSpec& spec, int degree_cap, const RuleParams& rule,
                                     const CMatrix& gram)
{
  BergmanModel m(spec);
  m.degree_cap_ = degree_cap;
  m.basis_ = graded_lex_basis(spec.dimension(), degree_cap);
  m.rule_ = rule;
  const auto B = static_cast<Eigen::Index>(m.basis_.size());
  if (gram.rows() != B || gram.cols() != B)
    throw DomainError("stored Gram matrix has the wrong size for the basis");
  m.gram_ = gram;
  m.factorize();
  return m;
}

void BergmanModel::factorize()
{
  const double asym = (gram_ - gram_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-14 * gram_.cwiseAbs().maxCoeff())
    throw NumericalGuard("Gram matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram_, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw NumericalGuard("Gram eigenvalue computation failed");
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  min_eig_ = lo;
  condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 1e-12 * hi) || !(condition_ <= 1e12)) {
    std::ostringstream os;
    os.precision(3);
    os << "Gram matrix numerically singular (condition estimate " << condition_
       << ", smallest eigenvalue " << lo << "); raise the quadrature resolution or lower the degree cap";
    throw NumericalGuard(os.str());
  }
  Eigen::LLT<CMatrix> llt(gram_);
  if (llt.info() != Eigen::Success)
    throw NumericalGuard("Cholesky factorization of the Gram matrix failed");
  factor_ = llt.matrixL();
}

CColumn BergmanModel::monomials(const CPoint& z) const
{
  if (z.size() != dimension())
    throw DomainError("point dimension does not match the model");
  CColumn v(static_cast<Eigen::Index>(basis_.size()));
  fill_monomials(z, basis_, degree_cap_, cplx(1.0), v.data(), 1);
  return v;
}

CColumn BergmanModel::orthonormal(const CPoint& z) const
{
  return factor_.triangularView<Eigen::Lower>().solve(monomials(z));
}

cplx BergmanModel::kernel(const CPoint& z, const CPoint& w) const
{
  require_interior(z);
  require_interior(w);
  return orthonormal(w).dot(orthonormal(z));
}

double BergmanModel::kernel_diag(const CPoint& z) const
{
  require_interior(z);
  return orthonormal(z).squaredNorm();
}

TestFunction::TestFunction(const TestFunctionParams& params, const WeightSpec& spec)
    : params_(params)
{
  if (!(params.p > 0.0))
    throw DomainError("test function exponent p must be positive");
  if (params.w.size() != spec.dimension())
    throw DomainError("test function center dimension does not match the weight");
  require_interior(params.w, "test function center");
  const int n = spec.dimension();
  omega_w_ = weight_eval(spec, params.w);
  if (!(omega_w_ > 0.0))
    throw NumericalGuard("weight vanishes at the test function center");
  const double rho = 1.0 - params.w.squaredNorm();
  scale_ = std::pow(std::pow(rho, params.t + n - 1.0) / omega_w_, 1.0 / params.p);
  exponent_ = -(2.0 * n + params.t) / params.p;
}

cplx TestFunction::operator()(const CPoint& z) const
{
  // Re(1 - <z,w>) > 0 on the ball, so the principal branch is continuous.
  return scale_ * std::pow(1.0 - hermitian_inner(z, params_.w), exponent_);
}

cplx test_function_eval(const TestFunctionParams& params, const WeightSpec& spec, const CPoint& z)
{
  require_interior(z);
  return TestFunction(params, spec)(z);
}

TestFunctionHypotheses check_test_function_hypotheses(const WeightSpec& spec, double t)
{
  const int n = spec.dimension();
  const double q = spec.q_exponent();
  TestFunctionHypotheses h;
  std::ostringstream os;
  os.precision(6);
  const bool upper = t + q > n + 1.0;
  const bool lower = n + 1.0 > 2.0 + q;
  h.norm_bound = upper && lower;
  if (!upper) {
    os << "test-function norm bound needs t + q > n + 1 (t=" << t << ", q=" << q << ", n=" << n << ")";
    h.diagnostics.push_back(os.str());
    os.str("");
  }
  if (!lower) {
    os << "test-function norm bound needs n + 1 > 2 + q (q=" << q << ", n=" << n << ")";
    h.diagnostics.push_back(os.str());
    os.str("");
  }
  h.vanishing = t + n - 1.0 > spec.q_plus_ns();
  return h;
}

double estimate_a_r(const BergmanModel& model, double r, std::size_t pair_count, std::uint64_t seed)
{
  if (!(r > 0.0 && r < 1.0))
    throw DomainError("a_r estimation needs 0 < r < 1");
  if (pair_count < 1)
    throw DomainError("a_r estimation needs at least one pair");
  const int n = model.dimension();
  const double R = std::tanh(r);
  const double R_max = std::tanh(1.0);
  constexpr std::size_t block = 64;
  const std::size_t blocks = (pair_count + block - 1) / block;
  std::vector<double> worst(blocks, 1.0);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(pair_count, (b + 1) * block);
    for (std::size_t k = b * block; k < end; ++k) {
      Engine rng = make_stream(seed, k);
      const CPoint a = sample_ball(n, rng, 0.4);
      const CPoint u = sample_ball(n, rng, R_max);
      if (!(u.norm() < R))
        continue;
      const CPoint z = involution(a, u);
      if (z.squaredNorm() > kReliableProduct)
        continue;
      const double ratio = std::sqrt(model.kernel_diag(z) / model.kernel_diag(a));
      worst[b] = std::max({worst[b], ratio, 1.0 / ratio});
    }
  });
  double a_r = 1.0;
  for (double v : worst)
    a_r = std::max(a_r, v);
  return a_r;
}

} // namespace blab
