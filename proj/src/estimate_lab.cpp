#include "blab/estimate_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blab/geometry.hpp"
#include "blab/parallel.hpp"
#include "blab/random.hpp"

namespace blab {

namespace {

void require_dims(int a, int b, const char* what)
{
  if (a != b)
    throw DomainError(std::string(what) + ": dimension mismatch");
}

CPoint unit_direction(int n, int j = 0)
{
  CPoint e = CPoint::Zero(n);
  e(j) = 1.0;
  return e;
}

CPoint normalized(const CPoint& d)
{
  const double r = d.norm();
  if (!(r > 0.0))
    throw DomainError("direction must be nonzero");
  return d / r;
}

// Uniform point of the Euclidean ball of radius `radius` around z.
CPoint perturb(const CPoint& z, double radius, Engine& rng)
{
  return z + sample_ball(static_cast<int>(z.size()), rng, 1.0) * radius;
}

struct LevelStats {
  std::vector<double> levels;
  std::vector<double> sup;
  std::vector<double> inf;
};

LevelStats level_stats(const RatioSeries& s, double power)
{
  LevelStats out;
  for (const auto& pt : s.points) {
    const double v = std::pow(pt.ratio, power);
    // Grid points of one level differ in norm by rounding only.
    auto it = std::find_if(out.levels.begin(), out.levels.end(),
                           [&](double l) { return std::abs(l - pt.parameter) <= 1e-9; });
    if (it == out.levels.end()) {
      out.levels.push_back(pt.parameter);
      out.sup.push_back(v);
      out.inf.push_back(v);
    } else {
      const auto i = static_cast<std::size_t>(it - out.levels.begin());
      out.sup[i] = std::max(out.sup[i], v);
      out.inf[i] = std::min(out.inf[i], v);
    }
  }
  return out;
}

} // namespace

void validate_grid(const GridSpec& grid)
{
  if (grid.radial_levels.empty())
    throw DomainError("grid needs at least one radial level");
  if (grid.directions_per_level < 1)
    throw DomainError("grid needs at least one direction per level");
  for (std::size_t i = 0; i < grid.radial_levels.size(); ++i) {
    const double l = grid.radial_levels[i];
    if (!(l >= 0.0 && l < 1.0))
      throw DomainError("grid levels must lie in [0, 1)");
    if (i > 0 && !(l > grid.radial_levels[i - 1]))
      throw DomainError("grid levels must be strictly increasing");
  }
}

std::vector<CPoint> grid_points(const GridSpec& grid, int n)
{
  validate_grid(grid);
  std::vector<CPoint> dirs;
  dirs.push_back(unit_direction(n));
  Engine rng = make_stream(grid.seed, 0x6d);
  while (static_cast<int>(dirs.size()) < grid.directions_per_level)
    dirs.push_back(sample_sphere(n, rng));
  std::vector<CPoint> out;
  for (double level : grid.radial_levels)
    for (const auto& d : dirs)
      out.push_back(level * d);
  return out;
}

std::string to_string(Verdict v)
{
  switch (v) {
  case Verdict::Bounded:
    return "bounded";
  case Verdict::Diverging:
    return "diverging";
  default:
    return "inconclusive";
  }
}

void RatioSeries::finalize()
{
  if (points.empty()) {
    sup = inf = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  sup = -std::numeric_limits<double>::infinity();
  inf = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    sup = std::max(sup, p.ratio);
    inf = std::min(inf, p.ratio);
  }
}

Verdict classify_levels(const std::vector<double>& level_sup, const std::vector<double>& level_inf,
                        bool two_sided)
{
  const std::size_t L = level_sup.size();
  if (L < 3)
    return Verdict::Inconclusive;
  const double s0 = level_sup[L - 3], s1 = level_sup[L - 2], s2 = level_sup[L - 1];
  if (s0 > 0.0 && s1 >= 2.0 * s0 && s2 >= 2.0 * s1)
    return Verdict::Diverging;
  if (two_sided) {
    const double i0 = level_inf[L - 3], i1 = level_inf[L - 2], i2 = level_inf[L - 1];
    if (i1 <= 0.5 * i0 && i2 <= 0.5 * i1)
      return Verdict::Diverging;
  }
  if (L < 4)
    return Verdict::Inconclusive;
  const double inner_sup = *std::max_element(level_sup.begin(), level_sup.end() - 3);
  const double outer_sup = *std::max_element(level_sup.end() - 3, level_sup.end());
  bool bounded = std::isfinite(outer_sup) && outer_sup <= 1.2 * inner_sup;
  if (two_sided) {
    const double inner_inf = *std::min_element(level_inf.begin(), level_inf.end() - 3);
    const double outer_inf = *std::min_element(level_inf.end() - 3, level_inf.end());
    bounded = bounded && outer_inf > 0.0 && outer_inf * 1.2 >= inner_inf;
  }
  return bounded ? Verdict::Bounded : Verdict::Inconclusive;
}

Verdict classify_series(const RatioSeries& s, bool two_sided, double power)
{
  const LevelStats st = level_stats(s, power);
  return classify_levels(st.sup, st.inf, two_sided);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double boundary_slope(const RatioSeries& s, std::size_t tail, double power)
{
  const LevelStats st = level_stats(s, power);
  if (st.levels.size() < 2)
    return std::numeric_limits<double>::quiet_NaN();
  const std::size_t k = std::min(tail, st.levels.size());
  std::vector<double> x, y;
  for (std::size_t i = st.levels.size() - k; i < st.levels.size(); ++i) {
    x.push_back(1.0 - st.levels[i] * st.levels[i]);
    y.push_back(st.sup[i]);
  }
  return loglog_slope(x, y);
}

RatioSeries carleson_ratio_sweep(const BallMeasure& eta, const WeightSpec& spec, double p,
                                 double p_tilde, double r, const GridSpec& grid,
                                 const BallMassOptions& mass)
{
  if (!(p > 0.0 && p_tilde > 0.0))
    throw DomainError("p and p_tilde must be positive");
  if (!(r > 0.0 && r < 1.0))
    throw DomainError("Carleson radius must lie in (0, 1)");
  const int n = spec.dimension();
  require_dims(eta.dimension(), n, "carleson sweep");
  RatioSeries s;
  s.name = "carleson";
  const double e = p_tilde / p;
  double skipped = 0.0;
  for (const auto& w : grid_points(grid, n)) {
    double om = 0.0;
    try {
      om = weight_eval(spec, w);
    } catch (const PoleError&) {
      skipped += 1.0;
      continue;
    }
    const Estimate<double> m = ball_mass(eta, w, r, mass);
    const double denom = std::pow(om, e) * std::pow(1.0 - w.squaredNorm(), (n + 1) * e);
    s.points.push_back({w.norm(), m.value, m.value / denom, m.std_error / denom});
  }
  s.finalize();
  s.verdict = classify_series(s, false);
  s.notes["skipped"] = skipped;
  s.notes["slope"] = boundary_slope(s);
  return s;
}

RatioSeries embedding_ratio_sweep(const BallMeasure& eta, const WeightSpec& spec, double p,
                                  double p_tilde, const std::vector<TestFunctionParams>& family,
                                  const QuadratureRule& rule)
{
  if (!(p > 0.0 && p_tilde > 0.0))
    throw DomainError("p and p_tilde must be positive");
  if (family.empty())
    throw DomainError("embedding sweep needs a nonempty test-function family");
  const int n = spec.dimension();
  require_dims(eta.dimension(), n, "embedding sweep");
  require_dims(rule.dimension(), n, "embedding sweep");
  RatioSeries s;
  s.name = "embedding";
  for (const auto& params : family) {
    const TestFunction f(params, spec);
    Estimate<double> eta_int;
    if (const auto* a = eta.as_atomic()) {
      for (const auto& atom : a->atoms)
        eta_int.value += atom.mass * std::pow(std::abs(f(atom.point)), p_tilde);
    } else if (const auto* d = eta.as_radial()) {
      eta_int = integrate_ball_recentered(
          [&](const CPoint& z) {
            return std::pow(std::abs(f(z)), p_tilde) * std::pow(1.0 - z.squaredNorm(), d->beta);
          },
          rule, params.w);
      eta_int.value *= d->scale;
      eta_int.std_error *= d->scale;
    }
    const Estimate<double> norm = p_norm(f, spec, p, rule, &params.w);
    if (!(norm.value > 0.0))
      throw NumericalGuard("test function has zero norm");
    const double num = std::pow(eta_int.value, 1.0 / p_tilde);
    const double num_se = eta_int.value > 0.0 ? eta_int.std_error * num / (p_tilde * eta_int.value) : 0.0;
    const double ratio = num / norm.value;
    const double se = ratio * std::hypot(num > 0.0 ? num_se / num : 0.0, norm.std_error / norm.value);
    s.points.push_back({params.w.norm(), num, ratio, se});
  }
  s.finalize();
  s.verdict = classify_series(s, false, p_tilde);
  s.notes["slope"] = boundary_slope(s, 3, p_tilde);
  return s;
}

RatioSeries norm_estimate_sweep(const BergmanModel& model, const GridSpec& grid)
{
  const int n = model.dimension();
  const auto pts = grid_points(grid, n);
  std::vector<RatioPoint> out(pts.size());
  std::vector<char> ok(pts.size(), 1);
  parallel_for(pts.size(), [&](std::size_t i) {
    const CPoint& z = pts[i];
    double om = 0.0;
    try {
      om = weight_eval(model.spec(), z);
    } catch (const PoleError&) {
      ok[i] = 0;
      return;
    }
    const double k = model.kernel_diag(z);
    out[i] = {z.norm(), k, k * std::pow(1.0 - z.squaredNorm(), n + 1) * om, 0.0};
  });
  RatioSeries s;
  s.name = "norm_estimate";
  double skipped = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (ok[i])
      s.points.push_back(out[i]);
    else
      skipped += 1.0;
  }
  s.finalize();
  s.verdict = classify_series(s, true);
  s.notes["band"] = s.sup / s.inf;
  s.notes["skipped"] = skipped;
  return s;
}

RatioSeries local_kernel_equivalence_sweep(const BergmanModel& model, double r,
                                           const GridSpec& grid, double a_r, int pairs_per_point,
                                           int divisor)
{
  if (pairs_per_point < 1)
    throw DomainError("need at least one pair per grid point");
  const int n = model.dimension();
  const auto k = inclusion_constants(r, n, a_r, divisor);
  const auto pts = grid_points(grid, n);
  const auto per = static_cast<std::size_t>(pairs_per_point);
  std::vector<RatioPoint> out(pts.size() * per);
  parallel_for(pts.size(), [&](std::size_t i) {
    const CPoint& z = pts[i];
    Engine rng = make_stream(grid.seed ^ 0x10ca1ULL, i);
    const double rho = 1.0 - z.squaredNorm();
    const double kz = model.kernel_diag(z);
    for (std::size_t j = 0; j < per; ++j) {
      const CPoint w = perturb(z, k.alpha * rho, rng);
      const double kw = model.kernel_diag(w);
      const double kzw = std::abs(model.kernel(z, w));
      out[i * per + j] = {z.norm(), (z - w).norm() / rho, kzw / std::sqrt(kz * kw), 0.0};
    }
  });
  RatioSeries s;
  s.name = "local_kernel_equivalence";
  s.points = std::move(out);
  s.finalize();
  s.verdict = classify_series(s, true);
  s.notes["alpha"] = k.alpha;
  s.notes["C"] = k.big_c;
  s.notes["r1"] = k.r1;
  s.notes["a_r"] = a_r;
  s.notes["proof_lower"] = 1.0 / (2.0 * a_r);
  return s;
}

RatioSeries pointwise_decay_sweep(const BergmanModel& model, double t_decay, std::size_t pair_count,
                                  std::uint64_t seed)
{
  if (!(t_decay > 0.0 && t_decay < 1.0))
    throw DomainError("decay exponent t must lie in (0, 1)");
  if (pair_count < 1)
    throw DomainError("decay sweep needs at least one pair");
  const int n = model.dimension();
  constexpr double zone = 0.6;
  std::vector<RatioPoint> out(pair_count);
  parallel_for(pair_count, [&](std::size_t k) {
    Engine rng = make_stream(seed, k);
    CPoint z, w;
    if (k % 2 == 0) {
      z = sample_ball(n, rng, zone);
      do {
        w = perturb(z, 0.1 * (1.0 - z.squaredNorm()), rng);
      } while (!(w.norm() <= zone));
    } else {
      do {
        z = sample_ball(n, rng, zone);
      } while (z.norm() < 0.2);
      const double shrink = 0.5 + 0.5 * uniform01(rng);
      do {
        w = perturb(-shrink * z, 0.05, rng);
      } while (!(w.norm() <= zone));
    }
    const double kz = model.kernel_diag(z);
    const double kw = model.kernel_diag(w);
    const double kzw = std::norm(model.kernel(z, w));
    const double x = one_minus_gamma_sq(z, w);
    const double value = kzw / (kz * kw);
    out[k] = {x, value, value / std::pow(x, t_decay), 0.0};
  });
  RatioSeries s;
  s.name = "pointwise_decay";
  s.points = std::move(out);
  s.finalize();
  const double c_t = 1.0 / (t_decay * (1.0 - t_decay) * (1.0 - t_decay));
  s.notes["t_decay"] = t_decay;
  s.notes["proof_constant"] = c_t;
  s.verdict = std::isfinite(s.sup) && s.sup <= c_t ? Verdict::Bounded : Verdict::Inconclusive;
  return s;
}

RatioSeries difference_bound_sweep(const BergmanModel& model, double r, std::size_t trial_count,
                                   std::uint64_t seed, double a_r)
{
  if (trial_count < 1)
    throw DomainError("difference sweep needs at least one trial");
  const int n = model.dimension();
  const auto k = inclusion_constants(r, n, a_r, 4);
  const double bound = 4.0 * a_r * std::sqrt(static_cast<double>(n)) / k.big_c;
  const auto B = static_cast<Eigen::Index>(model.size());
  std::vector<RatioPoint> out(trial_count);
  parallel_for(trial_count, [&](std::size_t t) {
    Engine rng = make_stream(seed, t);
    std::normal_distribution<double> normal;
    CColumn a(B);
    for (Eigen::Index i = 0; i < B; ++i)
      a(i) = cplx(normal(rng), normal(rng));
    a /= a.norm();
    const CPoint z = sample_ball(n, rng, 0.6);
    const double rho = 1.0 - z.squaredNorm();
    const CPoint w = perturb(z, k.big_c * rho, rng);
    const CColumn yz = model.orthonormal(z);
    const CColumn yw = model.orthonormal(w);
    const cplx fz = (a.array() * yz.array()).sum();
    const cplx fw = (a.array() * yw.array()).sum();
    const double sep = (z - w).norm() / rho;
    const double diff = std::abs(fz - fw);
    const double ratio = sep > 0.0 ? diff / (sep * yz.norm()) : 0.0;
    out[t] = {sep, diff, ratio, 0.0};
  });
  RatioSeries s;
  s.name = "difference_bound";
  s.points = std::move(out);
  s.finalize();
  double violations = 0.0;
  for (const auto& p : s.points)
    if (p.ratio > bound)
      violations += 1.0;
  s.notes["bound"] = bound;
  s.notes["a_r"] = a_r;
  s.notes["C"] = k.big_c;
  s.notes["violations"] = violations;
  s.verdict = violations == 0.0 ? Verdict::Bounded : Verdict::Inconclusive;
  return s;
}

HessianCheck hessian_inverse_check(const CPoint& z, const CPoint& w, double t_decay, double fd_step)
{
  if (!(t_decay > 0.0 && t_decay < 1.0))
    throw DomainError("decay exponent t must lie in (0, 1)");
  require_same_dim(z, w);
  require_interior(z);
  require_interior(w);
  const int n = static_cast<int>(z.size());
  const double z2 = z.squaredNorm();
  const double rho = 1.0 - z2;
  const CMatrix I = CMatrix::Identity(n, n);
  // B_jk = conj(z_j) z_k.
  const CMatrix B = z.conjugate() * z.transpose();

  HessianCheck h;
  h.z = z;
  h.t_decay = t_decay;
  h.m_matrix = (t_decay / (rho * rho)) * (rho * I + B);
  h.m_inverse = (rho / t_decay) * (I - B);
  h.identity_residual = (h.m_matrix * h.m_inverse - I).cwiseAbs().maxCoeff();

  const CMatrix A = rho * I;
  const CMatrix A_inv = I / rho;
  h.g = z2 / rho;
  const CMatrix sm = A_inv - (1.0 / (1.0 + h.g)) * A_inv * B * A_inv;
  h.inverse_sum_residual = ((A + B) * sm - I).cwiseAbs().maxCoeff();
  h.c_t = 1.0 / (t_decay * (1.0 - t_decay) * (1.0 - t_decay));

  // d_j dbar_k = (1/4)(d_xj - i d_yj)(d_xk + i d_yk) on real coordinates x_j, y_j.
  auto phi = [&](const Eigen::VectorXd& x) {
    CPoint p(n);
    for (int j = 0; j < n; ++j)
      p(j) = cplx(x(2 * j), x(2 * j + 1));
    return t_decay * std::log(std::norm(1.0 - hermitian_inner(p, w)) / (1.0 - p.squaredNorm()));
  };
  Eigen::VectorXd x0(2 * n);
  for (int j = 0; j < n; ++j) {
    x0(2 * j) = z(j).real();
    x0(2 * j + 1) = z(j).imag();
  }
  const double hstep = fd_step;
  Eigen::MatrixXd D(2 * n, 2 * n);
  const double f0 = phi(x0);
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = a; b < 2 * n; ++b) {
      double v;
      if (a == b) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp(a) += hstep;
        xm(a) -= hstep;
        v = (phi(xp) - 2.0 * f0 + phi(xm)) / (hstep * hstep);
      } else {
        Eigen::VectorXd pp = x0, pm = x0, mp = x0, mm = x0;
        pp(a) += hstep;
        pp(b) += hstep;
        pm(a) += hstep;
        pm(b) -= hstep;
        mp(a) -= hstep;
        mp(b) += hstep;
        mm(a) -= hstep;
        mm(b) -= hstep;
        v = (phi(pp) - phi(pm) - phi(mp) + phi(mm)) / (4.0 * hstep * hstep);
      }
      D(a, b) = D(b, a) = v;
    }
  }
  double err = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double xx = D(2 * j, 2 * k), yy = D(2 * j + 1, 2 * k + 1);
      const double xy = D(2 * j, 2 * k + 1), yx = D(2 * j + 1, 2 * k);
      const cplx fd = 0.25 * cplx(xx + yy, xy - yx);
      err = std::max(err, std::abs(fd - h.m_matrix(j, k)));
    }
  }
  h.finite_difference_error = err;
  return h;
}

RatioSeries forelli_rudin_slope(double q_exp, double t_exp, int n,
                                const std::vector<double>& w_levels, const QuadratureRule& rule)
{
  if (n < 1 || n > kMaxDimension)
    throw DomainError("unsupported dimension " + std::to_string(n));
  require_dims(rule.dimension(), n, "Forelli-Rudin slope");
  if (!(q_exp > -1.0))
    throw DomainError("Forelli-Rudin integral needs q > -1");
  if (!(2.0 * n + t_exp > n + 1.0 + q_exp))
    throw DomainError("Forelli-Rudin exponents outside the divergent range: need 2n + t > n + 1 + q");
  if (w_levels.size() < 2)
    throw DomainError("slope fit needs at least two levels");
  const double predicted = q_exp - (n - 1.0) - t_exp;
  RatioSeries s;
  s.name = "forelli_rudin";
  for (double level : w_levels) {
    if (!(level > 0.0 && level < 1.0))
      throw DomainError("Forelli-Rudin levels must lie in (0, 1)");
    const CPoint w = level * unit_direction(n);
    const double rho_w = 1.0 - level * level;
    // After z = phi_w(u) the integral is rho_w^{predicted} times a bounded remainder.
    const auto rem = integrate_ball(
        [&](const CPoint& u) {
          return std::pow(1.0 - u.squaredNorm(), q_exp) *
                 std::pow(std::abs(1.0 - hermitian_inner(u, w)), t_exp - 2.0 - 2.0 * q_exp);
        },
        rule);
    const double I = std::pow(rho_w, predicted) * rem.value;
    s.points.push_back({level, I, rem.value, std::pow(rho_w, predicted) * rem.std_error});
  }
  s.finalize();
  std::vector<double> x, y;
  const std::size_t k = std::min<std::size_t>(3, s.points.size());
  for (std::size_t i = s.points.size() - k; i < s.points.size(); ++i) {
    x.push_back(1.0 - s.points[i].parameter * s.points[i].parameter);
    y.push_back(s.points[i].value);
  }
  s.notes["slope"] = loglog_slope(x, y);
  s.notes["predicted_slope"] = predicted;
  s.verdict = classify_series(s, true);
  return s;
}

TestFunctionSweep test_function_sweep(const WeightSpec& spec, double t, double p,
                                      const std::vector<double>& w_levels, const CPoint& direction,
                                      const QuadratureRule& rule, const GridSpec& compact_grid)
{
  const int n = spec.dimension();
  require_dims(static_cast<int>(direction.size()), n, "test-function sweep");
  require_dims(rule.dimension(), n, "test-function sweep");
  if (w_levels.empty())
    throw DomainError("test-function sweep needs at least one level");
  const CPoint dir = normalized(direction);
  const auto zs = grid_points(compact_grid, n);
  TestFunctionSweep out;
  out.hypotheses = check_test_function_hypotheses(spec, t);
  out.norms.name = "test_function_norms";
  out.maxima.name = "test_function_maxima";
  for (double level : w_levels) {
    if (!(level >= 0.0 && level < 1.0))
      throw DomainError("test-function levels must lie in [0, 1)");
    const TestFunctionParams params{level * dir, t, p};
    const TestFunction f(params, spec);
    const Estimate<double> norm = p_norm(f, spec, p, rule, &params.w);
    out.norms.points.push_back({level, f.weight_at_center(), norm.value, norm.std_error});
    double mx = 0.0;
    for (const auto& z : zs)
      mx = std::max(mx, std::abs(f(z)));
    out.maxima.points.push_back({level, f.weight_at_center(), mx, 0.0});
  }
  out.norms.finalize();
  out.maxima.finalize();
  out.norms.verdict = classify_series(out.norms, false);
  out.maxima.verdict = classify_series(out.maxima, false);
  const auto& m = out.maxima.points;
  const std::size_t tail = std::min<std::size_t>(5, m.size());
  bool decreasing = tail >= 2;
  for (std::size_t i = m.size() - tail + 1; i < m.size(); ++i)
    decreasing = decreasing && m[i].ratio < m[i - 1].ratio;
  out.maxima.notes["tail_decreasing"] = decreasing ? 1.0 : 0.0;
  out.norms.notes["norm_bound_hypotheses"] = out.hypotheses.norm_bound ? 1.0 : 0.0;
  out.maxima.notes["vanishing_hypothesis"] = out.hypotheses.vanishing ? 1.0 : 0.0;
  return out;
}

RatioSeries comparability_sweep(const WeightSpec& spec, double r, const std::vector<double>& levels,
                                const CPoint& direction, std::size_t samples, std::uint64_t seed)
{
  const int n = spec.dimension();
  require_dims(static_cast<int>(direction.size()), n, "comparability sweep");
  const CPoint dir = normalized(direction);
  RatioSeries s;
  s.name = "comparability";
  for (double level : levels) {
    const auto c = comparability_ratio(spec, level * dir, r, samples, seed);
    s.points.push_back({level, c.max_ratio, c.max_ratio / c.min_ratio, 0.0});
  }
  s.finalize();
  s.verdict = classify_series(s, false);
  return s;
}

} // namespace blab
