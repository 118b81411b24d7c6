#ifndef BLAB_ESTIMATE_LAB_HPP
#define BLAB_ESTIMATE_LAB_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "blab/bergman_model.hpp"
#include "blab/measures.hpp"
#include "blab/quadrature.hpp"
#include "blab/weights.hpp"

namespace blab {

/// Centers at |z| = level times a fixed set of unit directions.
struct GridSpec {
  std::vector<double> radial_levels;
  int directions_per_level = 8;
  std::uint64_t seed = 0;
};

void validate_grid(const GridSpec& grid);

/// Level-major list of grid points; every level uses the same directions,
/// the first of which is e_1.
std::vector<CPoint> grid_points(const GridSpec& grid, int n);

enum class Verdict { Bounded, Diverging, Inconclusive };

std::string to_string(Verdict v);

struct RatioPoint {
  double parameter = 0.0;
  double value = 0.0;
  double ratio = 0.0;
  double std_error = 0.0;
};

struct RatioSeries {
  std::string name;
  std::vector<RatioPoint> points;
  double sup = 0.0;
  double inf = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  /// Named scalars recorded alongside the series (fitted slopes, bounds, constants).
  std::map<std::string, double> notes;

  /// Recomputes sup and inf from the points.
  void finalize();
};

/// Verdict from per-level maxima (and minima when two-sided).
/// Diverging: growth by >= 2x per level over the three outermost levels.
/// Bounded: outer three levels stay within 1.2x of the inner levels.
Verdict classify_levels(const std::vector<double>& level_sup, const std::vector<double>& level_inf,
                        bool two_sided);

/// Groups the series by parameter value (in order of appearance) and classifies.
/// `power` is applied to ratios before classification.
Verdict classify_series(const RatioSeries& s, bool two_sided, double power = 1.0);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log(per-level sup) against log(1 - level^2) over the last `tail` levels.
double boundary_slope(const RatioSeries& s, std::size_t tail = 3, double power = 1.0);

/// eta(D(w,r)) / (omega(w)^{pt/p} (1-|w|^2)^{(n+1) pt/p}) over grid centers.
/// Centers on a pole of omega are skipped and counted in notes["skipped"].
RatioSeries carleson_ratio_sweep(const BallMeasure& eta, const WeightSpec& spec, double p,
                                 double p_tilde, double r, const GridSpec& grid,
                                 const BallMassOptions& mass = {});

/// (int |f|^pt d eta)^{1/pt} / ||f||_{A^p_omega} for each test function of the family.
/// Integrals are taken after recentering at the test function's center.
RatioSeries embedding_ratio_sweep(const BallMeasure& eta, const WeightSpec& spec, double p,
                                  double p_tilde, const std::vector<TestFunctionParams>& family,
                                  const QuadratureRule& rule);

/// K_N(z,z) (1-|z|^2)^{n+1} omega(z) over grid points.
RatioSeries norm_estimate_sweep(const BergmanModel& model, const GridSpec& grid);

/// |K_N(z,w)| / (||K_z|| ||K_w||) for w sampled with |z - w| < alpha (1-|z|^2),
/// alpha taken from the inclusion constants with the given a_r and divisor.
RatioSeries local_kernel_equivalence_sweep(const BergmanModel& model, double r,
                                           const GridSpec& grid, double a_r,
                                           int pairs_per_point = 8, int divisor = 16);

/// |K_N(z,w)|^2 / (K_N(z,z) K_N(w,w) x^t) with x = 1 - gamma(z,w)^2, over
/// near-diagonal and antipodal pairs inside the reliable zone. The parameter is x.
RatioSeries pointwise_decay_sweep(const BergmanModel& model, double t_decay,
                                  std::size_t pair_count, std::uint64_t seed);

/// |f(z) - f(w)| / ((|z-w| / (1-|z|^2)) ||K_z||) for random unit-norm polynomials
/// and |z - w| < C (1-|z|^2). notes["bound"] = 4 a_r sqrt(n) / C.
RatioSeries difference_bound_sweep(const BergmanModel& model, double r, std::size_t trial_count,
                                   std::uint64_t seed, double a_r);

struct HessianCheck {
  CPoint z;
  double t_decay = 0.0;
  CMatrix m_matrix;
  CMatrix m_inverse;
  double identity_residual = 0.0;
  /// max-entry residual of the Sherman-Morrison form against M^{-1} scaled back.
  double inverse_sum_residual = 0.0;
  double g = 0.0;
  /// max-entry difference between M and a central finite-difference Hessian.
  double finite_difference_error = 0.0;
  double c_t = 0.0;
};

/// Complex Hessian of phi(z) = t log(|1-<z,w>|^2 / (1-|z|^2)) and its closed-form inverse.
HessianCheck hessian_inverse_check(const CPoint& z, const CPoint& w, double t_decay,
                                   double fd_step = 1e-4);

/// I(w) = int (1-|z|^2)^q / |1-<z,w>|^{2n+t} dv(z) at |w| = level along e_1.
/// Ratio is I(w) (1-|w|^2)^{-(q-(n-1)-t)}; notes hold the fitted and predicted slopes.
RatioSeries forelli_rudin_slope(double q_exp, double t_exp, int n,
                                const std::vector<double>& w_levels, const QuadratureRule& rule);

struct TestFunctionSweep {
  RatioSeries norms;    // ||f_{w,t}||_{A^p_omega} per level
  RatioSeries maxima;   // max |f_{w,t}| over the compact grid
  TestFunctionHypotheses hypotheses;
};

/// Norms of f_{w,t} for w = level * direction and their sup over a compact z-grid.
TestFunctionSweep test_function_sweep(const WeightSpec& spec, double t, double p,
                                      const std::vector<double>& w_levels, const CPoint& direction,
                                      const QuadratureRule& rule, const GridSpec& compact_grid);

/// max/min of omega(z)/omega(a) on D(a, r) at centers a = level * direction.
RatioSeries comparability_sweep(const WeightSpec& spec, double r, const std::vector<double>& levels,
                                const CPoint& direction, std::size_t samples, std::uint64_t seed);

} // namespace blab

#endif
