#ifndef AUTOMORPH_TONGUE_HPP
#define AUTOMORPH_TONGUE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "automorph/circle_map.hpp"
#include "automorph/continued_fraction.hpp"
#include "automorph/error.hpp"
#include "automorph/grid_measure.hpp"
#include "automorph/rotation.hpp"
#include "automorph/s_measure.hpp"

namespace automorph {

/// Lifts x + a + base(x) + nu * direction(x). dF/da = 1 by construction,
/// dF/dnu = direction.
struct MonotoneFamily {
  TrigPolynomial base;
  TrigPolynomial direction = TrigPolynomial::sin_mode(1);
  double nu_min = -1.0 / kTwoPi;
  double nu_max = 1.0 / kTwoPi;

  /// x + a + nu sin 2 pi x, nu in [-1/(2 pi), 1/(2 pi)].
  static MonotoneFamily arnold() { return MonotoneFamily{}; }

  AnalyticCircleMap at(double a, double nu) const { return AnalyticCircleMap(a, base + direction.scaled(nu)); }
  double d_da(double) const { return 1.0; }
  double d_dnu(double x) const { return direction(x); }

  bool in_range(double nu) const {
    constexpr double eps = 1e-15;
    return nu >= nu_min - eps && nu <= nu_max + eps;
  }
};

struct TongueOptions {
  double tol_a = 1e-12;
  std::int64_t max_q = 100'000'000;  ///< deepest convergent denominator / orbit length
  std::size_t N = std::size_t{1} << 14;
  SolveOptions solve;
  /// FD step for the cross-check column of trace_tongue; 0 disables it.
  double fd_h = 0.0;
  unsigned workers = 1;
};

/// Bracket [lo, hi] of the tongue parameter at fixed nu, each end certified
/// by a convergent on the matching side of alpha.
struct TongueSolve {
  double a = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  Convergent lo_certificate;  ///< p/q < alpha with rho(f_lo) <= p/q
  Convergent hi_certificate;  ///< p/q > alpha with rho(f_hi) >= p/q
  int bisection_steps = 0;
  double width() const { return hi - lo; }
};

namespace detail {

struct SideResult {
  int side = 0;  ///< -1: rho < alpha (a too small), +1: rho > alpha
  Convergent certificate;
};

/// Decides the side of alpha from the orbit of 0 against the convergent ladder:
/// an even convergent with F^q(0) <= p gives rho <= p/q < alpha, an odd one
/// with F^q(0) >= p gives rho >= p/q > alpha.
inline SideResult side_of_alpha(const AnalyticCircleMap& f, const std::vector<Convergent>& ladder) {
  OrbitCursor orbit(f, 0.0);
  for (std::size_t n = 0; n < ladder.size(); ++n) {
    const auto& c = ladder[n];
    orbit.advance_to(c.q);
    const double g = orbit.lift_minus(c.p);
    if (n % 2 == 0 && g <= 0.0) return {-1, c};
    if (n % 2 == 1 && g >= 0.0) return {+1, c};
  }
  throw ConvergenceError("tongue: convergent depth exhausted before the side of alpha was decided");
}

inline void require_irrational_target(const ContinuedFraction& alpha) {
  if (alpha.terminated() || (!alpha.is_periodic() && alpha.length() < 8)) {
    throw InvalidArgument("tongue: alpha must be irrational (periodic tail or a deep expansion)");
  }
}

}  // namespace detail

/// Tongue parameter for a one-parameter set of maps x -> F(x) + a,
/// bisected on a with exact rational comparisons until hi - lo <= tol_a.
inline TongueSolve solve_offset_for_alpha(const AnalyticCircleMap& shape, const ContinuedFraction& alpha,
                                          const TongueOptions& opt = {}) {
  detail::require_irrational_target(alpha);
  if (!shape.is_homeomorphism()) throw NotHomeomorphism("tongue: map leaves the homeomorphism range");
  if (!(opt.tol_a > 0.0)) throw InvalidArgument("tongue: tol_a must be positive");
  const auto ladder = convergents(alpha, opt.max_q);
  const double target = ladder.back().value();
  const double pad = shape.max_displacement() + 1e-3;
  TongueSolve out;
  // Asymmetric so that no bisection point lands on the target itself (a
  // rotation with rho exactly at the deepest convergent cannot be separated).
  out.lo = target - pad;
  out.hi = target + 1.5 * pad;
  const auto at = [&](double a) { return shape.with_offset(a); };
  const auto s_lo = detail::side_of_alpha(at(out.lo), ladder);
  const auto s_hi = detail::side_of_alpha(at(out.hi), ladder);
  if (s_lo.side != -1 || s_hi.side != +1) throw ConvergenceError("tongue: initial bracket does not straddle alpha");
  out.lo_certificate = s_lo.certificate;
  out.hi_certificate = s_hi.certificate;
  while (out.hi - out.lo > opt.tol_a) {
    double mid = 0.5 * (out.lo + out.hi);
    if (mid <= out.lo || mid >= out.hi) break;  // bracket at double resolution
    detail::SideResult r;
    try {
      r = detail::side_of_alpha(at(mid), ladder);
    } catch (const ConvergenceError&) {
      // rho(mid) agrees with alpha beyond the ladder; any other inner point will do.
      mid = out.lo + 0.3819660112501051 * (out.hi - out.lo);
      r = detail::side_of_alpha(at(mid), ladder);
    }
    if (r.side < 0) {
      out.lo = mid;
      out.lo_certificate = r.certificate;
    } else {
      out.hi = mid;
      out.hi_certificate = r.certificate;
    }
    ++out.bisection_steps;
  }
  out.a = 0.5 * (out.lo + out.hi);
  return out;
}

/// a(nu) on the alpha-tongue of the family.
inline TongueSolve solve_tongue(const MonotoneFamily& family, const ContinuedFraction& alpha, double nu,
                                const TongueOptions& opt = {}) {
  if (!family.in_range(nu)) throw InvalidArgument("tongue: nu outside the family range");
  const auto shape = family.at(0.0, nu);
  if (!shape.is_homeomorphism()) throw NotHomeomorphism("tongue: nu leaves the homeomorphism range");
  return solve_offset_for_alpha(shape, alpha, opt);
}

inline double solve_tongue_point(const MonotoneFamily& family, const ContinuedFraction& alpha, double nu,
                                 double tol_a) {
  TongueOptions opt;
  opt.tol_a = tol_a;
  return solve_tongue(family, alpha, nu, opt).a;
}

/// da/dnu = - int dF/dnu(f^{-1}x) dmu / int dF/da(f^{-1}x) dmu, mu the (-1)-measure of f_{a,nu}.
inline double tongue_derivative(const MonotoneFamily& family, double a, double nu, const GridMeasure& mu) {
  const auto f = family.at(a, nu);
  const double num = integrate_pullback(mu, f, [&](double x) { return family.d_dnu(x); });
  const double den = integrate_pullback(mu, f, [&](double x) { return family.d_da(x); });
  if (den < 1e-6) throw ConvergenceError("tongue_derivative: transversality denominator below 1e-6");
  return -num / den;
}

/// Solves a(nu), then the (-1)-measure, then the derivative formula.
inline double tongue_derivative(const MonotoneFamily& family, const ContinuedFraction& alpha, double nu,
                                const TongueOptions& opt = {}) {
  const double a = solve_tongue(family, alpha, nu, opt).a;
  SolveOptions so = opt.solve;
  so.assume_irrational = true;
  const auto sol = solve_s_measure(family.at(a, nu), -1.0, opt.N, so);
  return tongue_derivative(family, a, nu, sol.measure);
}

/// Central difference in the interior; at an end of the family range the
/// one-sided second-order stencil (3 a0 - 4 a1 + a2) / (2h) pointing inward.
inline double fd_derivative(const MonotoneFamily& family, const ContinuedFraction& alpha, double nu, double h,
                            const TongueOptions& opt = {}) {
  if (!(h > 0.0)) throw InvalidArgument("fd_derivative: h must be positive");
  const auto a_at = [&](double x) { return solve_tongue(family, alpha, x, opt).a; };
  const bool up = family.in_range(nu + h);
  const bool down = family.in_range(nu - h);
  if (up && down) return (a_at(nu + h) - a_at(nu - h)) / (2.0 * h);
  if (down && family.in_range(nu - 2.0 * h)) {
    return (3.0 * a_at(nu) - 4.0 * a_at(nu - h) + a_at(nu - 2.0 * h)) / (2.0 * h);
  }
  if (up && family.in_range(nu + 2.0 * h)) {
    return (-3.0 * a_at(nu) + 4.0 * a_at(nu + h) - a_at(nu + 2.0 * h)) / (2.0 * h);
  }
  throw InvalidArgument("fd_derivative: stencil leaves the homeomorphism range");
}

struct TonguePoint {
  double nu = 0.0;
  double a = std::numeric_limits<double>::quiet_NaN();
  double derivative = std::numeric_limits<double>::quiet_NaN();
  double fd_derivative = std::numeric_limits<double>::quiet_NaN();
  double width = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double kr_gap = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool ok = false;
  std::string error;
};

inline TonguePoint tongue_point(const MonotoneFamily& family, const ContinuedFraction& alpha, double nu,
                                const TongueOptions& opt = {}) {
  TonguePoint p;
  p.nu = nu;
  try {
    const auto ts = solve_tongue(family, alpha, nu, opt);
    p.a = ts.a;
    p.width = ts.width();
    SolveOptions so = opt.solve;
    so.assume_irrational = true;
    const auto sol = solve_s_measure(family.at(ts.a, nu), -1.0, opt.N, so);
    p.residual = sol.residual;
    p.kr_gap = sol.kr_gap;
    p.lambda = sol.lambda;
    p.iterations = sol.iterations;
    p.derivative = tongue_derivative(family, ts.a, nu, sol.measure);
    if (opt.fd_h > 0.0) p.fd_derivative = fd_derivative(family, alpha, nu, opt.fd_h, opt);
    p.ok = true;
  } catch (const Error& e) {
    p.error = e.what();
  }
  return p;
}

/// One TonguePoint per nu, evaluated by up to opt.workers threads. Output
/// order follows nus; failures are recorded per point.
inline std::vector<TonguePoint> trace_tongue(const MonotoneFamily& family, const ContinuedFraction& alpha,
                                             const std::vector<double>& nus, const TongueOptions& opt = {}) {
  std::vector<TonguePoint> out(nus.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < nus.size(); i = next++) out[i] = tongue_point(family, alpha, nus[i], opt);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(nus.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(work);
  }
  return out;
}

/// Least-squares slope of log y against log x.
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_loglog_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct TangentReport {
  double c = 0.0;  ///< int v(f^{-1}x) dmu
  std::vector<double> t;
  /// Offset change tau(t) restoring rho = alpha on f + t v + tau.
  std::vector<double> tau;
  /// |rho(f + t v) - alpha|
  std::vector<double> rho_deviation;
  /// Certified error bound on each deviation.
  std::vector<double> rho_error;
  /// Directional derivative of rho along v in units of the derivative along
  /// the constant field: -d tau / dt (Richardson-extrapolated FD).
  double slope = 0.0;
  double ratio = 0.0;  ///< slope / c
  double decay_exponent = 0.0;
  bool two_sided = false;
};

/// Tangent functional check at f (on the alpha-tongue, mu its (-1)-measure).
/// dRho/dv divided by dRho/da equals -d tau/dt where tau(t) is the offset
/// change that keeps rho(f + t v + tau) = alpha; the theory predicts it equals
/// c. Also records |rho(f + t v) - alpha| and its fitted log-log exponent.
inline TangentReport tangent_functional_check(const AnalyticCircleMap& f, const GridMeasure& mu,
                                              const TrigPolynomial& v, std::vector<double> t_list,
                                              const ContinuedFraction& alpha, const TongueOptions& opt = {}) {
  if (t_list.size() < 2) throw InvalidArgument("tangent_functional_check: need at least two t values");
  for (double t : t_list) {
    if (!(t > 0.0)) throw InvalidArgument("tangent_functional_check: t values must be positive");
  }
  std::sort(t_list.begin(), t_list.end(), std::greater<>());
  TangentReport rep;
  rep.c = integrate_pullback(mu, f, v);
  const double alpha_value = convergents(alpha, opt.max_q).back().value();
  // Offsets are absolute in solve_offset_for_alpha, so shifts are measured
  // against each map's own offset (a constant part of v is kept that way).
  const double a0 = solve_offset_for_alpha(f, alpha, opt).a - f.offset();

  auto tau_at = [&](double t) {
    const auto g = f.plus(v, t);
    if (!g.is_homeomorphism()) throw NotHomeomorphism("tangent_functional_check: f + t v is not a homeomorphism");
    return solve_offset_for_alpha(g, alpha, opt).a - g.offset() - a0;
  };
  rep.two_sided = std::all_of(t_list.begin(), t_list.end(),
                              [&](double t) { return f.plus(v, -t).is_homeomorphism(); });

  std::vector<double> D;
  for (double t : t_list) {
    const auto g = f.plus(v, t);
    if (!g.is_homeomorphism()) throw NotHomeomorphism("tangent_functional_check: f + t v is not a homeomorphism");
    const double tp = tau_at(t);
    rep.t.push_back(t);
    rep.tau.push_back(tp);
    if (rep.two_sided) {
      D.push_back(-(tp - tau_at(-t)) / (2.0 * t));
    } else {
      D.push_back(-tp / t);
    }
    const auto rho = rotation_number(g, RotationOptions{1e-13, opt.max_q});
    rep.rho_deviation.push_back(std::abs(rho.value - alpha_value));
    rep.rho_error.push_back(rho.error);
  }
  // Richardson between the two smallest steps: error O(t^2) two-sided, O(t) one-sided.
  const std::size_t m = D.size();
  const double r = rep.t[m - 2] / rep.t[m - 1];
  const double order = rep.two_sided ? 2.0 : 1.0;
  const double rp = std::pow(r, order);
  rep.slope = (rp * D[m - 1] - D[m - 2]) / (rp - 1.0);
  rep.ratio = rep.c != 0.0 ? rep.slope / rep.c : std::numeric_limits<double>::infinity();

  std::vector<double> y;
  for (std::size_t i = 0; i < m; ++i) y.push_back(std::max(rep.rho_deviation[i], rep.rho_error[i]));
  rep.decay_exponent = fit_loglog_slope(rep.t, y);
  return rep;
}

}  // namespace automorph

#endif  // AUTOMORPH_TONGUE_HPP
