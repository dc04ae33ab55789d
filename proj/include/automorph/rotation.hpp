#ifndef AUTOMORPH_ROTATION_HPP
#define AUTOMORPH_ROTATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "automorph/circle_map.hpp"
#include "automorph/continued_fraction.hpp"
#include "automorph/error.hpp"

namespace automorph {

/// Position of rho(f) relative to p/q.
enum class Comparison { Below, Equal, Above };

inline std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::Below: return "Below";
    case Comparison::Equal: return "Equal";
    default: return "Above";
  }
}

/// Grid points used for the extremum search in compare_to_rational.
inline constexpr int kCompareGrid = 4096;

namespace detail {

inline double lift_power_minus(const AnalyticCircleMap& f, double x, std::int64_t q, std::int64_t p) {
  OrbitCursor c(f, x);
  c.advance_to(q);
  return c.lift_minus(p) - x;
}

/// Rounding allowance for F^q(x) - x - p.
inline double compare_slack(std::int64_t q) {
  return 8.0 * static_cast<double>(q) * std::numeric_limits<double>::epsilon();
}

}  // namespace detail

/// Compares rho(f) with p/q through the extrema of g(x) = F^q(x) - x - p:
/// Above iff min g > 0, Below iff max g < 0, Equal otherwise. Extrema come
/// from a 4096-point grid followed by a Brent polish around the best node.
inline Comparison compare_to_rational(const AnalyticCircleMap& f, std::int64_t p, std::int64_t q) {
  if (q < 1) throw InvalidArgument("compare_to_rational: q must be >= 1");
  if (!f.is_homeomorphism()) throw NotHomeomorphism("compare_to_rational: map is not a homeomorphism");
  constexpr int n = kCompareGrid;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = detail::lift_power_minus(f, static_cast<double>(i) / n, q, p);
  const auto [lo_it, hi_it] = std::minmax_element(g.begin(), g.end());
  const double h = 1.0 / n;
  constexpr int bits = std::numeric_limits<double>::digits / 2;
  boost::uintmax_t max_iter = 100;

  const double x_lo = static_cast<double>(lo_it - g.begin()) * h;
  auto gmin = [&](double x) { return detail::lift_power_minus(f, x, q, p); };
  const double min_g = std::min(*lo_it, boost::math::tools::brent_find_minima(gmin, x_lo - h, x_lo + h, bits, max_iter).second);

  max_iter = 100;
  const double x_hi = static_cast<double>(hi_it - g.begin()) * h;
  auto gmax = [&](double x) { return -detail::lift_power_minus(f, x, q, p); };
  const double max_g = std::max(*hi_it, -boost::math::tools::brent_find_minima(gmax, x_hi - h, x_hi + h, bits, max_iter).second);

  const double slack = detail::compare_slack(q);
  if (min_g > slack) return Comparison::Above;
  if (max_g < -slack) return Comparison::Below;
  return Comparison::Equal;
}

/// One-orbit test: sign of F^q(0) - p. Above means rho >= p/q, Below means
/// rho <= p/q (monotonicity of the lift), Equal means 0 is a p/q-periodic point.
inline Comparison orbit_compare(const AnalyticCircleMap& f, std::int64_t p, std::int64_t q) {
  const double g = detail::lift_power_minus(f, 0.0, q, p);
  if (g > 0.0) return Comparison::Above;
  if (g < 0.0) return Comparison::Below;
  return Comparison::Equal;
}

/// Quotients shared by every number in the open interval (lo, hi); lo < hi are
/// fractions given exactly. Stops when an integer falls strictly inside.
inline std::vector<std::int64_t> common_quotients(Convergent lo, Convergent hi, std::size_t max_depth = 200) {
  std::vector<std::int64_t> out;
  auto floor_div = [](std::int64_t a, std::int64_t b) {
    std::int64_t k = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --k;
    return k;
  };
  // Invariant: lo.p/lo.q < hi.p/hi.q, both denominators positive.
  while (out.size() < max_depth) {
    const std::int64_t k = floor_div(lo.p, lo.q);
    const std::int64_t ceil_hi = -floor_div(-hi.p, hi.q);
    if (ceil_hi - 1 != k) break;
    out.push_back(k);
    const std::int64_t lo_rem = lo.p - k * lo.q;  // (lo - k) = lo_rem / lo.q
    const std::int64_t hi_rem = hi.p - k * hi.q;
    if (lo_rem == 0) break;  // next quotient unbounded on the interval
    // x -> 1/(x - k) reverses the order.
    Convergent nlo{hi.q, hi_rem};
    Convergent nhi{lo.q, lo_rem};
    lo = nlo;
    hi = nhi;
  }
  return out;
}

struct RotationNumber {
  double value = 0.0;
  /// Certified bound |rho - value| (or the Birkhoff bound 1/n when not certified).
  double error = 0.0;
  bool certified = false;
  /// True when rho = lower = upper is rational (a periodic orbit was found).
  bool rational = false;
  Convergent lower{0, 1};
  Convergent upper{1, 1};
  /// Convergents of rho known from the bracket.
  std::vector<Convergent> ladder;
  /// Orbit length of 0 that was used.
  std::int64_t orbit_length = 0;

  double gap() const { return upper.value() - lower.value(); }
  ContinuedFraction expansion() const {
    return rational ? cf_of_rational(lower.p, lower.q) : ContinuedFraction(common_quotients(lower, upper));
  }
};

/// Largest denominator tested for an exact periodic orbit during the descent
/// (the grid comparison costs kCompareGrid * q map evaluations). Beyond it a
/// rational rho is still enclosed by a certified bracket, only not named.
inline constexpr std::int64_t kDetectMaxQ = 20'000;

struct RotationOptions {
  double tol = 1e-10;
  std::int64_t budget = 10'000'000;  ///< maximum orbit length of 0
};

/// Certified rotation number. Stern-Brocot descent with mediants tested by
/// the sign of F^q(0) - p along the single orbit of 0; when one end of the
/// bracket survives 8, 16, 32, ... consecutive steps it is tested with
/// compare_to_rational for an exact periodic orbit. Falls back to the
/// Birkhoff average F^n(0)/n (not certified) when the budget runs out.
inline RotationNumber rotation_number(const AnalyticCircleMap& f, const RotationOptions& opt = {}) {
  if (!f.is_homeomorphism()) throw NotHomeomorphism("rotation_number: map is not a homeomorphism");
  if (!(opt.tol > 0.0)) throw InvalidArgument("rotation_number: tol must be positive");
  RotationNumber out;
  OrbitCursor orbit(f, 0.0);
  orbit.step();
  const std::int64_t n0 = orbit.whole();
  Convergent lo{n0, 1}, hi{n0 + 1, 1};

  auto finish_rational = [&](Convergent r) {
    out.value = r.value();
    out.error = 0.0;
    out.certified = true;
    out.rational = true;
    out.lower = out.upper = r;
    out.ladder = convergents(cf_of_rational(r.p, r.q));
    out.orbit_length = orbit.time();
    return out;
  };

  if (orbit.frac() == 0.0) return finish_rational(lo);

  int same_lo = 0, same_hi = 0;
  std::int64_t next_check_lo = 8, next_check_hi = 8;
  while (hi.value() - lo.value() > opt.tol) {
    const Convergent mid{lo.p + hi.p, lo.q + hi.q};
    if (mid.q > opt.budget) {
      orbit.advance_to(opt.budget);
      out.value = orbit.lift() / static_cast<double>(orbit.time());
      out.error = 1.0 / static_cast<double>(orbit.time());
      out.certified = false;
      out.lower = lo;
      out.upper = hi;
      out.ladder = convergents(ContinuedFraction(common_quotients(lo, hi)));
      out.orbit_length = orbit.time();
      return out;
    }
    orbit.advance_to(mid.q);
    const double g = orbit.lift_minus(mid.p);
    if (g == 0.0) return finish_rational(mid);
    if (g > 0.0) {
      lo = mid;
      ++same_hi;
      same_lo = 0;
      next_check_lo = 8;
    } else {
      hi = mid;
      ++same_lo;
      same_hi = 0;
      next_check_hi = 8;
    }
    // A long run on one side suggests rho equals the fixed end.
    if (same_lo >= next_check_lo) {
      next_check_lo *= 2;
      if (lo.q <= kDetectMaxQ && compare_to_rational(f, lo.p, lo.q) == Comparison::Equal) return finish_rational(lo);
    }
    if (same_hi >= next_check_hi) {
      next_check_hi *= 2;
      if (hi.q <= kDetectMaxQ && compare_to_rational(f, hi.p, hi.q) == Comparison::Equal) return finish_rational(hi);
    }
  }
  out.lower = lo;
  out.upper = hi;
  out.value = 0.5 * (lo.value() + hi.value());
  out.error = 0.5 * (hi.value() - lo.value());
  out.certified = true;
  out.ladder = convergents(ContinuedFraction(common_quotients(lo, hi)));
  out.orbit_length = orbit.time();
  return out;
}

inline RotationNumber rotation_number(const AnalyticCircleMap& f, double tol, std::int64_t budget) {
  return rotation_number(f, RotationOptions{tol, budget});
}

/// Rotation number resolved only until its ladder has `depth` entries,
/// tightening tol by 1e-2 from 1e-6 down to 1e-14. A map solved onto an
/// irrational tongue sits, in floating point, inside some rational tongue of
/// large denominator; a needlessly tight descent finds that rational instead.
inline RotationNumber rotation_to_depth(const AnalyticCircleMap& f, std::size_t depth,
                                        std::int64_t budget = 100'000'000) {
  for (double tol = 1e-6;; tol *= 1e-2) {
    auto rho = rotation_number(f, RotationOptions{tol, budget});
    if (rho.rational || !rho.certified || rho.ladder.size() >= depth || tol < 1e-14) return rho;
  }
}

/// Distinct convergent denominators 1 = q_0 <= q_1 < q_2 < ... of the ladder.
inline std::vector<std::int64_t> distinct_denominators(const std::vector<Convergent>& ladder) {
  std::vector<std::int64_t> qs;
  for (const auto& c : ladder) {
    if (qs.empty() || qs.back() != c.q) qs.push_back(c.q);
  }
  return qs;
}

/// Closest return times of the orbit of 0. Records are kept separately on each
/// side of 0 (a purely combinatorial notion, invariant under conjugacy); a
/// record time is a closest return when the next record falls on the other
/// side. For rotations these are the convergent denominators.
/// Throws AccuracyFault when the record distance drops below the accumulated
/// rounding estimate m * 1e-15, or (verify = true) when the times disagree
/// with the certified convergent ladder of rho(f).
inline std::vector<std::int64_t> closest_return_times(const AnalyticCircleMap& f, int levels, bool verify = true,
                                                      std::int64_t budget = 100'000'000) {
  if (levels < 1) throw InvalidArgument("closest_return_times: levels must be >= 1");
  if (!f.is_homeomorphism()) throw NotHomeomorphism("closest_return_times: map is not a homeomorphism");
  std::vector<std::int64_t> times;
  OrbitCursor orbit(f, 0.0);
  double best_right = std::numeric_limits<double>::infinity();
  double best_left = std::numeric_limits<double>::infinity();
  std::int64_t last_time = 0;
  int last_side = 0;
  while (static_cast<int>(times.size()) < levels) {
    if (orbit.time() >= budget) throw ConvergenceError("closest_return_times: orbit budget exhausted");
    orbit.step();
    const std::int64_t m = orbit.time();
    const double d = orbit.frac() <= 0.5 ? orbit.frac() : orbit.frac() - 1.0;
    if (d == 0.0) throw InvalidArgument("closest_return_times: 0 is periodic, rotation number is rational");
    const int side = d > 0.0 ? 1 : -1;
    const double dist = std::abs(d);
    double& best = side > 0 ? best_right : best_left;
    if (dist >= best) continue;
    if (dist < static_cast<double>(m) * 1e-15) {
      throw AccuracyFault("closest_return_times: return distance below orbit rounding at time " + std::to_string(m));
    }
    best = dist;
    if (last_side != 0 && side != last_side) times.push_back(last_time);
    last_time = m;
    last_side = side;
  }
  if (verify) {
    const auto rho = rotation_to_depth(f, static_cast<std::size_t>(levels) + 2, budget);
    if (rho.rational) throw InvalidArgument("closest_return_times: rotation number is rational");
    const auto qs = distinct_denominators(rho.ladder);
    const std::size_t n = std::min(qs.size(), times.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (qs[i] != times[i]) {
        throw AccuracyFault("closest_return_times: time " + std::to_string(times[i]) +
                            " disagrees with convergent denominator " + std::to_string(qs[i]));
      }
    }
  }
  return times;
}

/// One interval of a dynamical partition, [left, left + length] on the circle.
struct PartitionInterval {
  std::int64_t k = 0;     ///< iterate index: the interval is f^k(I_n) or f^k(I_{n+1})
  bool long_interval = true;  ///< true for I_n^k, false for I_{n+1}^k
  double left = 0.0;      ///< in [0, 1)
  double length = 0.0;
  double right() const { return left + length; }
};

struct DynamicalPartition {
  int level = 0;
  Convergent cn;    ///< p_n / q_n
  Convergent cn1;   ///< p_{n+1} / q_{n+1}
  std::vector<PartitionInterval> intervals;  ///< sorted by left endpoint

  std::int64_t qn() const { return cn.q; }
  std::int64_t qn1() const { return cn1.q; }
  double total_length() const {
    double s = 0.0;
    for (const auto& I : intervals) s += I.length;
    return s;
  }
};

/// The level-n partition: I_n^k = f^k([0, f^{q_n}(0)]), k < q_{n+1}, and
/// I_{n+1}^k = f^k([0, f^{q_{n+1}}(0)]), k < q_n, with lengths taken from the
/// unwrapped lift, |F^{k+q_n}(0) - p_n - F^k(0)|. The covering and
/// disjointness checks throw AccuracyFault when orbit rounding is too coarse.
inline DynamicalPartition build_partition(const AnalyticCircleMap& f, int n, const RotationNumber& rho) {
  if (n < 0) throw InvalidArgument("build_partition: level must be >= 0");
  if (rho.rational) throw InvalidArgument("build_partition: rotation number is rational");
  if (static_cast<std::size_t>(n) + 1 >= rho.ladder.size()) {
    throw InvalidArgument("build_partition: level " + std::to_string(n) + " exceeds certified convergent depth");
  }
  DynamicalPartition P;
  P.level = n;
  P.cn = rho.ladder[static_cast<std::size_t>(n)];
  P.cn1 = rho.ladder[static_cast<std::size_t>(n) + 1];
  const std::int64_t total = P.cn.q + P.cn1.q;

  std::vector<std::int64_t> whole(static_cast<std::size_t>(total) + 1);
  std::vector<double> frac(static_cast<std::size_t>(total) + 1);
  OrbitCursor orbit(f, 0.0);
  for (std::int64_t k = 0; k <= total; ++k) {
    orbit.advance_to(k);
    whole[static_cast<std::size_t>(k)] = orbit.whole();
    frac[static_cast<std::size_t>(k)] = orbit.frac();
  }
  auto add = [&](std::int64_t k, const Convergent& c, bool is_long) {
    const auto a = static_cast<std::size_t>(k);
    const auto b = static_cast<std::size_t>(k + c.q);
    const double diff = static_cast<double>(whole[b] - whole[a] - c.p) + (frac[b] - frac[a]);
    PartitionInterval I;
    I.k = k;
    I.long_interval = is_long;
    I.length = std::abs(diff);
    I.left = diff >= 0.0 ? frac[a] : frac[b];
    P.intervals.push_back(I);
  };
  for (std::int64_t k = 0; k < P.cn1.q; ++k) add(k, P.cn, true);
  for (std::int64_t k = 0; k < P.cn.q; ++k) add(k, P.cn1, false);
  std::sort(P.intervals.begin(), P.intervals.end(),
            [](const PartitionInterval& x, const PartitionInterval& y) { return x.left < y.left; });

  const double slack = static_cast<double>(total) * 1e-15 + 1e-13;
  const double covered = P.total_length();
  if (std::abs(covered - 1.0) > 1e-9) {
    throw AccuracyFault("build_partition: lengths sum to " + std::to_string(covered));
  }
  for (std::size_t i = 0; i < P.intervals.size(); ++i) {
    const auto& I = P.intervals[i];
    const auto& J = P.intervals[(i + 1) % P.intervals.size()];
    const double expected = i + 1 < P.intervals.size() ? J.left : J.left + 1.0;
    if (std::abs(I.right() - expected) > slack || I.length <= slack) {
      throw AccuracyFault("build_partition: intervals overlap or leave gaps at level " + std::to_string(n));
    }
  }
  return P;
}

inline DynamicalPartition build_partition(const AnalyticCircleMap& f, int n) {
  if (n < 0) throw InvalidArgument("build_partition: level must be >= 0");
  return build_partition(f, n, rotation_to_depth(f, static_cast<std::size_t>(n) + 2));
}

/// Largest ratio of lengths of circularly adjacent intervals.
inline double real_bounds_ratio(const DynamicalPartition& P) {
  const auto& v = P.intervals;
  if (v.size() < 2) return 1.0;
  double r = 1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = v[i].length;
    const double b = v[(i + 1) % v.size()].length;
    r = std::max(r, std::max(a, b) / std::min(a, b));
  }
  return r;
}

/// max over grid points x_i = i/grid of (F^{q_n})'(x_i), by the chain rule.
inline double max_return_derivative(const AnalyticCircleMap& f, std::int64_t qn, int grid = kCompareGrid) {
  if (qn < 1 || grid < 1) throw InvalidArgument("max_return_derivative: q_n and grid must be positive");
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    double x = static_cast<double>(i) / grid;
    double d = 1.0;
    for (std::int64_t j = 0; j < qn; ++j) {
      d *= f.slope(x);
      x = f.eval(x);
    }
    best = std::max(best, d);
  }
  return best;
}

inline double max_return_derivative(const AnalyticCircleMap& f, int n, const RotationNumber& rho,
                                    int grid = kCompareGrid) {
  if (n < 0 || static_cast<std::size_t>(n) >= rho.ladder.size()) {
    throw InvalidArgument("max_return_derivative: level exceeds certified convergent depth");
  }
  return max_return_derivative(f, rho.ladder[static_cast<std::size_t>(n)].q, grid);
}

}  // namespace automorph

#endif  // AUTOMORPH_ROTATION_HPP
