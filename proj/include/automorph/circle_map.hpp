#ifndef AUTOMORPH_CIRCLE_MAP_HPP
#define AUTOMORPH_CIRCLE_MAP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "automorph/error.hpp"

namespace automorph {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default slack used when deciding whether min F' is zero.
inline constexpr double kDefaultDelta = 1e-12;
/// Default target accuracy of inverse().
inline constexpr double kInverseTol = 1e-14;
/// Grid used to locate extrema of F' (polished afterwards).
inline constexpr int kSlopeGrid = 4096;

/// Fractional part in [0, 1).
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// Signed distance from x to the nearest integer, in [-1/2, 1/2].
inline double signed_circle_offset(double x) { return x - std::nearbyint(x); }

inline double circle_distance(double x, double y) {
  return std::abs(signed_circle_offset(x - y));
}

/// 1-periodic trigonometric polynomial
///   v(x) = constant + sum_k (sine[k-1] sin 2 pi k x + cosine[k-1] cos 2 pi k x).
/// Used for the non-linear part of lifts, for family directions and for
/// perturbation vector fields.
struct TrigPolynomial {
  double constant = 0.0;
  std::vector<double> sine;
  std::vector<double> cosine;

  static TrigPolynomial sin_mode(int k, double amplitude = 1.0) {
    TrigPolynomial p;
    p.sine.assign(static_cast<std::size_t>(k), 0.0);
    p.sine.back() = amplitude;
    return p;
  }
  static TrigPolynomial cos_mode(int k, double amplitude = 1.0) {
    TrigPolynomial p;
    p.cosine.assign(static_cast<std::size_t>(k), 0.0);
    p.cosine.back() = amplitude;
    return p;
  }
  static TrigPolynomial constant_term(double c) {
    TrigPolynomial p;
    p.constant = c;
    return p;
  }

  std::size_t degree() const { return std::max(sine.size(), cosine.size()); }

  /// Sup-norm bound |constant| + sum |coefficients|.
  double sup_bound() const {
    double b = std::abs(constant);
    for (double c : sine) b += std::abs(c);
    for (double c : cosine) b += std::abs(c);
    return b;
  }

  double operator()(double x) const { return derivative(x, 0); }

  /// order-th derivative, order >= 0.
  double derivative(double x, int order) const {
    const double u = wrap_unit(x);
    double acc = order == 0 ? constant : 0.0;
    const std::size_t K = degree();
    for (std::size_t k = 1; k <= K; ++k) {
      const double c = k <= sine.size() ? sine[k - 1] : 0.0;
      const double d = k <= cosine.size() ? cosine[k - 1] : 0.0;
      if (c == 0.0 && d == 0.0) continue;
      const double w = kTwoPi * static_cast<double>(k);
      const double th = w * u;
      const double sn = std::sin(th);
      const double cs = std::cos(th);
      // d^m/dx^m sin(w x) = w^m sin(w x + m pi/2), same shift for cos.
      double ds = 0.0, dc = 0.0;
      switch (order % 4) {
        case 0: ds = sn; dc = cs; break;
        case 1: ds = cs; dc = -sn; break;
        case 2: ds = -sn; dc = -cs; break;
        default: ds = -cs; dc = sn; break;
      }
      acc += std::pow(w, order) * (c * ds + d * dc);
    }
    return acc;
  }

  TrigPolynomial scaled(double t) const {
    TrigPolynomial p = *this;
    p.constant *= t;
    for (double& c : p.sine) c *= t;
    for (double& c : p.cosine) c *= t;
    return p;
  }

  TrigPolynomial operator+(const TrigPolynomial& o) const {
    TrigPolynomial p = *this;
    p.constant += o.constant;
    if (p.sine.size() < o.sine.size()) p.sine.resize(o.sine.size(), 0.0);
    if (p.cosine.size() < o.cosine.size()) p.cosine.resize(o.cosine.size(), 0.0);
    for (std::size_t i = 0; i < o.sine.size(); ++i) p.sine[i] += o.sine[i];
    for (std::size_t i = 0; i < o.cosine.size(); ++i) p.cosine[i] += o.cosine[i];
    return p;
  }
};

enum class MapClass { Diffeomorphism, Multicritical, NotHomeomorphism };

inline std::string to_string(MapClass c) {
  switch (c) {
    case MapClass::Diffeomorphism: return "Diffeomorphism";
    case MapClass::Multicritical: return "Multicritical";
    default: return "NotHomeomorphism";
  }
}

struct CriticalPoint {
  double location = 0.0;  ///< in [0, 1)
  int order = 3;          ///< odd, >= 3
  bool order_is_lower_bound = false;  ///< true when the order exceeds 5
};

/// Degree-one lift F(x) = x + a + sum_k (c_k sin 2 pi k x + d_k cos 2 pi k x)
/// of an orientation-preserving circle map. Immutable; the minimum of F' is
/// located once at construction so homeomorphism checks are free afterwards.
class AnalyticCircleMap {
 public:
  AnalyticCircleMap() { locate_min_slope(); }

  AnalyticCircleMap(double offset, std::vector<double> sine, std::vector<double> cosine)
      : offset_(offset) {
    terms_.sine = std::move(sine);
    terms_.cosine = std::move(cosine);
    locate_min_slope();
  }

  AnalyticCircleMap(double offset, TrigPolynomial terms) : offset_(offset), terms_(std::move(terms)) {
    offset_ += terms_.constant;
    terms_.constant = 0.0;
    locate_min_slope();
  }

  static AnalyticCircleMap rotation(double angle) { return AnalyticCircleMap(angle, {}, {}); }

  /// x + a + nu sin 2 pi x
  static AnalyticCircleMap arnold(double a, double nu) { return AnalyticCircleMap(a, {nu}, {}); }

  double offset() const { return offset_; }
  const TrigPolynomial& terms() const { return terms_; }
  const std::vector<double>& sine() const { return terms_.sine; }
  const std::vector<double>& cosine() const { return terms_.cosine; }

  double lift(double x) const { return x + offset_ + terms_(x); }

  /// f(x) reduced to [0, 1).
  double eval(double x) const { return wrap_unit(lift(x)); }

  /// F^(order)(x) for order >= 1 (no range restriction).
  double nth_derivative(double x, int order) const {
    if (order < 1) throw InvalidArgument("nth_derivative: order must be >= 1");
    return (order == 1 ? 1.0 : 0.0) + terms_.derivative(x, order);
  }

  double slope(double x) const { return 1.0 + terms_.derivative(x, 1); }

  /// sup |F(x) - x - a|
  double max_displacement() const { return terms_.sup_bound(); }

  double min_slope() const { return min_slope_; }
  double min_slope_location() const { return min_slope_at_; }

  bool is_homeomorphism(double delta = kDefaultDelta) const { return min_slope_ >= -delta; }

  AnalyticCircleMap with_offset(double a) const {
    AnalyticCircleMap m = *this;
    m.offset_ = a;
    return m;
  }

  /// F + t v; the constant part of v is folded into the offset.
  AnalyticCircleMap plus(const TrigPolynomial& v, double t) const {
    TrigPolynomial sum = terms_ + v.scaled(t);
    return AnalyticCircleMap(offset_, std::move(sum));
  }

  /// The real x with F(x) = y. Bisection on the monotone lift, accelerated by
  /// Newton steps that are only accepted inside the current bracket.
  double inverse_lift(double y, double tol = kInverseTol) const {
    if (!is_homeomorphism()) {
      throw NotHomeomorphism("inverse: min F' = " + std::to_string(min_slope_) + " < 0");
    }
    const double shift = std::floor(y);
    const double target = y - shift;
    const double slack = max_displacement() + 1e-12;
    double lo = target - offset_ - slack;
    double hi = target - offset_ + slack;
    double x = 0.5 * (lo + hi);
    constexpr int kMaxIter = 300;
    for (int it = 0; it < kMaxIter; ++it) {
      const double g = lift(x) - target;
      if (std::abs(g) <= tol) return x + shift;
      if (g < 0.0) lo = x; else hi = x;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
        return x + shift;
      }
      const double d = slope(x);
      double next = d > 0.0 ? x - g / d : lo;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    throw ConvergenceError("inverse: no convergence within iteration budget");
  }

  /// The unique preimage of y (mod 1) in [0, 1).
  double inverse(double y, double tol = kInverseTol) const { return wrap_unit(inverse_lift(y, tol)); }

 private:
  void locate_min_slope() {
    if (terms_.degree() == 0) {
      min_slope_ = 1.0;
      min_slope_at_ = 0.0;
      return;
    }
    constexpr int n = kSlopeGrid;
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = slope(static_cast<double>(i) / n);
    min_slope_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double left = g[(i + n - 1) % n];
      const double right = g[(i + 1) % n];
      if (!(g[i] < left && g[i] <= right)) continue;
      const double x = polish_slope_minimum(static_cast<double>(i - 1) / n, static_cast<double>(i + 1) / n);
      const double v = std::min(slope(x), g[i]);
      if (v < min_slope_) {
        min_slope_ = v;
        min_slope_at_ = wrap_unit(slope(x) <= g[i] ? x : static_cast<double>(i) / n);
      }
    }
    if (!std::isfinite(min_slope_)) {  // flat slope profile
      const auto it = std::min_element(g.begin(), g.end());
      min_slope_ = *it;
      min_slope_at_ = static_cast<double>(it - g.begin()) / n;
    }
  }

 public:
  /// Root of F'' inside [lo, hi] by bisection on its sign change (F'' < 0 at
  /// lo, > 0 at hi around a minimum of F'). Falls back to the midpoint.
  double polish_slope_minimum(double lo, double hi) const {
    double flo = nth_derivative(lo, 2);
    double fhi = nth_derivative(hi, 2);
    if (!(flo <= 0.0 && fhi >= 0.0)) return 0.5 * (lo + hi);
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = nth_derivative(mid, 2);
      if (fm < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  double offset_ = 0.0;
  TrigPolynomial terms_;
  double min_slope_ = 1.0;
  double min_slope_at_ = 0.0;
};

// ---------------------------------------------------------------------------
// Free-function interface.

inline double lift_eval(const AnalyticCircleMap& f, double x) { return f.lift(x); }

/// F^(order)(x), order in 1..3.
inline double derivative(const AnalyticCircleMap& f, double x, int order = 1) {
  if (order < 1 || order > 3) throw InvalidArgument("derivative: order must be in 1..3");
  return f.nth_derivative(x, order);
}

inline double inverse(const AnalyticCircleMap& f, double y, double tol = kInverseTol) {
  return f.inverse(y, tol);
}

/// Orbit position kept as integer part + fractional part of the lift, so
/// long orbits keep full precision in the fractional coordinate.
class OrbitCursor {
 public:
  explicit OrbitCursor(const AnalyticCircleMap& f, double x0 = 0.0)
      : f_(&f), whole_(static_cast<std::int64_t>(std::floor(x0))), frac_(x0 - std::floor(x0)) {}

  void step() {
    const double y = f_->lift(frac_);
    const double fl = std::floor(y);
    whole_ += static_cast<std::int64_t>(fl);
    frac_ = y - fl;
    ++time_;
  }
  void advance_to(std::int64_t t) {
    while (time_ < t) step();
  }

  std::int64_t time() const { return time_; }
  std::int64_t whole() const { return whole_; }
  double frac() const { return frac_; }
  /// Lift value minus an integer, computed without cancellation.
  double lift_minus(std::int64_t p) const { return static_cast<double>(whole_ - p) + frac_; }
  double lift() const { return static_cast<double>(whole_) + frac_; }

 private:
  const AnalyticCircleMap* f_;
  std::int64_t whole_ = 0;
  double frac_ = 0.0;
  std::int64_t time_ = 0;
};

/// f^n(x) mod 1; negative n iterates the inverse.
inline double iterate(const AnalyticCircleMap& f, double x, std::int64_t n, double tol = kInverseTol) {
  if (n >= 0) {
    OrbitCursor c(f, wrap_unit(x));
    c.advance_to(n);
    return c.frac();
  }
  double y = wrap_unit(x);
  for (std::int64_t k = 0; k < -n; ++k) y = f.inverse(y, tol);
  return y;
}

/// Zeros of F' in [0, 1) with their orders.
inline std::vector<CriticalPoint> critical_points(const AnalyticCircleMap& f, double tol = 1e-8) {
  if (f.min_slope() < -tol) {
    throw NotHomeomorphism("critical_points: min F' = " + std::to_string(f.min_slope()));
  }
  std::vector<CriticalPoint> out;
  if (f.terms().degree() == 0) return out;
  constexpr int n = kSlopeGrid;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = f.slope(static_cast<double>(i) / n);
  for (int i = 0; i < n; ++i) {
    const double left = g[(i + n - 1) % n];
    const double right = g[(i + 1) % n];
    if (!(g[i] < left && g[i] <= right)) continue;
    double x = f.polish_slope_minimum(static_cast<double>(i - 1) / n, static_cast<double>(i + 1) / n);
    if (f.slope(x) > g[i]) x = static_cast<double>(i) / n;
    if (f.slope(x) > tol) continue;
    x = wrap_unit(x);
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const CriticalPoint& c) { return circle_distance(c.location, x) < 1e-9; });
    if (seen) continue;
    // F' ~ |x - c|^(order - 1): read the exponent off the growth of F' over
    // two scales, symmetrized so the residual location error cancels to
    // first order. Derivative tests at x are not used because a flat zero
    // leaves x uncertain by ~eps^(1 / (order - 1)).
    constexpr double h = 4e-3;
    const double wide = f.slope(x + h) + f.slope(x - h);
    const double narrow = f.slope(x + 0.5 * h) + f.slope(x - 0.5 * h);
    const double m = std::log2(wide / narrow);
    const int zero_order = static_cast<int>(std::lround(m));
    if (zero_order % 2 != 0) {
      throw NotHomeomorphism("critical_points: F' changes sign near x = " + std::to_string(x));
    }
    CriticalPoint cp{x, std::min(zero_order + 1, 5), zero_order + 1 > 5};
    out.push_back(cp);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.location < b.location; });
  return out;
}

inline MapClass classify(const AnalyticCircleMap& f, double delta = kDefaultDelta) {
  const double m = f.min_slope();
  if (m > delta) return MapClass::Diffeomorphism;
  if (m >= -delta) return MapClass::Multicritical;
  return MapClass::NotHomeomorphism;
}

}  // namespace automorph

#endif  // AUTOMORPH_CIRCLE_MAP_HPP
