#ifndef AUTOMORPH_CONTINUED_FRACTION_HPP
#define AUTOMORPH_CONTINUED_FRACTION_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "automorph/error.hpp"

namespace automorph {

/// p/q with q >= 1.
struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;

  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  friend bool operator==(const Convergent&, const Convergent&) = default;
};

inline std::string to_string(const Convergent& c) { return std::to_string(c.p) + "/" + std::to_string(c.q); }

/// Partial quotients [k_0; k_1, k_2, ...]. A nonzero `period` marks the last
/// `period` quotients as repeating forever (golden mean = {0, 1} with period 1),
/// which is how targets of unbounded depth are supplied.
class ContinuedFraction {
 public:
  ContinuedFraction() = default;
  explicit ContinuedFraction(std::vector<std::int64_t> quotients, std::size_t period = 0, bool terminated = false)
      : quotients_(std::move(quotients)), period_(period), terminated_(terminated) {
    validate();
  }

  static ContinuedFraction golden() { return ContinuedFraction({0, 1}, 1); }
  static ContinuedFraction silver() { return ContinuedFraction({0, 2}, 1); }

  const std::vector<std::int64_t>& quotients() const { return quotients_; }
  std::size_t period() const { return period_; }
  bool is_periodic() const { return period_ > 0; }
  /// True when the expansion is known to stop (a rational number); its length is l(alpha).
  bool terminated() const { return terminated_; }
  std::size_t length() const { return quotients_.size(); }

  /// Quotient k_i, following the periodic tail where present.
  std::int64_t quotient(std::size_t i) const {
    if (i < quotients_.size()) return quotients_[i];
    if (!is_periodic()) throw InvalidArgument("quotient index past the end of a finite expansion");
    const std::size_t head = quotients_.size() - period_;
    return quotients_[head + (i - head) % period_];
  }

  /// Quotients k_0..k_{depth-1} (fewer if the expansion is finite).
  std::vector<std::int64_t> expanded(std::size_t depth) const {
    std::vector<std::int64_t> out;
    const std::size_t n = is_periodic() ? depth : std::min(depth, quotients_.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(quotient(i));
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < quotients_.size(); ++i) {
      os << quotients_[i];
      if (i == 0) os << ';';
      else if (i + 1 < quotients_.size()) os << ',';
      if (i == 0 && quotients_.size() > 1) os << ' ';
      else if (i > 0 && i + 1 < quotients_.size()) os << ' ';
    }
    if (is_periodic()) os << " ...";
    os << ']';
    return os.str();
  }

 private:
  void validate() const {
    if (quotients_.empty()) throw InvalidArgument("continued fraction needs at least k_0");
    if (quotients_[0] < 0) throw InvalidArgument("k_0 must be nonnegative");
    for (std::size_t i = 1; i < quotients_.size(); ++i) {
      if (quotients_[i] < 1) throw InvalidArgument("partial quotients k_i, i >= 1, must be >= 1");
    }
    if (period_ > 0 && period_ + 1 > quotients_.size()) {
      throw InvalidArgument("periodic tail must leave k_0 outside the period");
    }
  }

  std::vector<std::int64_t> quotients_;
  std::size_t period_ = 0;
  bool terminated_ = false;
};

/// Convergent ladder p_n/q_n = [k_0; ..., k_n] for n = 0, 1, ...; one entry per
/// available quotient, and for periodic expansions until q exceeds max_q.
inline std::vector<Convergent> convergents(const ContinuedFraction& cf,
                                           std::int64_t max_q = std::int64_t{1} << 50) {
  std::vector<Convergent> out;
  std::int64_t p2 = 0, q2 = 1;  // p_{n-2}, q_{n-2}
  std::int64_t p1 = 1, q1 = 0;  // p_{n-1}, q_{n-1}
  for (std::size_t n = 0;; ++n) {
    if (!cf.is_periodic() && n >= cf.length()) break;
    const std::int64_t k = cf.quotient(n);
    if (k > 0 && q1 > (std::numeric_limits<std::int64_t>::max() - q2) / k) break;
    const std::int64_t p = k * p1 + p2;
    const std::int64_t q = k * q1 + q2;
    if (q > max_q && !out.empty()) break;
    out.push_back({p, q});
    p2 = p1; q2 = q1;
    p1 = p; q1 = q;
  }
  return out;
}

/// Value of a (possibly truncated) expansion from its deepest convergent.
inline double cf_value(const ContinuedFraction& cf) {
  const auto ladder = convergents(cf);
  return ladder.back().value();
}

/// Partial quotients of alpha by the Gauss map x -> {1/x}. Stops early and
/// marks the result terminated when alpha is rational to within 1e-15.
inline ContinuedFraction cf_expand(double alpha, std::size_t depth) {
  if (!std::isfinite(alpha)) throw InvalidArgument("cf_expand: alpha must be finite");
  if (depth == 0) throw InvalidArgument("cf_expand: depth must be positive");
  std::vector<std::int64_t> ks;
  const double k0 = std::floor(alpha);
  ks.push_back(static_cast<std::int64_t>(k0));
  double x = alpha - k0;
  bool terminated = false;
  std::int64_t p2 = 0, q2 = 1, p1 = 1, q1 = 0;
  p2 = p1; q2 = q1;
  p1 = ks[0]; q1 = 1;
  while (ks.size() < depth) {
    if (x < 1e-15 || std::abs(alpha - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-15) {
      terminated = true;
      break;
    }
    const double y = 1.0 / x;
    double k = std::floor(y);
    // 1/x a hair below an integer is that integer (keeps rationals canonical).
    if (k + 1.0 - y < 1e-12 * y) k += 1.0;
    if (k > 1e15) { terminated = true; break; }
    ks.push_back(static_cast<std::int64_t>(k));
    x = std::max(y - k, 0.0);
    const std::int64_t p = ks.back() * p1 + p2;
    const std::int64_t q = ks.back() * q1 + q2;
    p2 = p1; q2 = q1;
    p1 = p; q1 = q;
  }
  if (!terminated && (x < 1e-15 || std::abs(alpha - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-15)) {
    terminated = true;
  }
  return ContinuedFraction(std::move(ks), 0, terminated);
}

/// Exact expansion of p/q by Euclid's algorithm (canonical form: last quotient >= 2
/// unless it is k_0).
inline ContinuedFraction cf_of_rational(std::int64_t p, std::int64_t q) {
  if (q <= 0) throw InvalidArgument("cf_of_rational: q must be positive");
  std::vector<std::int64_t> ks;
  std::int64_t a = p, b = q;
  std::int64_t k0 = a / b;
  if (a % b != 0 && a < 0) --k0;
  ks.push_back(k0);
  a -= k0 * b;
  while (a != 0) {
    std::swap(a, b);
    ks.push_back(a / b);
    a %= b;
  }
  return ContinuedFraction(std::move(ks), 0, true);
}

}  // namespace automorph

#endif  // AUTOMORPH_CONTINUED_FRACTION_HPP
