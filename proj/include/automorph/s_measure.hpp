#ifndef AUTOMORPH_S_MEASURE_HPP
#define AUTOMORPH_S_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "automorph/circle_map.hpp"
#include "automorph/error.hpp"
#include "automorph/grid_measure.hpp"
#include "automorph/rotation.hpp"
#include "automorph/transfer.hpp"

namespace automorph {

enum class SolveMethod {
  /// Shifted inverse iteration: (sigma I - T) w_{k+1} = w_k with sigma just
  /// above the current Perron estimate.
  Inverse,
  /// Normalized power iteration w_{k+1} = T w_k / |T w_k|.
  Power,
};

inline std::string to_string(SolveMethod m) { return m == SolveMethod::Inverse ? "inverse" : "power"; }

struct SolveOptions {
  double tol_kr = 1e-9;
  int max_iter = 100'000;
  SolveMethod method = SolveMethod::Inverse;
  TransferScheme scheme = TransferScheme::AtomTransport;
  int residual_degree = 8;
  /// Skip the irrational rotation number check (caller already certified it).
  bool assume_irrational = false;
};

struct SMeasureSolution {
  GridMeasure measure;
  double residual = 0.0;   ///< invariance_residual at residual_degree
  int iterations = 0;
  double lambda = 1.0;     ///< mass of T mu before normalization
  double kr_gap = 0.0;     ///< KR distance between the last two iterates
  bool converged = false;

  double lambda_defect() const { return std::abs(lambda - 1.0); }
};

/// max over phi in {1, sin 2 pi k x, cos 2 pi k x : k <= degree} of the defect
/// in the defining identity, evaluated at bin midpoints directly from f:
///   s < 0:  |sum w phi(x) - sum w f'(y)^{-s} phi(y)|, y = f^{-1}(x)
///   s >= 0: |sum w phi(x) - sum w f'(x)^{s} phi(f(x))|
/// The second form is the same identity with the bounded weight.
inline double invariance_residual(const AnalyticCircleMap& f, double s, const GridMeasure& mu, int degree = 8) {
  if (degree < 0) throw InvalidArgument("invariance_residual: degree must be >= 0");
  const std::size_t N = mu.size();
  const int K = degree;
  // Row 0 is phi = 1, then (sin k, cos k) pairs.
  std::vector<double> lhs(2 * static_cast<std::size_t>(K) + 1, 0.0), rhs(lhs.size(), 0.0);
  auto accumulate = [&](std::vector<double>& acc, double x, double w) {
    acc[0] += w;
    for (int k = 1; k <= K; ++k) {
      const double th = kTwoPi * k * x;
      acc[2 * k - 1] += w * std::sin(th);
      acc[2 * k] += w * std::cos(th);
    }
  };
  for (std::size_t i = 0; i < N; ++i) {
    const double w = mu[i];
    if (w == 0.0) continue;
    const double x = mu.midpoint(i);
    accumulate(lhs, x, w);
    if (s < 0.0) {
      const double y = f.inverse_lift(x);
      accumulate(rhs, y, w * detail::weight_power(f.slope(y), -s));
    } else {
      accumulate(rhs, f.lift(x), w * detail::weight_power(f.slope(x), s));
    }
  }
  double r = 0.0;
  for (std::size_t j = 0; j < lhs.size(); ++j) r = std::max(r, std::abs(lhs[j] - rhs[j]));
  return r;
}

/// sum_i w_i v(f^{-1}(x_i)): the pairing of v with the pushforward of mu by f^{-1}.
template <class Fn>
double integrate_pullback(const GridMeasure& mu, const AnalyticCircleMap& f, Fn&& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) continue;
    acc += mu[i] * v(f.inverse(mu.midpoint(i)));
  }
  return acc;
}

inline double integrate_pullback(const GridMeasure& mu, const AnalyticCircleMap& f, const TrigPolynomial& v) {
  return integrate_pullback(mu, f, [&](double x) { return v(x); });
}

/// Histogram of f^k(0), k < n_orbit.
inline GridMeasure birkhoff_invariant_measure(const AnalyticCircleMap& f, std::size_t N, std::int64_t n_orbit) {
  if (!is_power_of_two(N)) throw InvalidArgument("birkhoff_invariant_measure: N must be a power of two >= 2");
  if (n_orbit < 1) throw InvalidArgument("birkhoff_invariant_measure: n_orbit must be positive");
  std::vector<double> counts(N, 0.0);
  const double dN = static_cast<double>(N);
  double x = 0.0;
  for (std::int64_t k = 0; k < n_orbit; ++k) {
    auto b = static_cast<std::size_t>(x * dN);
    counts[std::min(b, N - 1)] += 1.0;
    x = f.eval(x);
  }
  return GridMeasure(std::move(counts));
}

/// Partial sums S_K = sum_{k=1..K} ((f^k)'(p))^s along the forward orbit of p.
inline std::vector<double> derivative_power_series(const AnalyticCircleMap& f, double p, double s, std::int64_t K) {
  std::vector<double> sums;
  sums.reserve(static_cast<std::size_t>(std::max<std::int64_t>(K, 0)));
  double x = wrap_unit(p);
  double log_d = 0.0;
  double acc = 0.0;
  for (std::int64_t k = 1; k <= K; ++k) {
    log_d += std::log(f.slope(x));
    x = f.eval(x);
    acc += std::exp(s * log_d);
    sums.push_back(acc);
  }
  return sums;
}

namespace detail {

inline GridMeasure from_vector(const Eigen::VectorXd& v) {
  std::vector<double> w(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) w[static_cast<std::size_t>(i)] = std::max(v[i], 0.0);
  return GridMeasure(std::move(w));
}

inline Eigen::VectorXd to_vector(const GridMeasure& mu) {
  return Eigen::Map<const Eigen::VectorXd>(mu.weights().data(), static_cast<Eigen::Index>(mu.size()));
}

inline void require_irrational(const AnalyticCircleMap& f) {
  const auto rho = rotation_number(f);
  if (!rho.certified) throw InvalidArgument("solve_s_measure: rotation number could not be certified");
  if (rho.rational) {
    throw InvalidArgument("solve_s_measure: rotation number is rational (" + to_string(rho.lower) + ")");
  }
}

}  // namespace detail

/// Normalized fixed point of an assembled operator.
inline SMeasureSolution solve_fixed_point(const TransferOperator& op, const GridMeasure& init,
                                          const SolveOptions& opt = {}) {
  if (init.size() != op.N) throw InvalidArgument("solve_s_measure: init grid differs from N");
  if (!(opt.tol_kr > 0.0) || opt.max_iter < 1) throw InvalidArgument("solve_s_measure: bad tolerance or budget");
  const auto& T = op.matrix;
  const auto n = static_cast<Eigen::Index>(op.N);
  GridMeasure mu = init;
  SMeasureSolution out;

  if (opt.method == SolveMethod::Power) {
    for (int it = 1; it <= opt.max_iter; ++it) {
      auto [next, lambda] = apply(op, mu);
      out.kr_gap = kr_distance(next, mu);
      out.lambda = lambda;
      mu = std::move(next);
      out.iterations = it;
      if (out.kr_gap <= opt.tol_kr) {
        out.converged = true;
        break;
      }
    }
  } else {
    Eigen::SparseMatrix<double> I(n, n);
    I.setIdentity();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    for (int it = 1; it <= opt.max_iter; ++it) {
      const Eigen::VectorXd w = detail::to_vector(mu);
      const double lambda = (T * w).sum();
      const double sigma = lambda * (1.0 + 1e-9);
      const Eigen::SparseMatrix<double> A = sigma * I - T;
      if (!analyzed) {
        lu.analyzePattern(A);
        analyzed = true;
      }
      lu.factorize(A);
      if (lu.info() != Eigen::Success) throw ConvergenceError("solve_s_measure: sparse factorization failed");
      Eigen::VectorXd z = lu.solve(w);
      if (lu.info() != Eigen::Success || !z.allFinite()) throw ConvergenceError("solve_s_measure: solve failed");
      if (z.sum() < 0.0) z = -z;
      GridMeasure next = detail::from_vector(z);
      out.kr_gap = kr_distance(next, mu);
      mu = std::move(next);
      out.iterations = it;
      if (out.kr_gap <= opt.tol_kr) {
        out.converged = true;
        break;
      }
    }
    out.lambda = apply(op, mu).second;
  }
  out.measure = mu;
  out.residual = invariance_residual(op.map, op.s, mu, opt.residual_degree);
  return out;
}

/// The s-measure of f on N bins. Throws ConvergenceError (with the last KR
/// gap) if max_iter is reached, InvalidArgument for rational or uncertified rho.
inline SMeasureSolution solve_s_measure(const AnalyticCircleMap& f, double s, std::size_t N,
                                        const SolveOptions& opt = {},
                                        const std::optional<GridMeasure>& init = std::nullopt) {
  if (!opt.assume_irrational) detail::require_irrational(f);
  const TransferOperator op = build_transfer(f, s, N, opt.scheme);
  auto sol = solve_fixed_point(op, init ? *init : lebesgue(N), opt);
  if (!sol.converged) {
    throw ConvergenceError("solve_s_measure: no convergence after " + std::to_string(sol.iterations) +
                           " iterations, last KR gap " + std::to_string(sol.kr_gap));
  }
  return sol;
}

}  // namespace automorph

#endif  // AUTOMORPH_S_MEASURE_HPP
