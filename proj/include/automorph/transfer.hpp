#ifndef AUTOMORPH_TRANSFER_HPP
#define AUTOMORPH_TRANSFER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "automorph/circle_map.hpp"
#include "automorph/error.hpp"
#include "automorph/grid_measure.hpp"

namespace automorph {

enum class TransferScheme {
  /// Each bin is an atom at its midpoint; the moved atom is split linearly
  /// between the two nearest target midpoints.
  AtomTransport,
  /// Ulam-type: the moved bin interval is spread over target bins in
  /// proportion to overlap.
  CellOverlap,
};

inline std::string to_string(TransferScheme s) {
  return s == TransferScheme::AtomTransport ? "atom" : "overlap";
}

/// Weighted transfer operator on N bins. Column i holds the coupling from
/// source bin i; for s >= 0 mass moves forward under f with weight (f')^s,
/// for s < 0 it moves under f^{-1} with weight (f' o f^{-1})^{-s}.
struct TransferOperator {
  AnalyticCircleMap map;
  double s = 0.0;
  std::size_t N = 0;
  TransferScheme scheme = TransferScheme::AtomTransport;
  Eigen::SparseMatrix<double> matrix;  ///< N x N, entry (j, i) >= 0
};

namespace detail {

inline double weight_power(double slope, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(std::max(slope, 0.0), exponent);
}

/// Deposits `mass` at position y (mod 1) split linearly between midpoints.
inline void deposit_linear(std::vector<Eigen::Triplet<double>>& out, std::size_t src, double y, double mass,
                           std::size_t N) {
  const double t = wrap_unit(y) * static_cast<double>(N) - 0.5;
  const double j = std::floor(t);
  const double theta = t - j;
  const auto n = static_cast<std::int64_t>(N);
  const auto j0 = ((static_cast<std::int64_t>(j) % n) + n) % n;
  const auto j1 = (j0 + 1) % n;
  if (1.0 - theta > 0.0) out.emplace_back(static_cast<int>(j0), static_cast<int>(src), mass * (1.0 - theta));
  if (theta > 0.0) out.emplace_back(static_cast<int>(j1), static_cast<int>(src), mass * theta);
}

/// Spreads over target bins the interval [u, v] (lift coordinates, u < v,
/// v - u <= 1). weight(lo, hi) gives the mass assigned to the piece [lo, hi].
template <class WeightFn>
void deposit_overlap(std::vector<Eigen::Triplet<double>>& out, std::size_t src, double u, double v, std::size_t N,
                     WeightFn&& weight) {
  const double dN = static_cast<double>(N);
  const double shift = std::floor(u);
  u -= shift;
  v -= shift;
  auto k = static_cast<std::int64_t>(std::floor(u * dN));
  while (true) {
    const double lo = std::max(u, static_cast<double>(k) / dN);
    const double hi = std::min(v, static_cast<double>(k + 1) / dN);
    if (hi > lo) {
      const auto bin = static_cast<int>(((k % static_cast<std::int64_t>(N)) + static_cast<std::int64_t>(N)) %
                                        static_cast<std::int64_t>(N));
      const double m = weight(lo + shift, hi + shift);
      if (m > 0.0) out.emplace_back(bin, static_cast<int>(src), m);
    }
    if (static_cast<double>(k + 1) / dN >= v) break;
    ++k;
  }
}

}  // namespace detail

/// Assembles the operator for exponent s on N bins.
inline TransferOperator build_transfer(const AnalyticCircleMap& f, double s, std::size_t N,
                                       TransferScheme scheme = TransferScheme::AtomTransport) {
  if (!is_power_of_two(N)) throw InvalidArgument("build_transfer: N must be a power of two >= 2");
  if (!f.is_homeomorphism()) throw NotHomeomorphism("build_transfer: map is not a homeomorphism");
  TransferOperator op{f, s, N, scheme, Eigen::SparseMatrix<double>(static_cast<int>(N), static_cast<int>(N))};
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(scheme == TransferScheme::AtomTransport ? 2 * N : 4 * N);
  const double dN = static_cast<double>(N);

  if (scheme == TransferScheme::AtomTransport) {
    for (std::size_t i = 0; i < N; ++i) {
      const double x = (static_cast<double>(i) + 0.5) / dN;
      if (s >= 0.0) {
        detail::deposit_linear(trip, i, f.lift(x), detail::weight_power(f.slope(x), s), N);
      } else {
        const double y = f.inverse_lift(x);
        detail::deposit_linear(trip, i, y, detail::weight_power(f.slope(y), -s), N);
      }
    }
  } else {
    std::vector<double> edge(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
      const double x = static_cast<double>(i) / dN;
      edge[i] = s >= 0.0 ? f.lift(x) : f.inverse_lift(x);
    }
    if (s < 0.0) {  // keep the preimage edges monotone across the branch cut
      for (std::size_t i = 1; i <= N; ++i) {
        while (edge[i] < edge[i - 1]) edge[i] += 1.0;
      }
    }
    for (std::size_t i = 0; i < N; ++i) {
      const double u = edge[i], v = edge[i + 1];
      const double len = v - u;
      if (!(len > 0.0)) {
        // Degenerate image (critical point squeezed to one point): atom.
        const double w = s >= 0.0 ? detail::weight_power(f.slope(static_cast<double>(i) / dN + 0.5 / dN), s)
                                  : detail::weight_power(f.slope(u), -s);
        detail::deposit_linear(trip, i, u, w, N);
        continue;
      }
      if (s >= 0.0) {
        // Piece [lo, hi] of the image comes from F^{-1}([lo, hi]); weight at its midpoint.
        detail::deposit_overlap(trip, i, u, v, N, [&](double lo, double hi) {
          const double a = lo == u ? static_cast<double>(i) / dN : f.inverse_lift(lo);
          const double b = hi == v ? static_cast<double>(i + 1) / dN : f.inverse_lift(hi);
          double mid = 0.5 * (a + b);
          // inverse_lift may land one period away from the source bin.
          mid -= std::floor(mid - static_cast<double>(i) / dN + 0.5);
          return (hi - lo) / len * detail::weight_power(f.slope(mid), s);
        });
      } else {
        detail::deposit_overlap(trip, i, u, v, N, [&](double lo, double hi) {
          return (hi - lo) / len * detail::weight_power(f.slope(0.5 * (lo + hi)), -s);
        });
      }
    }
  }
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  return op;
}

/// Image T mu normalized to mass 1, together with its mass lambda before normalization.
inline std::pair<GridMeasure, double> apply(const TransferOperator& op, const GridMeasure& mu) {
  if (mu.size() != op.N) throw InvalidArgument("apply: measure and operator grids differ");
  Eigen::Map<const Eigen::VectorXd> w(mu.weights().data(), static_cast<Eigen::Index>(op.N));
  const Eigen::VectorXd out = op.matrix * w;
  const double lambda = out.sum();
  if (!(lambda > 0.0)) throw ConvergenceError("apply: image has zero total mass");
  return {GridMeasure(std::vector<double>(out.data(), out.data() + out.size())), lambda};
}

}  // namespace automorph

#endif  // AUTOMORPH_TRANSFER_HPP
