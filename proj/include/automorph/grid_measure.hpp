#ifndef AUTOMORPH_GRID_MEASURE_HPP
#define AUTOMORPH_GRID_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "automorph/circle_map.hpp"
#include "automorph/error.hpp"

namespace automorph {

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

/// Probability measure on the circle stored as weights on N equal bins; bin i
/// covers [i/N, (i+1)/N) and is treated as an atom at its midpoint.
class GridMeasure {
 public:
  GridMeasure() = default;

  /// Takes nonnegative weights with positive total and normalizes them.
  explicit GridMeasure(std::vector<double> weights) : w_(std::move(weights)) {
    if (!is_power_of_two(w_.size())) {
      throw InvalidArgument("GridMeasure: bin count must be a power of two >= 2, got " + std::to_string(w_.size()));
    }
    double total = 0.0;
    for (double x : w_) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("GridMeasure: weights must be finite and >= 0");
      total += x;
    }
    if (!(total > 0.0)) throw InvalidArgument("GridMeasure: total mass must be positive");
    // Already-normalized input is kept bit-for-bit (exact file round trips).
    if (std::abs(total - 1.0) > 1e-13) {
      for (double& x : w_) x /= total;
    }
  }

  std::size_t size() const { return w_.size(); }
  const std::vector<double>& weights() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }
  double midpoint(std::size_t i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(w_.size()); }
  double left(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(w_.size()); }
  double mass() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }

  /// sum_i w_i phi(midpoint_i)
  template <class Fn>
  double integrate(Fn&& phi) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) acc += w_[i] * phi(midpoint(i));
    return acc;
  }

 private:
  std::vector<double> w_;
};

inline GridMeasure lebesgue(std::size_t N) {
  if (!is_power_of_two(N)) throw InvalidArgument("lebesgue: N must be a power of two >= 2");
  return GridMeasure(std::vector<double>(N, 1.0));
}

/// Unit mass in the bin containing x mod 1.
inline GridMeasure dirac(double x, std::size_t N) {
  if (!is_power_of_two(N)) throw InvalidArgument("dirac: N must be a power of two >= 2");
  std::vector<double> w(N, 0.0);
  auto i = static_cast<std::size_t>(std::floor(wrap_unit(x) * static_cast<double>(N)));
  w[std::min(i, N - 1)] = 1.0;
  return GridMeasure(std::move(w));
}

/// Refines to M = N * 2^j bins by splitting each bin evenly.
inline GridMeasure resample(const GridMeasure& mu, std::size_t M) {
  const std::size_t N = mu.size();
  if (M == N) return mu;
  if (M < N || M % N != 0) throw InvalidArgument("resample: can only split bins into a finer power-of-two grid");
  const std::size_t r = M / N;
  std::vector<double> w(M);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < r; ++j) w[i * r + j] = mu[i] / static_cast<double>(r);
  }
  return GridMeasure(std::move(w));
}

/// Merges groups of bins down to M bins.
inline GridMeasure coarsen(const GridMeasure& mu, std::size_t M) {
  const std::size_t N = mu.size();
  if (M == N) return mu;
  if (M > N || N % M != 0 || !is_power_of_two(M)) throw InvalidArgument("coarsen: target must divide N");
  const std::size_t r = N / M;
  std::vector<double> w(M, 0.0);
  for (std::size_t i = 0; i < N; ++i) w[i / r] += mu[i];
  return GridMeasure(std::move(w));
}

/// Circular 1-Wasserstein distance between atoms at bin midpoints:
/// (1/N) sum_i |G_i - t| with G the cumulative difference and t its median.
/// Grids of different size are compared after splitting the coarser one.
inline double kr_distance(const GridMeasure& mu, const GridMeasure& nu) {
  if (mu.size() != nu.size()) {
    const std::size_t M = std::max(mu.size(), nu.size());
    return kr_distance(resample(mu, M), resample(nu, M));
  }
  const std::size_t N = mu.size();
  std::vector<double> G(N);
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    acc += mu[i] - nu[i];
    G[i] = acc;
  }
  std::vector<double> sorted = G;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(N / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double t = *mid;
  double d = 0.0;
  for (double g : G) d += std::abs(g - t);
  return d / static_cast<double>(N);
}

inline double max_atom(const GridMeasure& mu) {
  return *std::max_element(mu.weights().begin(), mu.weights().end());
}

}  // namespace automorph

#endif  // AUTOMORPH_GRID_MEASURE_HPP
