#ifndef AUTOMORPH_MEASURE_IO_HPP
#define AUTOMORPH_MEASURE_IO_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "automorph/error.hpp"
#include "automorph/grid_measure.hpp"

namespace automorph {

inline constexpr std::array<char, 4> kMeasureMagic{'A', 'M', 'U', '1'};

/// CSV rows "bin,left,weight"; lines starting with '#' are comments.
inline void write_measure_csv(std::ostream& os, const GridMeasure& mu, const std::string& comment = {}) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "bin,left,weight\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < mu.size(); ++i) os << i << ',' << mu.left(i) << ',' << mu[i] << '\n';
}

inline GridMeasure read_measure_csv(std::istream& is) {
  std::string line;
  std::vector<double> w;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line.rfind("bin", 0) == 0) continue;
    }
    std::istringstream row(line);
    std::string bin, left, weight;
    if (!std::getline(row, bin, ',') || !std::getline(row, left, ',') || !std::getline(row, weight)) {
      throw InvalidArgument("read_measure_csv: malformed row '" + line + "'");
    }
    if (std::stoull(bin) != w.size()) throw InvalidArgument("read_measure_csv: bins out of order");
    w.push_back(std::stod(weight));
  }
  return GridMeasure(std::move(w));
}

namespace detail {

inline void put_le32(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b.data(), 4);
}

inline void put_le64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int k = 0; k < 8; ++k) b[static_cast<std::size_t>(k)] = static_cast<char>((v >> (8 * k)) & 0xff);
  os.write(b.data(), 8);
}

inline std::uint64_t get_le(std::istream& is, int bytes) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), bytes);
  if (!is) throw InvalidArgument("read_measure_binary: truncated input");
  std::uint64_t v = 0;
  for (int k = bytes - 1; k >= 0; --k) v = (v << 8) | b[static_cast<std::size_t>(k)];
  return v;
}

}  // namespace detail

/// "AMU1", little-endian u32 N, then N little-endian f64 weights.
inline void write_measure_binary(std::ostream& os, const GridMeasure& mu) {
  os.write(kMeasureMagic.data(), 4);
  detail::put_le32(os, static_cast<std::uint32_t>(mu.size()));
  for (double x : mu.weights()) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    detail::put_le64(os, bits);
  }
}

inline GridMeasure read_measure_binary(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || magic != kMeasureMagic) throw InvalidArgument("read_measure_binary: bad magic");
  const auto N = static_cast<std::size_t>(detail::get_le(is, 4));
  if (!is_power_of_two(N)) throw InvalidArgument("read_measure_binary: N is not a power of two");
  std::vector<double> w(N);
  for (auto& x : w) {
    const std::uint64_t bits = detail::get_le(is, 8);
    std::memcpy(&x, &bits, sizeof x);
  }
  return GridMeasure(std::move(w));
}

inline void save_measure_csv(const std::string& path, const GridMeasure& mu, const std::string& comment = {}) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open " + path + " for writing");
  write_measure_csv(os, mu, comment);
}

inline void save_measure_binary(const std::string& path, const GridMeasure& mu) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot open " + path + " for writing");
  write_measure_binary(os, mu);
}

inline GridMeasure load_measure(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  is.clear();
  is.seekg(0);
  if (magic == kMeasureMagic) return read_measure_binary(is);
  return read_measure_csv(is);
}

}  // namespace automorph

#endif  // AUTOMORPH_MEASURE_IO_HPP
