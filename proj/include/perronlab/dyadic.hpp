#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "random_stream.hpp"

namespace perronlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

inline void check_subdivision(unsigned N) {
  if (N < 1 || N > 6) throw std::invalid_argument("subdivision exponent N must lie in [1, 6]");
}

// I_{d,l} = [2^d (1 + (l-1)/2^N), 2^d (1 + l/2^N)], 1 <= l <= 2^N.
inline Interval dyadic_subinterval(int d, std::uint64_t l, unsigned N) {
  if (N > 62) throw std::invalid_argument("N too large");
  const std::uint64_t parts = std::uint64_t{1} << N;
  if (l < 1 || l > parts) throw std::out_of_range("subinterval index l out of [1, 2^N]");
  const double p = static_cast<double>(parts);
  return {std::ldexp(1.0 + static_cast<double>(l - 1) / p, d), std::ldexp(1.0 + static_cast<double>(l) / p, d)};
}

inline Interval dyadic_interval(int d) { return {std::ldexp(1.0, d), std::ldexp(1.0, d + 1)}; }

// Where 2^k / X_k falls, computed without forming 2^k: with 1/X = m 2^e (m in [0.5, 1)),
// the point is 2^d (1 + t) for d = k + e - 1 and t = 2m - 1 in [0, 1).
struct DyadicPoint {
  std::uint64_t k = 0;
  std::int64_t d = 0;
  double t = 0.0;
  // 1 + t, the point divided by 2^d (exact).
  double normalized() const { return 1.0 + t; }
};

inline DyadicPoint locate_inverse_point(std::uint64_t k, double x) {
  int e = 0;
  const double m = std::frexp(1.0 / x, &e);
  return {k, static_cast<std::int64_t>(k) + e - 1, 2.0 * m - 1.0};
}

// Subinterval of I_d holding normalized position t; shared endpoints go to the lower l.
inline std::uint64_t subinterval_of(double t, unsigned N) {
  const double s = std::ldexp(t, static_cast<int>(N));
  if (s <= 0.0) return 1;
  return static_cast<std::uint64_t>(std::ceil(s));
}

inline std::uint64_t full_mask(unsigned N) {
  const std::uint64_t parts = std::uint64_t{1} << N;
  return parts == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << parts) - 1;
}

// Bit l-1 of masks[d] is set when some point 2^k / X_k (k <= d_max) lies in I_{d,l}.
// Points with k > d lie above 2^k > 2^d, so k <= d_max sees every point of I_d for d <= d_max.
template <UniformSource S>
std::vector<std::uint64_t> dyadic_fill_masks(const S& stream, unsigned N, std::uint64_t d_max) {
  check_subdivision(N);
  std::vector<std::uint64_t> masks(d_max + 1, 0);
  for (std::uint64_t k = 1; k <= d_max; ++k) {
    const auto p = locate_inverse_point(k, stream.value(k));
    if (p.d < 0 || static_cast<std::uint64_t>(p.d) > d_max) continue;
    masks[static_cast<std::size_t>(p.d)] |= std::uint64_t{1} << (subinterval_of(p.t, N) - 1);
  }
  return masks;
}

}  // namespace perronlab
