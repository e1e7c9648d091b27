#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "parallel.hpp"
#include "random_stream.hpp"

namespace perronlab {

// p_{N,l} = P(2^(d-l) / X_{d-l} in I_{d,l}) = 2^-l ((1 + (l-1)/2^N)^-1 - (1 + l/2^N)^-1).
inline double p_analytic(unsigned N, std::uint64_t l) {
  check_subdivision(N);
  const std::uint64_t parts = std::uint64_t{1} << N;
  if (l < 1 || l > parts) throw std::out_of_range("l out of [1, 2^N]");
  const double p = static_cast<double>(parts);
  const double lo = 1.0 + static_cast<double>(l - 1) / p;
  const double hi = 1.0 + static_cast<double>(l) / p;
  // 1/lo - 1/hi = (hi - lo) / (lo hi) without cancellation.
  return std::ldexp((1.0 / p) / (lo * hi), -static_cast<int>(l));
}

// log of eta_N = prod_l p_{N,l}; eta itself underflows quickly.
inline double log_eta(unsigned N) {
  check_subdivision(N);
  double s = 0.0;
  for (std::uint64_t l = 1; l <= (std::uint64_t{1} << N); ++l) s += std::log(p_analytic(N, l));
  return s;
}

inline double eta(unsigned N) { return std::exp(log_eta(N)); }

// P(H_{a,N} in E_N) = 2^(-N 2^N).
inline double homogeneous_inclusion_prob(unsigned N) {
  if (N < 1 || N > 20) throw std::invalid_argument("N must lie in [1, 20]");
  return std::ldexp(1.0, -static_cast<int>(N * (1u << N)));
}

struct FrequencyEstimate {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double frequency = 0.0;
  double stderr_ = 0.0;

  static FrequencyEstimate from_counts(std::uint64_t trials, std::uint64_t hits) {
    FrequencyEstimate f{trials, hits, 0.0, 0.0};
    if (trials > 0) {
      f.frequency = static_cast<double>(hits) / static_cast<double>(trials);
      f.stderr_ = std::sqrt(f.frequency * (1.0 - f.frequency) / static_cast<double>(trials));
    }
    return f;
  }
};

// Standard error of a binomial frequency with success probability p.
inline double binomial_stderr(double p, std::uint64_t trials) { return std::sqrt(p * (1.0 - p) / static_cast<double>(trials)); }

inline constexpr double kSigmaBand = 4.0;

inline bool within_band(const FrequencyEstimate& f, double p) {
  return std::abs(f.frequency - p) <= kSigmaBand * binomial_stderr(p, f.trials);
}

namespace detail {

inline bool p_event(double x, unsigned N, std::uint64_t l) {
  // 2^(d-l)/X in I_{d,l}  <=>  2^-l / X in [1 + (l-1)/2^N, 1 + l/2^N]; d drops out.
  const double v = std::ldexp(1.0 / x, -static_cast<int>(l));
  return dyadic_subinterval(0, l, N).contains(v);
}

template <typename StreamFor>
FrequencyEstimate count_hits(std::uint64_t trials, Workers workers, StreamFor&& stream_for, auto&& event) {
  auto parts = parallel_chunks(workers, trials, [&](std::size_t, std::size_t b, std::size_t e) {
    std::uint64_t h = 0;
    for (std::size_t t = b; t < e; ++t) h += event(stream_for(t)) ? 1 : 0;
    return h;
  });
  std::uint64_t hits = 0;
  for (auto h : parts) hits += h;
  return FrequencyEstimate::from_counts(trials, hits);
}

}  // namespace detail

// Monte Carlo estimate of p_{N,l} at a fixed d, using a fresh stream per trial; the
// uniform used is X_{d-l} of that trial's stream.
template <typename StreamFor>
FrequencyEstimate mc_p_with(unsigned N, std::uint64_t l, std::uint64_t trials, std::uint64_t d, StreamFor&& stream_for, Workers workers = {}) {
  check_subdivision(N);
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (l < 1 || l > (std::uint64_t{1} << N)) throw std::out_of_range("l out of [1, 2^N]");
  if (d <= l) throw std::invalid_argument("need d - l >= 1");
  return detail::count_hits(trials, workers, stream_for, [&](const auto& s) { return detail::p_event(s.value(d - l), N, l); });
}

inline FrequencyEstimate mc_p(unsigned N, std::uint64_t l, std::uint64_t trials, std::uint64_t seed, std::uint64_t d, Workers workers = {}) {
  const RandomStream master(seed);
  return mc_p_with(N, l, trials, d, [&](std::size_t t) { return master.substream(t); }, workers);
}

// Monte Carlo estimate of P(H_{a,N} in E_N): one fresh stream per trial.
inline FrequencyEstimate mc_homogeneous_inclusion(unsigned N, std::uint64_t a, std::uint64_t trials, std::uint64_t seed, Workers workers = {}) {
  if (N < 1 || N > 20) throw std::invalid_argument("N must lie in [1, 20]");
  if (a < 1) throw std::invalid_argument("a must be >= 1");
  const double threshold = 1.0 - std::ldexp(1.0, -static_cast<int>(N));
  const std::uint64_t m = std::uint64_t{1} << N;
  const RandomStream master(seed);
  return detail::count_hits(trials, workers, [&](std::size_t t) { return master.substream(t); }, [&](const RandomStream& s) {
    for (std::uint64_t k = 1; k <= m; ++k)
      if (s.value(k * a) < threshold) return false;
    return true;
  });
}

// Fraction of d in [d_lo, d_hi] for which A_{d,N} holds on one stream.
template <UniformSource S>
FrequencyEstimate mc_event_A(const S& stream, unsigned N, std::uint64_t d_lo, std::uint64_t d_hi) {
  if (d_lo < 1 || d_hi < d_lo) throw std::invalid_argument("need 1 <= d_lo <= d_hi");
  if (d_hi > (std::uint64_t{1} << 40)) throw std::invalid_argument("d range too large");
  const auto masks = dyadic_fill_masks(stream, N, d_hi);
  const std::uint64_t full = full_mask(N);
  std::uint64_t hits = 0;
  for (std::uint64_t d = d_lo; d <= d_hi; ++d) hits += masks[d] == full ? 1 : 0;
  return FrequencyEstimate::from_counts(d_hi - d_lo + 1, hits);
}

enum class ScheduleKind { Multiplier, Extraction };

// Multiplier: a_i = 2^(2N(i+1)), i = 1..count, so a_i 2^N < a_{i+1} and the H_{a_i,N}
// are pairwise disjoint. Extraction: d_s = s (2^N + 2), so d_{s+1} - d_s > 2^N + 1
// and d_1 >= 2^N + 1. Overflowing 64 bits is an error.
inline std::vector<std::uint64_t> schedule(ScheduleKind kind, unsigned N, std::uint64_t count) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (N < 1 || N > 62) throw std::invalid_argument("N out of range");
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (kind == ScheduleKind::Multiplier) {
    for (std::uint64_t i = 1; i <= count; ++i) {
      const std::uint64_t e = 2 * N * (i + 1);
      if (e >= 64) throw std::overflow_error("multiplier schedule overflows 64-bit integers at i = " + std::to_string(i));
      out.push_back(std::uint64_t{1} << e);
    }
  } else {
    const std::uint64_t step = (std::uint64_t{1} << N) + 2;
    for (std::uint64_t s = 1; s <= count; ++s) {
      if (s > std::numeric_limits<std::uint64_t>::max() / step) throw std::overflow_error("extraction schedule overflows 64-bit integers");
      out.push_back(s * step);
    }
  }
  return out;
}

}  // namespace perronlab
