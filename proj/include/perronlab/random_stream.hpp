#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace perronlab {

inline constexpr const char* kStreamAlgorithm = "splitmix64-counter";

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Top 53 bits shifted to the cell midpoint: never 0, never 1.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// The i.i.d. uniforms X_1, X_2, ... as a random-access sequence.
//
// X_k is the k-th output of SplitMix64 seeded with `seed`: the generator state
// after k steps is seed + k * gamma, so any index can be evaluated without
// producing the prefix. Values lie in the open interval (0, 1).
class RandomStream {
 public:
  constexpr explicit RandomStream(std::uint64_t seed) noexcept : seed_(seed) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }

  constexpr double value(std::uint64_t k) const {
    if (k == 0) throw std::invalid_argument("stream index must be >= 1");
    return detail::to_open_unit(detail::splitmix_mix(seed_ + k * detail::kGoldenGamma));
  }

  constexpr double operator()(std::uint64_t k) const { return value(k); }

  // Independent stream for a sub-experiment (Monte Carlo trial, worker, ...).
  constexpr RandomStream substream(std::uint64_t id) const noexcept {
    return RandomStream(detail::splitmix_mix(detail::splitmix_mix(seed_ ^ 0xD1B54A32D192ED03ULL) + id * detail::kGoldenGamma));
  }

 private:
  std::uint64_t seed_;
};

inline double stream_value(const RandomStream& stream, std::uint64_t k) { return stream.value(k); }

// Anything that maps an index k >= 1 to a value in (0, 1].
template <typename S>
concept UniformSource = requires(const S& s, std::uint64_t k) {
  { s.value(k) } -> std::convertible_to<double>;
};

// Test double: X_k == c for every k (c = 1 gives the unperturbed sets).
class ConstantStream {
 public:
  explicit ConstantStream(double c) : c_(c) {
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("constant stream value must lie in (0, 1]");
  }
  double value(std::uint64_t k) const {
    if (k == 0) throw std::invalid_argument("stream index must be >= 1");
    return c_;
  }

 private:
  double c_;
};

// Test double backed by an arbitrary function of k.
class FunctionStream {
 public:
  explicit FunctionStream(std::function<double(std::uint64_t)> f) : f_(std::move(f)) {}
  double value(std::uint64_t k) const {
    if (k == 0) throw std::invalid_argument("stream index must be >= 1");
    return f_(k);
  }

 private:
  std::function<double(std::uint64_t)> f_;
};

}  // namespace perronlab
