#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "random_stream.hpp"

namespace perronlab {

inline constexpr double kPi = std::numbers::pi;

// Two direction (or inverse) values closer than this, relatively, are the same value.
inline constexpr double kDuplicateTolerance = 0x1.0p-40;

inline bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kDuplicateTolerance * std::max(std::abs(a), std::abs(b));
}

enum class Generator { Lin, Lac, SinLin, SinLac, RandLin, RandLac };

inline std::string_view generator_name(Generator g) {
  switch (g) {
    case Generator::Lin: return "lin";
    case Generator::Lac: return "lac";
    case Generator::SinLin: return "sin-lin";
    case Generator::SinLac: return "sin-lac";
    case Generator::RandLin: return "rand-lin";
    case Generator::RandLac: return "rand-lac";
  }
  return "?";
}

inline Generator parse_generator(std::string_view id) {
  for (auto g : {Generator::Lin, Generator::Lac, Generator::SinLin, Generator::SinLac, Generator::RandLin, Generator::RandLac})
    if (generator_name(g) == id) return g;
  throw std::invalid_argument("unknown generator id: " + std::string(id));
}

inline bool is_random(Generator g) { return g == Generator::RandLin || g == Generator::RandLac; }

struct GeneratorSpec {
  Generator gen = Generator::Lin;
  std::uint64_t count = 1;
  std::optional<std::uint64_t> seed;
};

struct Provenance {
  std::string generator;
  std::optional<std::uint64_t> seed;
  std::uint64_t first_index = 1;
  std::uint64_t last_index = 0;
};

// One direction together with the index it came from. `inverse` is pi/angle,
// evaluated from the closed form when the generator has one (k/X_k, 2^k/X_k, ...)
// so it matches the inverse-set formulas bit for bit. It is +inf when the value
// does not fit in a double.
struct Direction {
  std::uint64_t index = 0;
  double angle = 0.0;
  double inverse = 0.0;
  // X_k for random generators, 1 otherwise.
  double stream_value = 1.0;
};

// Finite set of directions with its provenance. Angles are positive and at most pi.
class DirectionSample {
 public:
  DirectionSample() = default;
  DirectionSample(std::vector<Direction> entries, Provenance provenance)
      : entries_(std::move(entries)), provenance_(std::move(provenance)) {
    validate();
  }

  // A sample from bare angles (user supplied, no closed-form inverse).
  static DirectionSample from_angles(std::span<const double> angles, std::string label = "custom") {
    std::vector<Direction> entries;
    entries.reserve(angles.size());
    std::uint64_t i = 0;
    for (double a : angles) entries.push_back({++i, a, kPi / a, 1.0});
    return DirectionSample(std::move(entries), Provenance{std::move(label), std::nullopt, 1, i});
  }

  std::span<const Direction> entries() const { return entries_; }
  const Provenance& provenance() const { return provenance_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::vector<double> angles() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.angle);
    return out;
  }

 private:
  void validate() const {
    for (const auto& e : entries_) {
      // Underflowed angles (2^-k for huge k) are allowed as long as the inverse is carried.
      if (!(e.angle >= 0.0) || e.angle > kPi || (e.angle == 0.0 && !(e.inverse > 0.0)))
        throw std::invalid_argument("direction out of (0, pi]");
    }
    std::vector<double> sorted;
    for (const auto& e : entries_)
      if (e.angle > 0.0 && std::isnormal(e.angle)) sorted.push_back(e.angle);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (nearly_equal(sorted[i - 1], sorted[i])) throw std::invalid_argument("duplicate direction values");
  }

  std::vector<Direction> entries_;
  Provenance provenance_;
};

// Strictly increasing finite sequence of positive reals (a truncation of Omega^{-1}).
class OrderedSample {
 public:
  OrderedSample() = default;
  explicit OrderedSample(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) throw std::invalid_argument("ordered sample value is not finite");
      if (i > 0 && !(values_[i - 1] < values_[i])) throw std::invalid_argument("ordered sample is not strictly increasing");
    }
  }

  // Sorts first; still rejects repeated values.
  static OrderedSample from_unsorted(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return OrderedSample(std::move(values));
  }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool operator==(const OrderedSample&) const = default;

 private:
  std::vector<double> values_;
};

namespace detail {

// Past 2^4096 every double is already 0 or inf.
inline int clamp_exponent(std::uint64_t n) { return static_cast<int>(std::min<std::uint64_t>(n, 4096)); }

inline Direction deterministic_direction(Generator g, std::uint64_t n) {
  const double dn = static_cast<double>(n);
  switch (g) {
    case Generator::Lin: return {n, kPi / dn, dn, 1.0};
    case Generator::Lac: {
      const int e = clamp_exponent(n);
      return {n, std::ldexp(kPi, -e), std::ldexp(1.0, e), 1.0};
    }
    case Generator::SinLin: {
      const double s = std::sin(dn);
      return {n, kPi * s / dn, dn / s, 1.0};
    }
    case Generator::SinLac: {
      const double s = std::sin(dn);
      const int e = clamp_exponent(n);
      return {n, std::ldexp(kPi * s, -e), std::ldexp(1.0 / s, e), 1.0};
    }
    default: break;
  }
  throw std::logic_error("not a deterministic generator");
}

template <UniformSource S>
Direction random_direction(Generator g, std::uint64_t k, const S& stream) {
  const double x = stream.value(k);
  const int e = clamp_exponent(k);
  if (g == Generator::RandLin) {
    const double dk = static_cast<double>(k);
    return {k, kPi * x / dk, dk / x, x};
  }
  return {k, std::ldexp(kPi * x, -e), std::ldexp(1.0 / x, e), x};
}

inline bool keeps_index(Generator g, std::uint64_t n) {
  if (g == Generator::SinLin || g == Generator::SinLac) return std::sin(static_cast<double>(n)) > 0.0;
  return true;
}

}  // namespace detail

// Random generators with an explicit source of X_k (a RandomStream or a test double).
template <UniformSource S>
DirectionSample generate_with_stream(Generator gen, std::uint64_t count, const S& stream, std::optional<std::uint64_t> seed_label = std::nullopt) {
  if (!is_random(gen)) throw std::invalid_argument("generator does not take a stream");
  if (count == 0) throw std::invalid_argument("count must be >= 1");
  std::vector<Direction> entries;
  entries.reserve(count);
  for (std::uint64_t k = 1; k <= count; ++k) entries.push_back(detail::random_direction(gen, k, stream));
  return DirectionSample(std::move(entries), Provenance{std::string(generator_name(gen)), seed_label, 1, count});
}

// First `count` directions of the named set, in index order. The sin-based sets keep
// only indices n with sin(n) > 0, so `count` counts kept directions and the provenance
// records the last index scanned.
inline DirectionSample generate(const GeneratorSpec& spec) {
  if (spec.count == 0) throw std::invalid_argument("count must be >= 1");
  if (is_random(spec.gen)) {
    if (!spec.seed) throw std::invalid_argument("random generator requires a seed");
    return generate_with_stream(spec.gen, spec.count, RandomStream(*spec.seed), spec.seed);
  }
  if (spec.seed) throw std::invalid_argument("deterministic generator does not take a seed");
  std::vector<Direction> entries;
  entries.reserve(spec.count);
  std::uint64_t n = 0;
  while (entries.size() < spec.count) {
    ++n;
    if (detail::keeps_index(spec.gen, n)) entries.push_back(detail::deterministic_direction(spec.gen, n));
  }
  return DirectionSample(std::move(entries), Provenance{std::string(generator_name(spec.gen)), std::nullopt, 1, n});
}

// Omega^{-1} = pi / Omega, ordered increasingly.
inline OrderedSample invert(const DirectionSample& sample) {
  std::vector<double> inv;
  inv.reserve(sample.size());
  for (const auto& e : sample.entries()) {
    if (!(e.inverse > 0.0)) throw std::invalid_argument("direction values must be positive");
    if (!std::isfinite(e.inverse)) throw std::overflow_error("inverse value exceeds double range; use exponent arithmetic");
    inv.push_back(e.inverse);
  }
  std::sort(inv.begin(), inv.end());
  for (std::size_t i = 1; i < inv.size(); ++i)
    if (nearly_equal(inv[i - 1], inv[i])) throw std::invalid_argument("degenerate sample: duplicate values after inversion");
  return OrderedSample(std::move(inv));
}

// The map u -> pi/u on inverse sets; invert(invert(S)) gives back the sorted angles.
inline OrderedSample invert(const OrderedSample& sample) {
  std::vector<double> out;
  out.reserve(sample.size());
  for (double u : sample.values()) {
    if (!(u > 0.0)) throw std::invalid_argument("values must be positive");
    out.push_back(kPi / u);
  }
  return OrderedSample::from_unsorted(std::move(out));
}

inline OrderedSample sorted_angles(const DirectionSample& sample) { return OrderedSample::from_unsorted(sample.angles()); }

}  // namespace perronlab
