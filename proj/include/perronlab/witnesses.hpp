#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "check.hpp"
#include "direction_sets.hpp"
#include "dyadic.hpp"
#include "parallel.hpp"
#include "perron.hpp"
#include "random_stream.hpp"

namespace perronlab {

struct HomogeneousSpec {
  std::uint64_t a = 1;
  unsigned N = 1;

  std::uint64_t size() const { return std::uint64_t{1} << N; }
};

inline void validate(const HomogeneousSpec& h) {
  if (h.a < 1) throw std::invalid_argument("homogeneous set needs a >= 1");
  if (h.N < 1 || h.N > 30) throw std::invalid_argument("homogeneous set needs 1 <= N <= 30");
  if (h.a > (std::uint64_t{1} << 53) >> h.N) throw std::overflow_error("2^N * a exceeds exact double range");
}

// H_{a,N} = {a, 2a, ..., 2^N a}.
inline OrderedSample homogeneous_set(const HomogeneousSpec& h) {
  validate(h);
  std::vector<double> v;
  v.reserve(h.size());
  for (std::uint64_t k = 1; k <= h.size(); ++k) v.push_back(static_cast<double>(k * h.a));
  return OrderedSample(std::move(v));
}

// Relative perturbation eps(ka), stored by k = 1..2^N.
struct Perturbation {
  std::vector<double> eps;

  double sup_norm() const {
    double m = 0.0;
    for (double e : eps) m = std::max(m, std::abs(e));
    return m;
  }
};

// {(1 + eps(l)) l : l in H_{a,N}}.
inline OrderedSample perturbed_homogeneous(const HomogeneousSpec& h, const Perturbation& p) {
  validate(h);
  if (p.eps.size() != h.size()) throw std::invalid_argument("perturbation size must be 2^N");
  std::vector<double> v;
  v.reserve(h.size());
  for (std::uint64_t k = 1; k <= h.size(); ++k) {
    const double e = p.eps[k - 1];
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("perturbation values must be positive and finite");
    v.push_back((1.0 + e) * static_cast<double>(k * h.a));
  }
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) throw std::domain_error("perturbation destroyed the ordering");
  return OrderedSample(std::move(v));
}

// E_N restricted to [1, horizon]: indices with |X_k - 1| <= 2^-N.
template <UniformSource S>
std::vector<std::uint64_t> en_indices(const S& stream, unsigned N, std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const double threshold = 1.0 - std::ldexp(1.0, -static_cast<int>(N));
  std::vector<std::uint64_t> out;
  for (std::uint64_t k = 1; k <= horizon; ++k)
    if (stream.value(k) >= threshold) out.push_back(k);
  return out;
}

struct WitnessReport {
  std::string kind;
  unsigned N = 0;
  std::uint64_t horizon = 0;
  std::optional<std::uint64_t> seed;
  bool found = false;
  // Dyadic-filling witnesses are stored divided by 2^scale_log2 (G is scale invariant).
  OrderedSample witness;
  std::int64_t scale_log2 = 0;
  std::vector<std::uint64_t> indices;
  // Empty when the witness has fewer than 3 points (no admissible (k, l) pair).
  std::optional<double> g_value;
  std::optional<std::uint64_t> a;
  std::optional<std::int64_t> d;
  std::optional<std::int64_t> delta_log2;
  std::optional<double> eps_sup_norm;
  std::vector<Check> checks;

  bool passed() const { return all_required_pass(checks); }
};

inline bool within_ulps(double x, double y, double ulps) {
  return std::abs(x - y) <= ulps * std::numeric_limits<double>::epsilon() * std::max(std::abs(x), std::abs(y));
}

// Scans a = 1..a_max for the first H_{a,N} inside E_N and turns it into the witness
// {ka / X_ka} = H_{a,N}(eps) with 1 + eps(n) = 1 / X_n.
template <UniformSource S>
WitnessReport homogeneous_witness_search(const S& stream, unsigned N, std::uint64_t a_max, std::optional<std::uint64_t> seed = std::nullopt) {
  if (N < 1 || N > 20) throw std::invalid_argument("N must lie in [1, 20]");
  if (a_max < 1) throw std::invalid_argument("a_max must be >= 1");
  WitnessReport r;
  r.kind = "homogeneous";
  r.N = N;
  r.horizon = a_max;
  r.seed = seed;
  const std::uint64_t m = std::uint64_t{1} << N;
  const double threshold = 1.0 - std::ldexp(1.0, -static_cast<int>(N));
  std::uint64_t a = 0;
  for (std::uint64_t cand = 1; cand <= a_max; ++cand) {
    bool all = true;
    for (std::uint64_t k = 1; k <= m && all; ++k) all = stream.value(k * cand) >= threshold;
    if (all) {
      a = cand;
      break;
    }
  }
  if (a == 0) {
    r.checks.push_back({"witness_found", false, {}, {}, {}, false, "no homogeneous set inside E_N for a <= a_max"});
    return r;
  }
  r.found = true;
  r.a = a;

  std::vector<double> values;
  Perturbation eps;
  bool in_en = true;
  bool subset = true;
  bool identity = true;
  for (std::uint64_t k = 1; k <= m; ++k) {
    const std::uint64_t n = k * a;
    const double x = stream.value(n);
    in_en = in_en && std::abs(x - 1.0) <= std::ldexp(1.0, -static_cast<int>(N));
    const double u = static_cast<double>(n) / x;
    subset = subset && detail::random_direction(Generator::RandLin, n, stream).inverse == u;
    const double e = 1.0 / x - 1.0;
    identity = identity && within_ulps((1.0 + e) * static_cast<double>(n), u, 4.0);
    eps.eps.push_back(e);
    values.push_back(u);
    r.indices.push_back(n);
  }
  const bool increasing = std::is_sorted(values.begin(), values.end(), std::less_equal<>()) &&
                          std::adjacent_find(values.begin(), values.end()) == values.end();
  const double norm = eps.sup_norm();
  r.eps_sup_norm = norm;
  r.checks.push_back({"homogeneous_in_E_N", in_en, {}, {}, std::ldexp(1.0, -static_cast<int>(N)), true, ""});
  r.checks.push_back({"subset_of_inverse_sample", subset, {}, {}, 0.0, true, "witness values equal the rand-lin inverse values bit for bit"});
  r.checks.push_back({"perturbation_identity", identity, {}, {}, 4.0 * std::numeric_limits<double>::epsilon(), true, "(1 + eps(n)) n == n / X_n"});
  r.checks.push_back({"strictly_increasing", increasing, {}, {}, {}, true, ""});
  // X_k >= 1 - 2^-N only gives eps <= 2^-N / (1 - 2^-N), so this hypothesis can fail.
  r.checks.push_back({"perturbation_size_hypothesis", std::ldexp(norm, static_cast<int>(N)) <= 0.5, 0.5, std::ldexp(norm, static_cast<int>(N)), {}, false,
                      "2^N * sup|eps| <= 1/2; informational"});
  if (!increasing) return r;
  r.witness = OrderedSample(values);
  r.g_value = values.size() >= 3 ? perron_factor(r.witness) : 2.0;
  r.checks.push_back({"g_lt_6", *r.g_value < 6.0, 6.0, *r.g_value, {}, true, ""});
  return r;
}

// Picks one point per subinterval of the first completely filled I_d (d <= d_max),
// keeps the even-numbered ones and checks the spacing window [delta, 3 delta],
// delta = 2^(d-N).
template <UniformSource S>
WitnessReport dyadic_witness_search(const S& stream, unsigned N, std::uint64_t d_max, std::optional<std::uint64_t> seed = std::nullopt) {
  check_subdivision(N);
  if (d_max < 1) throw std::invalid_argument("d_max must be >= 1");
  WitnessReport r;
  r.kind = "dyadic";
  r.N = N;
  r.horizon = d_max;
  r.seed = seed;
  const auto masks = dyadic_fill_masks(stream, N, d_max);
  const std::uint64_t full = full_mask(N);
  std::optional<std::uint64_t> filled;
  for (std::uint64_t d = 1; d <= d_max; ++d)
    if (masks[d] == full) {
      filled = d;
      break;
    }
  if (!filled) {
    r.checks.push_back({"witness_found", false, {}, {}, {}, false, "no completely filled dyadic interval for d <= d_max"});
    return r;
  }
  const auto d = static_cast<std::int64_t>(*filled);
  r.found = true;
  r.d = d;
  r.scale_log2 = d;
  r.delta_log2 = d - static_cast<std::int64_t>(N);

  const std::uint64_t parts = std::uint64_t{1} << N;
  std::vector<std::optional<DyadicPoint>> rep(parts);
  for (std::uint64_t k = 1; k <= *filled; ++k) {
    const auto p = locate_inverse_point(k, stream.value(k));
    if (p.d != d) continue;
    auto& slot = rep[subinterval_of(p.t, N) - 1];
    if (!slot) slot = p;
  }

  std::vector<double> u;
  bool in_sub = true;
  bool subset = true;
  for (std::uint64_t l = 2; l <= parts; l += 2) {
    const auto& p = *rep[l - 1];
    const double v = p.normalized();
    const auto sub = dyadic_subinterval(0, l, N);
    in_sub = in_sub && sub.contains(v);
    subset = subset && std::ldexp(v, static_cast<int>(d - static_cast<std::int64_t>(p.k))) == 1.0 / stream.value(p.k);
    u.push_back(v);
    r.indices.push_back(p.k);
  }
  const double delta = std::ldexp(1.0, -static_cast<int>(N));
  bool spacing = true;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double gap = u[i + 1] - u[i];
    spacing = spacing && gap >= delta && gap <= 3.0 * delta;
  }
  r.checks.push_back({"filled_all_subintervals", true, {}, {}, {}, true, ""});
  r.checks.push_back({"points_in_subintervals", in_sub, {}, {}, {}, true, "u_2l lies in I_{d,2l}"});
  r.checks.push_back({"subset_of_inverse_sample", subset, {}, {}, 0.0, true, "2^d * witness == 2^k / X_k bit for bit"});
  r.checks.push_back({"spacing_window", spacing, {}, {}, {}, true, "consecutive gaps in [2^(d-N), 3 * 2^(d-N)]"});
  r.witness = OrderedSample(u);
  if (u.size() >= 3) {
    r.g_value = perron_factor(r.witness);
    r.checks.push_back({"g_le_6", *r.g_value <= 6.0, 6.0, *r.g_value, {}, true, ""});
  } else {
    r.checks.push_back({"g_le_6", true, 6.0, {}, {}, true, "vacuous: fewer than 3 points, no admissible (k, l)"});
  }
  return r;
}

// Summary of a randomized property run over G values.
struct PropertySummary {
  std::uint64_t trials = 0;
  double max_g = 0.0;
  std::uint64_t violations = 0;  // trials breaking the stated bound
  double bound = 0.0;
};

// Random positive eps with 2^N sup|eps| <= 1/2 on H_{a,N}; every G must stay below 6.
// Odd trials use extreme two-level perturbations, which approach the sharp bound 10/3.
inline PropertySummary verify_perturbations(unsigned N, std::uint64_t a, std::uint64_t trials, std::uint64_t seed, Workers workers = {}) {
  const HomogeneousSpec h{a, N};
  validate(h);
  const double cap = std::ldexp(0.5, -static_cast<int>(N));
  const RandomStream master(seed);
  auto parts = parallel_chunks(workers, trials, [&](std::size_t, std::size_t b, std::size_t e) {
    PropertySummary s;
    for (std::size_t t = b; t < e; ++t) {
      const auto rng = master.substream(t);
      Perturbation p;
      for (std::uint64_t k = 1; k <= h.size(); ++k) {
        const double x = rng.value(k);
        p.eps.push_back(t % 2 == 0 ? cap * (1.0 - x) : (x < 0.5 ? cap : cap * 1e-12));
      }
      const double g = h.size() >= 3 ? perron_factor(perturbed_homogeneous(h, p)) : 2.0;
      s.max_g = std::max(s.max_g, g);
      s.violations += g < 6.0 ? 0 : 1;
      ++s.trials;
    }
    return s;
  });
  PropertySummary out{0, 0.0, 0, 6.0};
  for (const auto& s : parts) {
    out.trials += s.trials;
    out.max_g = std::max(out.max_g, s.max_g);
    out.violations += s.violations;
  }
  return out;
}

// Random sets of 2^N points with consecutive gaps in [delta, 3 delta]; G stays <= 6.
inline PropertySummary verify_spacing(unsigned N, std::uint64_t trials, std::uint64_t seed, Workers workers = {}) {
  if (N < 1 || N > 16) throw std::invalid_argument("N must lie in [1, 16]");
  const std::uint64_t m = std::uint64_t{1} << N;
  const RandomStream master(seed);
  auto parts = parallel_chunks(workers, trials, [&](std::size_t, std::size_t b, std::size_t e) {
    PropertySummary s;
    std::vector<double> u(m);
    for (std::size_t t = b; t < e; ++t) {
      const auto rng = master.substream(t);
      const double delta = std::ldexp(1.0, static_cast<int>(rng.value(1) * 40.0) - 20);
      u[0] = rng.value(2) * 100.0 * delta;
      for (std::uint64_t i = 1; i < m; ++i) {
        const double x = rng.value(i + 2);
        // Odd trials pin gaps to the window ends.
        const double gap = t % 2 == 0 ? delta * (1.0 + 2.0 * x) : (x < 0.5 ? delta : 3.0 * delta);
        u[i] = u[i - 1] + gap;
      }
      const double g = m >= 3 ? perron_factor(std::span<const double>(u)) : 2.0;
      s.max_g = std::max(s.max_g, g);
      s.violations += g <= 6.0 + 1e-9 ? 0 : 1;
      ++s.trials;
    }
    return s;
  });
  PropertySummary out{0, 0.0, 0, 6.0};
  for (const auto& s : parts) {
    out.trials += s.trials;
    out.max_g = std::max(out.max_g, s.max_g);
    out.violations += s.violations;
  }
  return out;
}

}  // namespace perronlab
