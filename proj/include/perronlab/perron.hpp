#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "direction_sets.hpp"
#include "parallel.hpp"
#include "random_stream.hpp"

namespace perronlab {

// Which (k, l) pairs the supremum runs over.
//   CapacityForm: k, l >= 1 and k + 2l <= n  (the form used by the capacity)
//   OrderedForm:  k >= 1, 1 <= l <= k and k + 2l <= n
enum class FactorVariant { CapacityForm, OrderedForm };

struct PerronTerm {
  std::size_t k = 0;
  std::size_t l = 0;
  double value = 0.0;
};

// r + 1/r with r = (u_{k+2l} - u_{k+l}) / (u_{k+l} - u_k); indices are 1-based.
inline double perron_term(std::span<const double> u, std::size_t k, std::size_t l) {
  if (k < 1 || l < 1 || k + 2 * l > u.size()) throw std::out_of_range("perron term index out of range");
  const double lower = u[k + l - 1] - u[k - 1];
  const double upper = u[k + 2 * l - 1] - u[k + l - 1];
  if (!(lower > 0.0) || !(upper > 0.0)) throw std::domain_error("zero or negative increment: sample not strictly increasing");
  return upper / lower + lower / upper;
}

inline double perron_term(const OrderedSample& u, std::size_t k, std::size_t l) { return perron_term(u.values(), k, l); }

// Supremum of perron_term over the admissible pairs, with the maximizing pair.
// Ties keep the lexicographically smallest (k, l).
inline PerronTerm perron_factor_argmax(std::span<const double> u, FactorVariant variant = FactorVariant::CapacityForm) {
  const std::size_t n = u.size();
  if (n < 3) throw std::invalid_argument("perron factor needs at least 3 values");
  PerronTerm best{0, 0, -std::numeric_limits<double>::infinity()};
  for (std::size_t k = 1; k + 2 <= n; ++k) {
    const std::size_t l_max = (n - k) / 2;
    const std::size_t l_cap = variant == FactorVariant::OrderedForm ? std::min(l_max, k) : l_max;
    for (std::size_t l = 1; l <= l_cap; ++l) {
      const double t = perron_term(u, k, l);
      if (t > best.value) best = {k, l, t};
    }
  }
  return best;
}

inline double perron_factor(std::span<const double> u, FactorVariant variant = FactorVariant::CapacityForm) {
  return perron_factor_argmax(u, variant).value;
}

inline double perron_factor(const OrderedSample& u, FactorVariant variant = FactorVariant::CapacityForm) {
  return perron_factor(u.values(), variant);
}

struct CapacityEstimate {
  unsigned N = 0;
  bool exact = false;
  double value = std::numeric_limits<double>::infinity();
  OrderedSample witness;
};

inline constexpr double kDefaultEnumerationBudget = 1e7;

// binomial(n, m) as a double, saturating to +inf.
inline double binomial(std::size_t n, std::size_t m) {
  if (m > n) return 0.0;
  m = std::min(m, n - m);
  double r = 1.0;
  for (std::size_t i = 1; i <= m; ++i) {
    r = r * static_cast<double>(n - m + i) / static_cast<double>(i);
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
  }
  return std::round(r);
}

namespace detail {

inline std::size_t subset_size(unsigned N) {
  if (N >= 20) throw std::invalid_argument("order exponent too large");
  return std::size_t{1} << N;
}

// Advances a combination (ascending indices into [0, n)) in lexicographic order.
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t m = c.size();
  std::size_t i = m;
  while (i > 0) {
    --i;
    if (c[i] < n - m + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Factor of a subset of size 2^N; for 2^N < 3 (N = 1) no pair is admissible and the value is 2.
inline double subset_factor(std::span<const double> universe, std::span<const std::size_t> idx, std::vector<double>& scratch) {
  scratch.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) scratch[i] = universe[idx[i]];
  if (scratch.size() < 3) return 2.0;
  return perron_factor(std::span<const double>(scratch));
}

inline OrderedSample pick(std::span<const double> universe, std::span<const std::size_t> idx) {
  std::vector<double> v;
  v.reserve(idx.size());
  for (auto i : idx) v.push_back(universe[i]);
  return OrderedSample(std::move(v));
}

// Unranks the r-th combination (lexicographic) of m out of n.
inline std::vector<std::size_t> unrank_combination(double r, std::size_t n, std::size_t m) {
  std::vector<std::size_t> c;
  c.reserve(m);
  std::size_t x = 0;
  for (std::size_t i = 0; i < m; ++i) {
    while (true) {
      const double block = binomial(n - x - 1, m - i - 1);
      if (r < block) break;
      r -= block;
      ++x;
    }
    c.push_back(x++);
  }
  return c;
}

}  // namespace detail

// Exact inf of G over all 2^N-element subsets, by enumeration. The witness is the
// lexicographically first minimizer, whatever the worker count.
inline CapacityEstimate capacity_exact_small(const OrderedSample& universe, unsigned N, double budget = kDefaultEnumerationBudget, Workers workers = {}) {
  const std::size_t m = detail::subset_size(N);
  const std::size_t n = universe.size();
  if (n < m) throw std::invalid_argument("universe smaller than 2^N");
  const double total = binomial(n, m);
  if (!(total <= budget)) throw std::length_error("enumeration budget exceeded; use capacity_search");

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx;
  };
  const auto count = static_cast<std::size_t>(total);
  auto parts = parallel_chunks(workers, count, [&](std::size_t, std::size_t b, std::size_t e) {
    Best best;
    if (b >= e) return best;
    auto c = detail::unrank_combination(static_cast<double>(b), n, m);
    std::vector<double> scratch;
    for (std::size_t r = b; r < e; ++r) {
      const double g = detail::subset_factor(universe.values(), c, scratch);
      if (g < best.value) best = {g, c};
      if (r + 1 < e) detail::next_combination(c, n);
    }
    return best;
  });
  Best best;
  for (auto& p : parts)
    if (p.value < best.value) best = std::move(p);
  return {N, true, best.value, detail::pick(universe.values(), best.idx)};
}

enum class SearchStrategy { Greedy, SwapLocalSearch };

struct SearchOptions {
  SearchStrategy strategy = SearchStrategy::SwapLocalSearch;
  std::uint64_t seed = 0;
  // Maximum number of subset evaluations.
  std::uint64_t budget = 200000;
};

namespace detail {

// Greedy growth from every starting pair (within budget): repeatedly add the element
// that keeps G smallest.
inline std::pair<double, std::vector<std::size_t>> greedy_capacity(std::span<const double> u, std::size_t m, std::uint64_t& evals, std::uint64_t budget) {
  const std::size_t n = u.size();
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_idx;
  std::vector<double> scratch;
  for (std::size_t i = 0; i + 1 < n && evals < budget; ++i) {
    for (std::size_t j = i + 1; j < n && evals < budget; ++j) {
      std::vector<std::size_t> cur{i, j};
      while (cur.size() < m) {
        double step_value = std::numeric_limits<double>::infinity();
        std::size_t step_pick = n;
        for (std::size_t c = 0; c < n; ++c) {
          if (std::find(cur.begin(), cur.end(), c) != cur.end()) continue;
          auto trial = cur;
          trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
          const double g = subset_factor(u, trial, scratch);
          ++evals;
          if (g < step_value) {
            step_value = g;
            step_pick = c;
          }
        }
        cur.insert(std::upper_bound(cur.begin(), cur.end(), step_pick), step_pick);
      }
      const double g = subset_factor(u, cur, scratch);
      ++evals;
      if (g < best_value) {
        best_value = g;
        best_idx = cur;
      }
    }
  }
  return {best_value, best_idx};
}

// First-improvement swap descent: replace one chosen element by one unchosen element.
inline double swap_descent(std::span<const double> u, std::vector<std::size_t>& cur, std::uint64_t& evals, std::uint64_t budget) {
  const std::size_t n = u.size();
  std::vector<double> scratch;
  std::vector<char> chosen(n, 0);
  for (auto i : cur) chosen[i] = 1;
  double value = subset_factor(u, cur, scratch);
  ++evals;
  bool improved = true;
  while (improved && evals < budget) {
    improved = false;
    for (std::size_t p = 0; p < cur.size() && !improved && evals < budget; ++p) {
      for (std::size_t c = 0; c < n && evals < budget; ++c) {
        if (chosen[c]) continue;
        auto trial = cur;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(p));
        trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
        const double g = subset_factor(u, trial, scratch);
        ++evals;
        if (g < value) {
          chosen[cur[p]] = 0;
          chosen[c] = 1;
          cur = std::move(trial);
          value = g;
          improved = true;
          break;
        }
      }
    }
  }
  return value;
}

}  // namespace detail

// Heuristic upper bound on the inf of G over 2^N-subsets, for universes too large to
// enumerate. Deterministic for a given seed. Swap search starts from the greedy
// solution, then restarts from seeded random subsets until the budget is spent.
inline CapacityEstimate capacity_search(const OrderedSample& universe, unsigned N, const SearchOptions& options = {}) {
  const std::size_t m = detail::subset_size(N);
  const std::size_t n = universe.size();
  if (n < m) throw std::invalid_argument("universe smaller than 2^N");
  const auto u = universe.values();
  if (m < 3) return {N, false, 2.0, OrderedSample(std::vector<double>(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(m)))};
  std::uint64_t evals = 0;
  // Greedy gets at most half the budget when followed by swap search.
  const std::uint64_t greedy_budget = options.strategy == SearchStrategy::Greedy ? options.budget : options.budget / 2;
  auto [best_value, best_idx] = detail::greedy_capacity(u, m, evals, greedy_budget);
  if (best_idx.empty()) {
    best_idx.resize(m);
    std::iota(best_idx.begin(), best_idx.end(), std::size_t{0});
    std::vector<double> scratch;
    best_value = detail::subset_factor(u, best_idx, scratch);
  }
  if (options.strategy == SearchStrategy::SwapLocalSearch) {
    best_value = detail::swap_descent(u, best_idx, evals, options.budget);
    const RandomStream rng(options.seed);
    std::uint64_t draw = 0;
    std::vector<std::size_t> perm(n);
    while (evals < options.budget) {
      // Partial Fisher-Yates for a uniformly random m-subset.
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.value(++draw) * static_cast<double>(n - i));
        std::swap(perm[i], perm[std::min(j, n - 1)]);
      }
      std::vector<std::size_t> cur(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
      std::sort(cur.begin(), cur.end());
      const double g = detail::swap_descent(u, cur, evals, options.budget);
      if (g < best_value || (g == best_value && cur < best_idx)) {
        best_value = g;
        best_idx = cur;
      }
    }
  }
  return {N, false, best_value, detail::pick(u, best_idx)};
}

}  // namespace perronlab
