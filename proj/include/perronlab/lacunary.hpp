#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "direction_sets.hpp"

namespace perronlab {

// |limit - seq[k+1]| <= lambda * |limit - seq[k]| for every consecutive pair.
inline bool is_lacunary_sequence(std::span<const double> seq, double limit, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (seq.empty()) throw std::invalid_argument("sequence must be nonempty");
  for (std::size_t k = 0; k + 1 < seq.size(); ++k)
    if (!(std::abs(limit - seq[k + 1]) <= lambda * std::abs(limit - seq[k]))) return false;
  return true;
}

// Witness that a finite set has lacunary order at most N.
//
// An empty skeleton is the order-0 leaf: the set it covers must be empty or a
// singleton. Otherwise `skeleton` is a lacunary sequence (in sequence order) toward
// `limit` with ratio `lambda`, and children[i] certifies the points strictly inside
// the i-th gap of the sorted skeleton.
struct LacunaryCertificate {
  double limit = 0.0;
  double lambda = 0.5;
  std::vector<double> skeleton;
  std::vector<LacunaryCertificate> children;

  bool is_leaf() const { return skeleton.empty(); }
};

inline std::size_t certificate_depth(const LacunaryCertificate& cert) {
  if (cert.is_leaf()) return 0;
  std::size_t d = 0;
  for (const auto& c : cert.children) d = std::max(d, certificate_depth(c));
  return d + 1;
}

struct CertificateCheck {
  bool valid = false;
  std::string reason;
};

namespace detail {

inline bool on_skeleton(double x, std::span<const double> sorted_skeleton) {
  auto it = std::lower_bound(sorted_skeleton.begin(), sorted_skeleton.end(), x);
  if (it != sorted_skeleton.end() && nearly_equal(*it, x)) return true;
  return it != sorted_skeleton.begin() && nearly_equal(*std::prev(it), x);
}

inline CertificateCheck verify_node(std::vector<double> omega, const LacunaryCertificate& cert, std::size_t order, const std::string& path) {
  if (cert.is_leaf()) {
    if (!cert.children.empty()) throw std::invalid_argument("malformed certificate at " + path + ": leaf with children");
    if (omega.size() <= 1) return {true, ""};
    return {false, path + ": base case covers " + std::to_string(omega.size()) + " points"};
  }
  if (!(cert.lambda > 0.0 && cert.lambda < 1.0)) throw std::invalid_argument("malformed certificate at " + path + ": lambda outside (0, 1)");
  std::vector<double> sorted = cert.skeleton;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (cert.children.size() + 1 != sorted.size())
    throw std::invalid_argument("malformed certificate at " + path + ": expected " + std::to_string(sorted.size() - 1) + " children, got " + std::to_string(cert.children.size()));
  if (order == 0) return {false, path + ": certificate deeper than the claimed order"};
  if (!is_lacunary_sequence(cert.skeleton, cert.limit, cert.lambda)) return {false, path + ": skeleton violates the lacunary inequality"};

  std::vector<std::vector<double>> buckets(cert.children.size());
  for (double x : omega) {
    if (on_skeleton(x, sorted)) continue;
    // Open gaps (a, b): x lands in the gap whose upper end is the first skeleton point above x.
    auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    if (it == sorted.begin() || it == sorted.end()) return {false, path + ": point " + std::to_string(x) + " not covered by any gap"};
    buckets[static_cast<std::size_t>(it - sorted.begin()) - 1].push_back(x);
  }
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    auto r = verify_node(std::move(buckets[i]), cert.children[i], order - 1, path + "/" + std::to_string(i));
    if (!r.valid) return r;
  }
  return {true, ""};
}

}  // namespace detail

// Checks that `cert` witnesses omega in Lambda(N). Mathematical failures (inequality
// violated, uncovered point, too deep) come back as valid = false with a reason;
// structural defects (wrong child count, lambda outside (0, 1)) throw.
inline CertificateCheck verify_order_certificate(std::span<const double> omega, const LacunaryCertificate& cert, std::size_t order) {
  return detail::verify_node(std::vector<double>(omega.begin(), omega.end()), cert, order, "root");
}

// Order-1 certificate that uses the (finite) set itself as skeleton, ordered toward a
// limit just below its minimum. Exists for every nonempty finite set.
inline LacunaryCertificate trivial_certificate(std::span<const double> omega) {
  if (omega.empty()) return {};
  std::vector<double> s(omega.begin(), omega.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.size() == 1) return {};
  const double spread = s.back() - s.front();
  const double limit = s.front() - spread * 1e-6;
  std::reverse(s.begin(), s.end());
  double lambda = 0.0;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) lambda = std::max(lambda, (s[k + 1] - limit) / (s[k] - limit));
  lambda = std::min(1.0 - 1e-12, lambda * (1.0 + 1e-12));
  LacunaryCertificate cert{limit, lambda, s, {}};
  cert.children.resize(s.size() - 1);
  return cert;
}

}  // namespace perronlab
