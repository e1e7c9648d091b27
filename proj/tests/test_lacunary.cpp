#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "perronlab/io.hpp"
#include "perronlab/lacunary.hpp"

using namespace perronlab;

namespace {

// Certificate for {pi/2^k + pi/4^l : 1 <= l <= k <= K}: top skeleton pi/2^m toward 0,
// and inside every gap the points themselves, which sit at power-of-two distances from
// the gap's lower end.
LacunaryCertificate two_level_certificate(const std::vector<double>& omega, int K) {
  LacunaryCertificate top{0.0, 0.5, {}, {}};
  for (int m = 0; m <= K; ++m) top.skeleton.push_back(std::ldexp(kPi, -m));
  for (int m = K; m >= 1; --m) {
    const double lo = std::ldexp(kPi, -m), hi = std::ldexp(kPi, -(m - 1));
    std::vector<double> inside;
    for (double x : omega)
      if (x > lo && x < hi && !nearly_equal(x, lo) && !nearly_equal(x, hi)) inside.push_back(x);
    std::sort(inside.rbegin(), inside.rend());
    LacunaryCertificate child;
    if (inside.size() >= 2) {
      // Sums like pi/4 + pi/8 round, so allow a ratio slightly above 1/2.
      child = {lo, 0.55, inside, {}};
      child.children.resize(inside.size() - 1);
    }
    top.children.push_back(child);
  }
  return top;
}

std::vector<double> two_level_set(int K) {
  std::set<double> s;
  for (int k = 1; k <= K; ++k)
    for (int l = 1; l <= k; ++l) s.insert(std::ldexp(kPi, -k) + std::ldexp(kPi, -2 * l));
  return {s.begin(), s.end()};
}

}  // namespace

TEST(LacunarySequence, PaperExamples) {
  std::vector<double> pow2, fact;
  for (int k = 2; k <= 10; ++k) pow2.push_back(std::ldexp(1.0, -k));
  double f = 6.0;
  for (int k = 4; k <= 9; ++k) fact.push_back(1.0 / (f *= k));
  EXPECT_TRUE(is_lacunary_sequence(pow2, 0.0, 0.5));
  EXPECT_TRUE(is_lacunary_sequence(fact, 0.0, 0.5));
  const std::vector<double> slow{1.0, 0.9, 0.85};
  EXPECT_FALSE(is_lacunary_sequence(slow, 0.0, 0.5));
}

TEST(LacunarySequence, InputErrors) {
  const std::vector<double> s{1.0};
  EXPECT_THROW(is_lacunary_sequence(s, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(is_lacunary_sequence(s, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(is_lacunary_sequence({}, 0.0, 0.5), std::invalid_argument);
  EXPECT_TRUE(is_lacunary_sequence(s, 0.0, 0.5));
}

TEST(OrderCertificate, SingletonIsOrderZero) {
  const std::vector<double> one{0.3};
  EXPECT_TRUE(verify_order_certificate(one, {}, 0).valid);
  const std::vector<double> two{0.3, 0.4};
  EXPECT_FALSE(verify_order_certificate(two, {}, 0).valid);
}

TEST(OrderCertificate, TwoLevelSetIsOrderTwo) {
  const auto omega = two_level_set(6);
  const auto cert = two_level_certificate(omega, 6);
  EXPECT_EQ(certificate_depth(cert), 2u);
  const auto r = verify_order_certificate(omega, cert, 2);
  EXPECT_TRUE(r.valid) << r.reason;
  EXPECT_FALSE(verify_order_certificate(omega, cert, 1).valid);
}

TEST(OrderCertificate, ArithmeticSetFailsWithHalfRatio) {
  const std::vector<double> omega{1, 2, 3, 4};
  LacunaryCertificate toward_zero{0.0, 0.5, {4, 3, 2, 1}, {}};
  toward_zero.children.resize(3);
  EXPECT_FALSE(verify_order_certificate(omega, toward_zero, 1).valid);
  LacunaryCertificate toward_five{5.0, 0.5, {1, 2, 3, 4}, {}};
  toward_five.children.resize(3);
  EXPECT_FALSE(verify_order_certificate(omega, toward_five, 1).valid);
}

TEST(OrderCertificate, UncoveredPointFails) {
  const std::vector<double> omega{0.25, 0.5, 2.0};
  LacunaryCertificate c{0.0, 0.5, {1.0, 0.5, 0.25}, {}};
  c.children.resize(2);
  const auto r = verify_order_certificate(omega, c, 1);
  EXPECT_FALSE(r.valid);
  EXPECT_NE(r.reason.find("not covered"), std::string::npos);
}

TEST(OrderCertificate, MalformedStructureThrows) {
  const std::vector<double> omega{0.5};
  LacunaryCertificate c{0.0, 0.5, {1.0, 0.5}, {}};
  EXPECT_THROW(verify_order_certificate(omega, c, 1), std::invalid_argument);
  c.children.resize(1);
  c.lambda = 1.5;
  EXPECT_THROW(verify_order_certificate(omega, c, 1), std::invalid_argument);
}

TEST(OrderCertificate, TrivialCertificateCoversAnyFiniteSet) {
  const std::vector<double> omega{3.0, 1.0, 2.5, 7.0, 7.5};
  const auto c = trivial_certificate(omega);
  EXPECT_EQ(certificate_depth(c), 1u);
  EXPECT_TRUE(verify_order_certificate(omega, c, 1).valid);
}

TEST(OrderCertificate, JsonRoundTrip) {
  const auto omega = two_level_set(4);
  const auto cert = two_level_certificate(omega, 4);
  const auto back = certificate_from_json(json::parse(to_json(cert).dump()));
  EXPECT_EQ(to_json(back), to_json(cert));
  EXPECT_TRUE(verify_order_certificate(omega, back, 2).valid);
}
