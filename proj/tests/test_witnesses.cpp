#include <gtest/gtest.h>

#include <cmath>

#include "golden_path.hpp"
#include "perronlab/witnesses.hpp"

using namespace perronlab;

namespace {

const Check* find_check(const WitnessReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST(Homogeneous, Instances) {
  EXPECT_EQ(homogeneous_set({1, 2}), OrderedSample({1, 2, 3, 4}));
  EXPECT_EQ(homogeneous_set({3, 1}), OrderedSample({3, 6}));
  EXPECT_THROW(homogeneous_set({0, 2}), std::invalid_argument);
  EXPECT_THROW(homogeneous_set({1ULL << 52, 4}), std::overflow_error);
}

TEST(Perturbed, TinyPerturbationKeepsFactorNearTwo) {
  const HomogeneousSpec h{5, 3};
  const auto p = perturbed_homogeneous(h, {std::vector<double>(8, 1e-15)});
  EXPECT_NEAR(perron_factor(p), 2.0, 1e-12);
}

TEST(Perturbed, Errors) {
  const HomogeneousSpec h{1, 1};
  EXPECT_THROW(perturbed_homogeneous(h, {{0.1}}), std::invalid_argument);
  EXPECT_THROW(perturbed_homogeneous(h, {{0.0, 0.1}}), std::invalid_argument);
  EXPECT_THROW(perturbed_homogeneous(h, {{2.0, 0.01}}), std::domain_error);
}

TEST(Perturbed, RandomSmallPerturbationsStayBelowSharpBound) {
  for (unsigned N : {1u, 2u, 3u, 5u}) {
    const auto s = verify_perturbations(N, 7, 10000, 100 + N);
    EXPECT_EQ(s.trials, 10000u);
    EXPECT_EQ(s.violations, 0u);
    EXPECT_LT(s.max_g, 6.0);
    EXPECT_LE(s.max_g, 10.0 / 3.0 + 1e-9);
  }
}

TEST(Perturbed, ExtremeTwoLevelPerturbationApproachesTenThirds) {
  // Only the second-to-last point pushed up by the full allowance: its neighbours'
  // gaps approach 1/2 and 3/2, so r + 1/r approaches 10/3.
  const unsigned N = 10;
  const double cap = std::ldexp(0.5, -static_cast<int>(N));
  std::vector<double> eps(1u << N, 1e-300);
  eps[(1u << N) - 2] = cap;
  const auto g = perron_factor(perturbed_homogeneous({1, N}, {eps}));
  EXPECT_LT(g, 10.0 / 3.0);
  EXPECT_GT(g, 10.0 / 3.0 - 1e-2);
}

TEST(Spacing, BoundedGapsKeepFactorAtMostSix) {
  for (unsigned N : {2u, 3u, 4u}) {
    const auto s = verify_spacing(N, 10000, 7 * N);
    EXPECT_EQ(s.violations, 0u);
    EXPECT_LE(s.max_g, 10.0 / 3.0 + 1e-9);
  }
}

TEST(ENIndices, ForcedStreams) {
  const auto all = en_indices(ConstantStream(1.0 - std::ldexp(1.0, -3)), 2, 50);
  ASSERT_EQ(all.size(), 50u);
  EXPECT_EQ(all.front(), 1u);
  EXPECT_EQ(all.back(), 50u);
  EXPECT_TRUE(en_indices(ConstantStream(0.5), 2, 50).empty());
}

TEST(ENIndices, BinomialCount) {
  const std::uint64_t horizon = 10000;
  const auto idx = en_indices(RandomStream(7), 1, horizon);
  const double sigma = std::sqrt(horizon * 0.25);
  EXPECT_NEAR(static_cast<double>(idx.size()), horizon / 2.0, 4.0 * sigma);
}

TEST(HomogeneousWitness, ForcedStreamFindsFirstMultiplier) {
  const ConstantStream s(1.0 - std::ldexp(1.0, -3));
  const auto r = homogeneous_witness_search(s, 2, 10);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(*r.a, 1u);
  EXPECT_TRUE(r.passed());
  EXPECT_LT(*r.g_value, 6.0);
  EXPECT_NEAR(*r.g_value, 2.0, 1e-12);
}

TEST(HomogeneousWitness, NotFoundIsReportedNotThrown) {
  const auto r = homogeneous_witness_search(ConstantStream(0.5), 2, 100);
  EXPECT_FALSE(r.found);
  EXPECT_TRUE(r.witness.values().empty());
  ASSERT_NE(find_check(r, "witness_found"), nullptr);
  EXPECT_FALSE(find_check(r, "witness_found")->required);
}

TEST(HomogeneousWitness, Seed42MatchesReference) {
  const auto& ref = oracle()["homogeneous_seed42_n2"];
  const auto r = homogeneous_witness_search(RandomStream(42), 2, 20000, 42);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(*r.a, ref["a"].get<std::uint64_t>());
  EXPECT_EQ(r.indices, ref["indices"].get<std::vector<std::uint64_t>>());
  EXPECT_EQ(r.witness, OrderedSample(ref["witness"].get<std::vector<double>>()));
  EXPECT_NEAR(*r.g_value, ref["g"].get<double>(), 1e-12);
  EXPECT_TRUE(r.passed());
  // Witness values are exactly k a / X_ka.
  const RandomStream s(42);
  for (std::size_t i = 0; i < r.indices.size(); ++i) EXPECT_EQ(r.witness[i], static_cast<double>(r.indices[i]) / s.value(r.indices[i]));
}

TEST(HomogeneousWitness, SmallNHasVacuousFactor) {
  const auto& ref = oracle()["homogeneous_seed42_n1"];
  const auto r = homogeneous_witness_search(RandomStream(42), 1, 20000, 42);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(*r.a, ref["a"].get<std::uint64_t>());
  EXPECT_EQ(*r.g_value, 2.0);
}

TEST(Dyadic, Subintervals) {
  const auto a = dyadic_subinterval(0, 1, 1);
  EXPECT_EQ(a.lo, 1.0);
  EXPECT_EQ(a.hi, 1.5);
  const auto b = dyadic_subinterval(3, 4, 2);
  EXPECT_EQ(b.lo, 14.0);
  EXPECT_EQ(b.hi, 16.0);
  for (unsigned N = 1; N <= 6; ++N) {
    const auto parts = 1u << N;
    EXPECT_EQ(dyadic_subinterval(5, 1, N).lo, dyadic_interval(5).lo);
    EXPECT_EQ(dyadic_subinterval(5, parts, N).hi, dyadic_interval(5).hi);
    for (unsigned l = 1; l < parts; ++l) EXPECT_EQ(dyadic_subinterval(5, l, N).hi, dyadic_subinterval(5, l + 1, N).lo);
  }
  EXPECT_THROW(dyadic_subinterval(0, 0, 2), std::out_of_range);
  EXPECT_THROW(dyadic_subinterval(0, 5, 2), std::out_of_range);
}

TEST(Dyadic, LocatePointMatchesDirectEvaluation) {
  const RandomStream s(3);
  for (std::uint64_t k = 1; k <= 60; ++k) {
    const double x = s.value(k);
    const auto p = locate_inverse_point(k, x);
    const double u = std::ldexp(1.0 / x, static_cast<int>(k));
    EXPECT_TRUE(dyadic_interval(static_cast<int>(p.d)).contains(u));
    EXPECT_EQ(std::ldexp(p.normalized(), static_cast<int>(p.d)), u);
  }
  EXPECT_EQ(subinterval_of(0.0, 2), 1u);
  EXPECT_EQ(subinterval_of(0.25, 2), 1u);
  EXPECT_EQ(subinterval_of(0.2500001, 2), 2u);
}

TEST(DyadicWitness, ReferenceWitnesses) {
  for (unsigned N : {1u, 2u}) {
    const auto& ref = oracle()["dyadic_seed42_n" + std::to_string(N)];
    const auto r = dyadic_witness_search(RandomStream(42), N, 100000, 42);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(*r.d, ref["d"].get<std::int64_t>());
    EXPECT_EQ(r.indices, ref["indices"].get<std::vector<std::uint64_t>>());
    EXPECT_EQ(r.witness, OrderedSample(ref["witness"].get<std::vector<double>>()));
    EXPECT_TRUE(r.passed());
  }
}

TEST(DyadicWitness, ForcedStreamFillingEverySubinterval) {
  // X_k chosen so that 2^k / X_k = 2^d (1 + (l - 1/2) / 2^N) for d = 10 and l = k - 6 (k = 7..10).
  const unsigned N = 2;
  const FunctionStream s([](std::uint64_t k) {
    if (k < 7 || k > 10) return 0.999;
    const double target = std::ldexp(1.0 + (static_cast<double>(k - 6) - 0.5) / 4.0, 10);
    return std::ldexp(1.0, static_cast<int>(k)) / target;
  });
  const auto r = dyadic_witness_search(s, N, 20);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(*r.d, 10);
  EXPECT_EQ(r.witness.size(), 2u);
  EXPECT_TRUE(r.passed());
  const double gap = r.witness[1] - r.witness[0];
  EXPECT_GE(gap, 0.25);
  EXPECT_LE(gap, 0.75);
}

TEST(DyadicWitness, LargerNWitnessHasBoundedFactor) {
  // N = 3 on a forced stream: 4 extracted points with gaps in [delta, 3 delta].
  const FunctionStream s([](std::uint64_t k) {
    if (k < 13 || k > 20) return 0.999;
    const double target = std::ldexp(1.0 + (static_cast<double>(k - 12) - 0.3) / 8.0, 20);
    return std::ldexp(1.0, static_cast<int>(k)) / target;
  });
  const auto r = dyadic_witness_search(s, 3, 40);
  ASSERT_TRUE(r.found);
  ASSERT_TRUE(r.g_value);
  EXPECT_LE(*r.g_value, 6.0);
  EXPECT_TRUE(r.passed());
}

TEST(DyadicWitness, NotFound) {
  const auto r = dyadic_witness_search(ConstantStream(0.999), 2, 50);
  EXPECT_FALSE(r.found);
}
