#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entlab/cover_entropy.hpp"
#include "support/oracles.hpp"

using namespace entlab;

namespace {

const double kLog2 = std::log(2.0);
const double kGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

SubshiftSpec golden_mean() { return SubshiftSpec::from_forbidden(2, {word_from_string("11")}); }

Subset free_then_zero() { return Subset(DigitSetSchedule::make(2, {}, {SymbolSet::full(2), SymbolSet{0}})); }

CoverEstimateParams params(int n_max, int power = 1) {
  CoverEstimateParams p;
  p.n_max = n_max;
  p.power = power;
  return p;
}

}  // namespace

TEST(EpsRadius, DyadicBands) {
  EXPECT_EQ(eps_radius(1.0), -1);
  EXPECT_EQ(eps_radius(0.6), 0);
  EXPECT_EQ(eps_radius(0.5), 0);
  EXPECT_EQ(eps_radius(0.49), 1);
  EXPECT_EQ(eps_radius(0.25), 1);
  EXPECT_EQ(eps_radius(0.125), 2);
  EXPECT_THROW(eps_radius(0.0), Error);
  EXPECT_THROW(eps_radius(1.5), Error);
}

TEST(MinSubcover, Examples) {
  const auto full2 = SubshiftSpec::full(2);
  EXPECT_EQ(min_subcover_count(full2, CoverSpec::partition(1), Subset::whole(2), 5).count, 32);
  EXPECT_EQ(min_subcover_count(full2, CoverSpec::partition(1), Subset::empty(2), 5).count, 1);
  EXPECT_EQ(min_subcover_count(full2, CoverSpec::partition(1), free_then_zero(), 4).count, 4);
  EXPECT_EQ(min_subcover_count(full2, CoverSpec::trivial(), Subset::whole(2), 9).count, 1);
}

TEST(MinSubcover, GeneralCoverGreedy) {
  const auto gm = golden_mean();
  const auto zero = word_from_string("0");
  const auto one = word_from_string("1");
  // A partition written as a general cover: greedy is exact.
  const auto as_general = CoverSpec::general(gm, {{zero}, {one}});
  const auto g = min_subcover_count(gm, as_general, Subset::whole(2), 5);
  EXPECT_TRUE(g.approximate);
  EXPECT_EQ(g.count, min_subcover_count(gm, CoverSpec::partition(1), Subset::whole(2), 5).count);
  EXPECT_EQ(g.count, oracle::fibonacci(7));
  // An element equal to X covers everything in one join element.
  const auto with_whole = CoverSpec::general(gm, {{zero}, {one}, {zero, one}});
  EXPECT_EQ(min_subcover_count(gm, with_whole, Subset::whole(2), 4).count, 1);
}

TEST(MinSubcover, Errors) {
  const auto full2 = SubshiftSpec::full(2);
  EXPECT_THROW(CoverSpec::general(full2, {{word_from_string("0")}}), Error);  // misses [1]
  const auto three = CoverSpec::general(full2, {{word_from_string("0")}, {word_from_string("1")},
                                                {word_from_string("0"), word_from_string("1")}});
  try {
    min_subcover_count(full2, three, Subset::whole(2), 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DepthOverflow);
  }
  EXPECT_THROW(min_subcover_count(full2, CoverSpec::partition(100), Subset::whole(2), 100), Error);
}

TEST(SeparatedSpanning, Examples) {
  const auto full2 = SubshiftSpec::full(2);
  const auto c = separated_spanning_counts(full2, Subset::whole(2), 3, 0.6);
  EXPECT_EQ(*c.s_n.exact, 8);
  EXPECT_EQ(*c.r_n.exact, 8);
  const auto empty = separated_spanning_counts(full2, Subset::empty(2), 7, 0.3);
  EXPECT_EQ(*empty.s_n.exact, 1);
  EXPECT_EQ(*empty.r_n.exact, 1);
  const auto fixed = separated_spanning_counts(full2, Subset(DigitSetSchedule::fixed_point(2, 0)), 10, 0.25);
  EXPECT_EQ(*fixed.s_n.exact, 1);
  EXPECT_EQ(*fixed.r_n.exact, 1);
  EXPECT_EQ(*separated_spanning_counts(full2, Subset::whole(2), 5, 1.0).s_n.exact, 1);
}

TEST(SeparatedSpanning, AgreesWithMetricBruteForce) {
  std::mt19937_64 rng(3);
  const std::vector<std::vector<Word>> forbidden = {{}, {word_from_string("11")}};
  for (int trial = 0; trial < 24; ++trial) {
    const auto& fw = forbidden[static_cast<std::size_t>(trial) % 2];
    const auto shift = SubshiftSpec::from_forbidden(2, fw);
    const auto sched = oracle::random_schedule(rng, 2, 2, 3);
    const int n = 1 + trial % 4;
    const int power = 1 + trial % 3;
    const double eps = std::vector<double>{0.6, 0.3, 0.2}[static_cast<std::size_t>(trial) % 3];
    const int k = eps_radius(eps);
    const long lo = -(k + 2);
    const long hi = static_cast<long>(power) * (n - 1) + k + 2;
    const auto points = oracle::restrictions(
        2, fw, [&](long c, Symbol x) { return sched.allowed(c).contains(x); }, lo, hi, 6);
    const std::vector<Word> pts(points.begin(), points.end());
    const auto brute = oracle::greedy_separated(pts, lo, n, power, eps);
    const auto counts = separated_spanning_counts(shift, Subset(sched), n, eps, power);
    if (pts.empty()) {
      EXPECT_FALSE(is_nonempty(shift, Subset(sched)));
      EXPECT_EQ(*counts.r_n.exact, 1);
      continue;
    }
    EXPECT_EQ(*counts.r_n.exact, static_cast<long>(brute)) << "trial " << trial;
    EXPECT_LE(*counts.n_lower.exact, *counts.r_n.exact);
    EXPECT_LE(*counts.r_n.exact, *counts.s_n.exact);
    EXPECT_LE(*counts.s_n.exact, *counts.n_upper.exact);
  }
}

TEST(EstimateCoverEntropy, Examples) {
  const auto full2 = estimate_cover_entropy(SubshiftSpec::full(2), Subset::whole(2), params(24)).estimate;
  EXPECT_NEAR(full2.value, kLog2, 0.01);
  EXPECT_TRUE(full2.exact);
  EXPECT_FALSE(full2.non_convergent);
  const auto gm = estimate_cover_entropy(golden_mean(), Subset::whole(2), params(24)).estimate;
  EXPECT_NEAR(gm.value, kGolden, 0.02);
  const auto p2 = estimate_cover_entropy(SubshiftSpec::full(2), free_then_zero(), params(24)).estimate;
  EXPECT_NEAR(p2.value, 0.5 * kLog2, 0.02);
  for (int m = 3; m <= 4; ++m) {
    const auto e = estimate_cover_entropy(SubshiftSpec::full(m), Subset::whole(m), params(24)).estimate;
    EXPECT_NEAR(e.value, std::log(m), 0.01);
  }
}

TEST(EstimateCoverEntropy, BoundsContainValue) {
  for (const auto& [shift, subset] :
       std::vector<std::pair<SubshiftSpec, Subset>>{{SubshiftSpec::full(2), free_then_zero()},
                                                    {golden_mean(), Subset::whole(2)},
                                                    {SubshiftSpec::full(3), Subset::whole(3)}}) {
    const auto e = estimate_cover_entropy(shift, subset, params(16)).estimate;
    ASSERT_TRUE(e.bounds.has_value());
    EXPECT_LE(e.bounds->first, e.value);
    EXPECT_LE(e.value, e.bounds->second);
  }
}

TEST(EstimateCoverEntropy, EmptySetIsZero) {
  const auto e = estimate_cover_entropy(SubshiftSpec::full(2), Subset::empty(2), params(12)).estimate;
  EXPECT_EQ(e.value, 0.0);
}

TEST(EstimateCoverEntropy, SandwichHoldsOnGrid) {
  const auto report = estimate_cover_entropy(golden_mean(), free_then_zero(), params(12));
  for (const auto& cs : report.series) {
    for (std::size_t i = 0; i < cs.s.size(); ++i) {
      EXPECT_LE(*cs.lower[i].exact, *cs.s[i].exact);
      EXPECT_LE(*cs.s[i].exact, *cs.upper[i].exact);
    }
  }
}

TEST(EstimateCoverEntropy, MonotoneUnderRefinement) {
  std::mt19937_64 rng(5);
  const auto shift = SubshiftSpec::full(3);
  for (int trial = 0; trial < 8; ++trial) {
    const auto small = oracle::random_schedule(rng, 3, 1, 3);
    auto period = small.period();
    period[0] = SymbolSet::full(3);
    const auto big = DigitSetSchedule::make(3, small.preperiod(), period);
    const auto a = estimate_cover_entropy(shift, Subset(small), params(12)).estimate;
    const auto b = estimate_cover_entropy(shift, Subset(big), params(12)).estimate;
    EXPECT_LE(a.value, b.value + 0.02);
  }
}

TEST(EstimateCoverEntropy, PowerLaw) {
  for (const auto& [shift, subset] :
       std::vector<std::pair<SubshiftSpec, Subset>>{{golden_mean(), Subset::whole(2)},
                                                    {SubshiftSpec::full(2), free_then_zero()}}) {
    const double base = estimate_cover_entropy(shift, subset, params(24)).estimate.value;
    for (int m = 2; m <= 4; ++m) {
      const double e = estimate_cover_entropy(shift, subset, params(16, m)).estimate.value;
      EXPECT_NEAR(e, m * base, 0.02 * m * base) << "power " << m;
    }
  }
}

TEST(ConditionalEntropy, Examples) {
  const auto full2 = SubshiftSpec::full(2);
  EXPECT_EQ(conditional_cover_entropy(full2, CoverSpec::partition(1), CoverSpec::partition(1), 16).value, 0.0);
  const auto e = conditional_cover_entropy(full2, CoverSpec::partition(2), CoverSpec::trivial(), 16);
  EXPECT_NEAR(e.value, kLog2, 1e-9);
  EXPECT_NEAR(e.bounds->second, 17.0 / 16.0 * kLog2, 1e-9);
  EXPECT_EQ(conditional_count(full2, CoverSpec::partition(2), CoverSpec::trivial(), 5, Subset::whole(2)), 64);
  EXPECT_EQ(conditional_cover_entropy(full2, CoverSpec::partition(1), CoverSpec::partition(2), 16).value, 0.0);
  for (int n = 1; n <= 8; ++n) {
    EXPECT_EQ(conditional_count(full2, CoverSpec::partition(1), CoverSpec::partition(2), n, Subset::whole(2)), 1);
  }
}

TEST(ConditionalEntropy, StarVanishesForShiftsOfFiniteType) {
  EXPECT_NEAR(conditional_entropy_star(golden_mean(), 12, 4).value, 0.0, 1e-9);
  EXPECT_NEAR(conditional_entropy_star(SubshiftSpec::full(3), 12, 4).value, 0.0, 1e-9);
}

TEST(RelativeEntropy, Examples) {
  const auto gm = golden_mean();
  EXPECT_NEAR(relative_entropy_over_factor(BlockCode::identity(gm), 16, 8).value, 0.0, 1e-9);
  const auto collapse = relative_entropy_over_factor(BlockCode::collapse(gm), 24, 8);
  EXPECT_NEAR(collapse.value, kGolden, 0.02);
  EXPECT_EQ(collapse.samples, 1);
  const auto pairing = BlockCode::symbol_map(SubshiftSpec::full(4), SubshiftSpec::full(2), {0, 1, 0, 1});
  const auto e = relative_entropy_over_factor(pairing, 16, 10);
  EXPECT_NEAR(e.value, kLog2, 0.01);
  EXPECT_EQ(e.samples, 10);
}

TEST(RelativeEntropy, PeriodicTargetsAreOrdered) {
  const auto words = periodic_target_words(SubshiftSpec::full(2), 3, 100);
  // Primitive words: 0,1 | 01,10 | 001,010,011,100,101,110.
  ASSERT_EQ(words.size(), 10u);
  EXPECT_EQ(words[2], word_from_string("01"));
  EXPECT_EQ(words[4], word_from_string("001"));
  const auto gm_words = periodic_target_words(golden_mean(), 2, 100);
  EXPECT_EQ(gm_words.size(), 3u);  // 0, 01, 10
}

TEST(RelativeEntropy, FactorSandwich) {
  const auto full2 = SubshiftSpec::full(2);
  const auto full4 = SubshiftSpec::full(4);
  const auto gm = golden_mean();
  const auto pairing = BlockCode::symbol_map(full4, full2, {0, 1, 0, 1});
  const auto xor_code = BlockCode::make(full2, full2, 1, [](std::span<const Symbol> w) {
    return static_cast<Symbol>(w[0] ^ w[2]);
  });
  struct Case {
    BlockCode code;
    Subset subset;
  };
  const std::vector<Case> cases = {
      {pairing, Subset::whole(4)},
      {pairing, Subset(DigitSetSchedule::make(4, {}, {SymbolSet{0, 1}, SymbolSet{2}}))},
      {BlockCode::collapse(gm), Subset::whole(2)},
      {BlockCode::identity(gm), Subset(DigitSetSchedule::make(2, {}, {SymbolSet::full(2), SymbolSet{0}}))},
      {xor_code, Subset(DigitSetSchedule::make(2, {}, {SymbolSet::full(2), SymbolSet{0}}))},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const double image = estimate_image_entropy(c.code, c.subset, 16).value;
    const double source = estimate_cover_entropy(c.code.source(), c.subset, params(16)).estimate.value;
    const double fiber = relative_entropy_over_factor(c.code, 16, 12).value;
    EXPECT_LE(image, source + 0.04) << "case " << i;
    EXPECT_LE(source, image + fiber + 0.04) << "case " << i;
  }
}

TEST(LocalEntropy, Examples) {
  const auto full2 = SubshiftSpec::full(2);
  const auto x = DigitSetSchedule::point(2, {}, word_from_string("01"), {}, word_from_string("1"));
  EXPECT_NEAR(local_entropy(full2, x, 0.125, 16).value, 0.0, 0.02);
  const auto one = SubshiftSpec::full(1);
  EXPECT_EQ(local_entropy(one, DigitSetSchedule::fixed_point(1, 0), 0.5, 12).value, 0.0);
}

TEST(LocalEntropy, FiberAgreesWithCenterForward) {
  const auto x = DigitSetSchedule::point(2, word_from_string("1"), word_from_string("0"), {}, word_from_string("10"));
  const auto phi = forward_fiber(x, 0.25);  // k = 1
  EXPECT_TRUE(phi.allowed(0) == SymbolSet{1});
  EXPECT_TRUE(phi.allowed(5) == SymbolSet{0});
  EXPECT_TRUE(phi.allowed(-1) == SymbolSet{1});
  EXPECT_TRUE(phi.allowed(-2) == SymbolSet::full(2));
  EXPECT_THROW(local_entropy(golden_mean(), DigitSetSchedule::fixed_point(2, 1), 0.5), Error);
}
