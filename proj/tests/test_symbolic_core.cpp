#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entlab/block_code.hpp"
#include "entlab/counting.hpp"
#include "entlab/subshift.hpp"
#include "support/oracles.hpp"

using namespace entlab;

namespace {

SubshiftSpec golden_mean() { return SubshiftSpec::from_forbidden(2, {word_from_string("11")}); }

DigitSetSchedule free_then_zero() {
  return DigitSetSchedule::make(2, {}, {SymbolSet::full(2), SymbolSet{0}});
}

BigInt exact(const WordCount& wc) { return *wc.exact; }

}  // namespace

TEST(CountWords, FullShiftIsPowerOfAlphabet) {
  EXPECT_EQ(exact(count_words(SubshiftSpec::full(2), std::nullopt, 3)), 8);
  EXPECT_EQ(exact(count_words(SubshiftSpec::full(3), std::nullopt, 5)), 243);
}

TEST(CountWords, GoldenMeanMatchesEnumerationAndFibonacci) {
  const auto gm = golden_mean();
  for (int n = 1; n <= 14; ++n) {
    long long brute = 0;
    for (int bits = 0; bits < (1 << n); ++bits) {
      Word w;
      for (int i = 0; i < n; ++i) w.push_back(static_cast<Symbol>((bits >> i) & 1));
      if (oracle::locally_admissible(w, {word_from_string("11")})) ++brute;
    }
    EXPECT_EQ(brute, oracle::fibonacci(n + 2));
    EXPECT_EQ(exact(count_words(gm, std::nullopt, n)), brute) << "n=" << n;
  }
  EXPECT_EQ(exact(count_words(gm, std::nullopt, 4)), 8);
}

TEST(CountWords, PeriodTwoSchedule) {
  const auto full2 = SubshiftSpec::full(2);
  EXPECT_EQ(exact(count_words(full2, Subset(free_then_zero()), 4)), 4);
  for (int n = 1; n <= 20; ++n) {
    const BigInt expected = BigInt(1) << ((n + 1) / 2);
    EXPECT_EQ(exact(count_words(full2, Subset(free_then_zero()), n)), expected);
  }
}

TEST(CountWords, EmptyIntersectionCountsZero) {
  // Golden mean with every coordinate pinned to 1 is empty.
  const auto pinned_one = DigitSetSchedule::make(2, {}, {SymbolSet{1}});
  EXPECT_EQ(exact(count_words(golden_mean(), Subset(pinned_one), 5)), 0);
  EXPECT_FALSE(is_nonempty(golden_mean(), Subset(pinned_one)));
  EXPECT_EQ(exact(count_words(golden_mean(), Subset::empty(2), 3)), 0);
}

TEST(CountWords, DeadEndsDownstreamAreExcluded) {
  // Coordinates 0..2 free, then 1 forever: only words that can be followed
  // by 1 1 1 ... survive, and 1^infinity is not golden-mean admissible.
  const auto s = DigitSetSchedule::make(2, {SymbolSet::full(2), SymbolSet::full(2)}, {SymbolSet{0}, SymbolSet{1}});
  // Forward tail 0101... is admissible; coordinate 1 must then be 0 or 1
  // followed by coordinate 2 = 0.
  const auto brute = oracle::restrictions(
      2, {word_from_string("11")}, [&](long c, Symbol x) { return s.allowed(c).contains(x); }, 0, 3, 8);
  EXPECT_EQ(exact(count_words(golden_mean(), Subset(s), 4)), static_cast<long>(brute.size()));
}

TEST(CountWords, IncompatibleAlphabetThrows) {
  try {
    count_words(SubshiftSpec::full(3), Subset(free_then_zero()), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompatibleAlphabet);
  }
}

TEST(CountWords, BeyondExactLimitIsFlagged) {
  const auto wc = count_words(SubshiftSpec::full(2), std::nullopt, 100);
  EXPECT_TRUE(wc.approximate);
  EXPECT_FALSE(wc.exact.has_value());
  EXPECT_NEAR(wc.log_value, 100 * std::log(2.0), 1e-9);
  const auto small = count_words(SubshiftSpec::full(2), std::nullopt, 64);
  EXPECT_FALSE(small.approximate);
  EXPECT_EQ(*small.exact, BigInt(1) << 64);
}

TEST(CountWords, RandomSchedulesAgreeWithBruteForce) {
  std::mt19937_64 rng(7);
  const std::vector<std::vector<Word>> systems = {
      {}, {word_from_string("11")}, {word_from_string("00"), word_from_string("121")}};
  const std::vector<int> alphabets = {2, 2, 3};
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t sys = static_cast<std::size_t>(trial) % systems.size();
    const auto shift = SubshiftSpec::from_forbidden(alphabets[sys], systems[sys]);
    const auto sched = oracle::random_schedule(rng, alphabets[sys], 2, 3);
    const auto counts = window_counts_exact(shift, Subset(sched), -2, 6);
    for (int len = 1; len <= 6; ++len) {
      const auto brute = oracle::restrictions(
          alphabets[sys], systems[sys], [&](long c, Symbol x) { return sched.allowed(c).contains(x); }, -2,
          -2 + len - 1, 7);
      EXPECT_EQ(counts[static_cast<std::size_t>(len - 1)], static_cast<long>(brute.size()))
          << "trial " << trial << " len " << len;
    }
  }
}

TEST(CountWords, UnionCountsDistinctWords) {
  const auto a = DigitSetSchedule::make(2, {}, {SymbolSet{0}});
  const auto b = DigitSetSchedule::make(2, {}, {SymbolSet::full(2), SymbolSet{0}});
  const auto u = Subset::union_of(2, {a, b});
  // 0^n is in both; the union has exactly as many words as b.
  EXPECT_EQ(exact(count_words(SubshiftSpec::full(2), u, 7)), exact(count_words(SubshiftSpec::full(2), Subset(b), 7)));
}

TEST(CountWords, PatternsOnCoordinateSets) {
  const auto gm = golden_mean();
  // Even coordinates of the golden mean are unconstrained by each other.
  EXPECT_EQ(count_patterns(gm, Subset::whole(2), {0, 2, 4, 6}), 16);
  // Contiguous sets agree with window counts.
  EXPECT_EQ(count_patterns(gm, Subset::whole(2), {0, 1, 2, 3}), 8);
}

TEST(CountWords, Subadditivity) {
  for (const auto& shift : {SubshiftSpec::full(3), golden_mean(),
                            SubshiftSpec::from_forbidden(3, {word_from_string("00"), word_from_string("12")})}) {
    const auto counts = window_counts_exact(shift, Subset::whole(shift.alphabet_size()), 0, 20);
    for (std::size_t n = 0; n + 1 < counts.size(); ++n) {
      EXPECT_LE(counts[n + 1], counts[n] * shift.alphabet_size());
    }
  }
}

TEST(CountWords, ScheduleMonotoneUnderEnlargement) {
  std::mt19937_64 rng(11);
  const auto shift = SubshiftSpec::from_forbidden(3, {word_from_string("22")});
  for (int trial = 0; trial < 20; ++trial) {
    const auto small = oracle::random_schedule(rng, 3, 2, 3);
    std::vector<SymbolSet> period = small.period();
    period[static_cast<std::size_t>(rng() % period.size())].insert(static_cast<int>(rng() % 3));
    const auto big = DigitSetSchedule::make(3, small.preperiod(), period);
    const auto a = window_counts_exact(shift, Subset(small), 0, 12);
    const auto b = window_counts_exact(shift, Subset(big), 0, 12);
    for (std::size_t n = 0; n < a.size(); ++n) EXPECT_LE(a[n], b[n]);
  }
}

TEST(SpectralEntropy, KnownValues) {
  EXPECT_NEAR(spectral_entropy(SubshiftSpec::full(2)), std::log(2.0), 1e-12);
  EXPECT_NEAR(spectral_entropy(golden_mean()), std::log((1.0 + std::sqrt(5.0)) / 2.0), 1e-12);
  EXPECT_NEAR(spectral_entropy(golden_mean()), 0.481212, 1e-6);
  EXPECT_EQ(spectral_entropy(SubshiftSpec::full(1)), 0.0);
  EXPECT_EQ(spectral_entropy(SubshiftSpec::from_matrix({{1}})), 0.0);
}

TEST(SpectralEntropy, MatrixAndForbiddenPresentationsAgree) {
  const auto by_matrix = SubshiftSpec::from_matrix({{1, 1}, {1, 0}});
  EXPECT_NEAR(spectral_entropy(by_matrix), spectral_entropy(golden_mean()), 1e-12);
}

TEST(SpectralEntropy, ReducibleReportsMaxComponent) {
  // Two disjoint loops: full 2-shift on {0,1} and a fixed symbol 2, no
  // transitions between them.
  const auto shift = SubshiftSpec::from_matrix({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  const auto report = spectral_entropy_report(shift);
  EXPECT_FALSE(report.irreducible);
  EXPECT_NEAR(report.value, std::log(2.0), 1e-12);
}

TEST(SpectralEntropy, TrimsStrandedSymbols) {
  // Symbol 2 can be entered but never left.
  const auto shift = SubshiftSpec::from_matrix({{1, 1, 1}, {1, 0, 1}, {0, 0, 0}});
  EXPECT_EQ(shift.stranded(), 1);
  EXPECT_NEAR(spectral_entropy(shift), spectral_entropy(golden_mean()), 1e-12);
}

TEST(SpectralEntropy, DifferenceQuotientOfCountsConverges) {
  for (const auto& shift : {SubshiftSpec::full(2), SubshiftSpec::full(4), golden_mean(),
                            SubshiftSpec::from_forbidden(3, {word_from_string("01"), word_from_string("22")})}) {
    const auto logs = window_log_counts(shift, Subset::whole(shift.alphabet_size()), 0, 24);
    EXPECT_NEAR(logs[23] - logs[22], spectral_entropy(shift), 1e-3);
  }
}

TEST(SpectralEntropy, PeriodicScheduleOracle) {
  EXPECT_NEAR(periodic_schedule_entropy(SubshiftSpec::full(2), Subset(free_then_zero())), 0.5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(periodic_schedule_entropy(golden_mean(), Subset::whole(2)), spectral_entropy(golden_mean()), 1e-12);
  // Golden mean with every other coordinate pinned to 0: the free
  // coordinates are independent.
  EXPECT_NEAR(periodic_schedule_entropy(golden_mean(), Subset(free_then_zero())), 0.5 * std::log(2.0), 1e-12);
}

TEST(SubshiftSpec, RejectsBadInput) {
  EXPECT_THROW(SubshiftSpec::from_forbidden(0, {}), Error);
  EXPECT_THROW(SubshiftSpec::from_forbidden(2, {Word{}}), Error);
  EXPECT_THROW(SubshiftSpec::from_matrix({{1, 0}}), Error);
  EXPECT_THROW(SubshiftSpec::from_matrix({{0, 1}, {0, 0}}), Error);  // empty after trimming
}

TEST(SubshiftSpec, Mixing) {
  EXPECT_TRUE(golden_mean().is_mixing());
  EXPECT_FALSE(SubshiftSpec::from_matrix({{0, 1}, {1, 0}}).is_mixing());
  EXPECT_EQ(golden_mean().self_loop_symbol(), Symbol{0});
  EXPECT_EQ(SubshiftSpec::from_matrix({{0, 1}, {1, 0}}).shortest_cycle_word().size(), 2u);
}

TEST(BlockCode, Examples) {
  const auto full2 = SubshiftSpec::full(2);
  EXPECT_EQ(apply_block_code(BlockCode::identity(full2), word_from_string("0101")), word_from_string("0101"));

  const auto pairing = BlockCode::symbol_map(SubshiftSpec::full(4), full2, {0, 1, 0, 1});
  EXPECT_EQ(apply_block_code(pairing, word_from_string("0123")), word_from_string("0101"));

  const auto xor_code = BlockCode::make(full2, full2, 1, [](std::span<const Symbol> w) {
    return static_cast<Symbol>(w[0] ^ w[2]);
  });
  EXPECT_EQ(apply_block_code(xor_code, word_from_string("010")), word_from_string("0"));
}

TEST(BlockCode, Errors) {
  const auto full2 = SubshiftSpec::full(2);
  const auto xor_code = BlockCode::make(full2, full2, 1, [](std::span<const Symbol> w) {
    return static_cast<Symbol>(w[0] ^ w[2]);
  });
  try {
    apply_block_code(xor_code, word_from_string("01"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WordTooShort);
  }
  try {
    apply_block_code(BlockCode::identity(golden_mean()), word_from_string("0110"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InadmissibleWord);
  }
  // Identity from the full shift into the golden mean is not a factor map.
  EXPECT_THROW(BlockCode::make(full2, golden_mean(), 0, [](std::span<const Symbol> w) { return w[0]; }), Error);
}

TEST(BlockCode, ImagesOfAdmissibleWordsAreAdmissible) {
  const auto gm = golden_mean();
  // x_i AND NOT x_{i+1} maps the golden mean into itself ("11" never appears).
  const auto code = BlockCode::make(gm, gm, 1, [](std::span<const Symbol> w) {
    return static_cast<Symbol>(w[1] & (1 - w[2]));
  });
  for (const auto& w : enumerate_words(gm, Subset::whole(2), 0, 12)) {
    EXPECT_TRUE(gm.is_admissible(apply_block_code(code, w)));
  }
}
