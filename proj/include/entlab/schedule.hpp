#pragma once

// Digit-set schedules: subsets of a shift defined by per-coordinate allowed
// symbol sets that are eventually periodic in both directions, and finite
// unions of them.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "entlab/core.hpp"

namespace entlab {

/// One-directional eventually periodic sequence of allowed sets:
/// entry j is pre[j] for j < pre.size(), then period repeats.
struct PeriodicStream {
  std::vector<SymbolSet> pre;
  std::vector<SymbolSet> period;

  const SymbolSet& at(long j) const {
    const auto p = static_cast<long>(pre.size());
    if (j < p) return pre[static_cast<std::size_t>(j)];
    return period[static_cast<std::size_t>((j - p) % static_cast<long>(period.size()))];
  }

  /// The stream with its first `i` entries removed.
  PeriodicStream drop(long i) const {
    PeriodicStream s;
    const auto p = static_cast<long>(pre.size());
    if (i <= p) {
      s.pre.assign(pre.begin() + i, pre.end());
      s.period = period;
    } else {
      const auto q = static_cast<long>(period.size());
      const long r = (i - p) % q;
      s.period.assign(period.begin() + r, period.end());
      s.period.insert(s.period.end(), period.begin(), period.begin() + r);
    }
    return s;
  }

  bool all_full(int alphabet) const {
    const auto full = SymbolSet::full(alphabet);
    for (const auto& a : pre) {
      if (!(a == full)) return false;
    }
    for (const auto& a : period) {
      if (!(a == full)) return false;
    }
    return true;
  }

  bool all_singletons() const {
    for (const auto& a : pre) {
      if (a.size() != 1) return false;
    }
    for (const auto& a : period) {
      if (a.size() != 1) return false;
    }
    return true;
  }
};

/// How coordinates left of the origin are constrained.
enum class TwoSidedRule { Free, Mirrored, Pinned, Explicit };

/// Per-coordinate allowed-symbol sets. Coordinates i >= 0 follow the
/// forward stream; coordinate -j (j >= 1) follows entry j-1 of the backward
/// stream.
class DigitSetSchedule {
 public:
  DigitSetSchedule() = default;

  /// Schedule with the given forward part and a two-sided rule; `pinned`
  /// is the word repeated leftwards (coordinate -1 gets pinned[0]) for
  /// TwoSidedRule::Pinned.
  static DigitSetSchedule make(int alphabet, std::vector<SymbolSet> preperiod, std::vector<SymbolSet> period,
                               TwoSidedRule rule = TwoSidedRule::Free, const Word& pinned = {}) {
    DigitSetSchedule s;
    s.alphabet_ = alphabet;
    s.forward_.pre = std::move(preperiod);
    s.forward_.period = std::move(period);
    s.rule_ = rule;
    switch (rule) {
      case TwoSidedRule::Free:
        s.backward_.period = {SymbolSet::full(alphabet)};
        break;
      case TwoSidedRule::Mirrored:
        if (s.forward_.period.empty()) break;
        s.backward_ = s.forward_.drop(1);
        break;
      case TwoSidedRule::Pinned:
        if (pinned.empty()) throw Error(ErrorCode::InvalidSpec, "pinned rule needs a non-empty word");
        for (Symbol x : pinned) s.backward_.period.push_back(SymbolSet::single(x));
        break;
      case TwoSidedRule::Explicit:
        throw Error(ErrorCode::InvalidSpec, "use make_two_sided for explicit backward streams");
    }
    s.validate();
    return s;
  }

  static DigitSetSchedule make_two_sided(int alphabet, PeriodicStream forward, PeriodicStream backward) {
    DigitSetSchedule s;
    s.alphabet_ = alphabet;
    s.forward_ = std::move(forward);
    s.backward_ = std::move(backward);
    s.rule_ = TwoSidedRule::Explicit;
    s.validate();
    return s;
  }

  /// Every coordinate free: the whole shift.
  static DigitSetSchedule whole(int alphabet) {
    return make(alphabet, {}, {SymbolSet::full(alphabet)});
  }

  /// The single two-sided point with the given eventually periodic forward
  /// and backward symbol sequences.
  static DigitSetSchedule point(int alphabet, const Word& forward_pre, const Word& forward_period,
                                const Word& backward_pre, const Word& backward_period) {
    auto to_sets = [](const Word& w) {
      std::vector<SymbolSet> sets;
      for (Symbol x : w) sets.push_back(SymbolSet::single(x));
      return sets;
    };
    return make_two_sided(alphabet, {to_sets(forward_pre), to_sets(forward_period)},
                          {to_sets(backward_pre), to_sets(backward_period)});
  }

  /// The constant point s^infinity.
  static DigitSetSchedule fixed_point(int alphabet, Symbol s) { return point(alphabet, {}, {s}, {}, {s}); }

  int alphabet_size() const { return alphabet_; }
  const PeriodicStream& forward() const { return forward_; }
  const PeriodicStream& backward() const { return backward_; }
  TwoSidedRule two_sided_rule() const { return rule_; }
  const std::vector<SymbolSet>& preperiod() const { return forward_.pre; }
  const std::vector<SymbolSet>& period() const { return forward_.period; }

  const SymbolSet& allowed(long coord) const {
    return coord >= 0 ? forward_.at(coord) : backward_.at(-coord - 1);
  }

  bool is_point() const { return forward_.all_singletons() && backward_.all_singletons(); }

  /// The image T^i K under the left shift, i >= 0.
  DigitSetSchedule shifted(long i) const {
    PeriodicStream back;
    for (long c = i - 1; c >= 0; --c) back.pre.push_back(forward_.at(c));
    back.pre.insert(back.pre.end(), backward_.pre.begin(), backward_.pre.end());
    back.period = backward_.period;
    return make_two_sided(alphabet_, forward_.drop(i), std::move(back));
  }

  /// Positionwise containment over every coordinate (checked on a window
  /// long enough to cover both preperiods and a common period).
  bool contained_in(const DigitSetSchedule& other) const {
    if (alphabet_ != other.alphabet_) return false;
    const long fwd = static_cast<long>(std::max(forward_.pre.size(), other.forward_.pre.size())) +
                     lcm_ll(static_cast<long long>(forward_.period.size()),
                            static_cast<long long>(other.forward_.period.size()));
    const long bwd = static_cast<long>(std::max(backward_.pre.size(), other.backward_.pre.size())) +
                     lcm_ll(static_cast<long long>(backward_.period.size()),
                            static_cast<long long>(other.backward_.period.size()));
    for (long c = -bwd; c < fwd; ++c) {
      if (!allowed(c).is_subset_of(other.allowed(c))) return false;
    }
    return true;
  }

 private:
  void validate() const {
    if (alphabet_ < 1 || alphabet_ > kMaxAlphabet) throw Error(ErrorCode::InvalidSpec, "bad schedule alphabet");
    if (forward_.period.empty()) throw Error(ErrorCode::InvalidSpec, "schedule period must be non-empty");
    if (backward_.period.empty()) throw Error(ErrorCode::InvalidSpec, "backward period must be non-empty");
    auto check = [&](const std::vector<SymbolSet>& sets) {
      for (const auto& a : sets) {
        if (a.empty()) throw Error(ErrorCode::InvalidSpec, "allowed set must be non-empty");
        if (a.span() > alphabet_) throw Error(ErrorCode::InvalidSpec, "allowed set exceeds the alphabet");
      }
    };
    check(forward_.pre);
    check(forward_.period);
    check(backward_.pre);
    check(backward_.period);
  }

  int alphabet_ = 0;
  PeriodicStream forward_;
  PeriodicStream backward_;
  TwoSidedRule rule_ = TwoSidedRule::Free;
};

/// A finite union of schedules; zero members denotes the empty set.
class Subset {
 public:
  Subset() = default;
  Subset(DigitSetSchedule s) : alphabet_(s.alphabet_size()) { members_.push_back(std::move(s)); }  // NOLINT

  static Subset empty(int alphabet) {
    Subset s;
    s.alphabet_ = alphabet;
    return s;
  }
  static Subset whole(int alphabet) { return Subset(DigitSetSchedule::whole(alphabet)); }

  static Subset union_of(int alphabet, std::vector<DigitSetSchedule> members) {
    if (members.size() > 32) throw Error(ErrorCode::InternalLimit, "at most 32 union members");
    Subset s;
    s.alphabet_ = alphabet;
    for (auto& m : members) {
      if (m.alphabet_size() != alphabet) throw Error(ErrorCode::IncompatibleAlphabet, "union member alphabet");
      s.members_.push_back(std::move(m));
    }
    return s;
  }

  int alphabet_size() const { return alphabet_; }
  const std::vector<DigitSetSchedule>& members() const { return members_; }
  bool is_empty_union() const { return members_.empty(); }

  Subset shifted(long i) const {
    Subset s;
    s.alphabet_ = alphabet_;
    for (const auto& m : members_) s.members_.push_back(m.shifted(i));
    return s;
  }

  /// Least common multiple of the forward periods and the longest preperiod.
  long forward_period_lcm() const {
    long long q = 1;
    for (const auto& m : members_) q = lcm_ll(q, static_cast<long long>(m.period().size()));
    return static_cast<long>(q);
  }
  long forward_preperiod_max() const {
    std::size_t p = 0;
    for (const auto& m : members_) p = std::max(p, m.preperiod().size());
    return static_cast<long>(p);
  }

 private:
  int alphabet_ = 0;
  std::vector<DigitSetSchedule> members_;
};

/// Period-average of log |allowed set| for one schedule, the closed-form
/// entropy of an eventually periodic digit set in a full shift.
inline double moran_value(const DigitSetSchedule& s) {
  double acc = 0.0;
  for (const auto& a : s.period()) acc += std::log(static_cast<double>(a.size()));
  return acc / static_cast<double>(s.period().size());
}

/// Closed-form entropy of a finite union of full-shift schedules (the
/// maximum over members); 0 for the empty set.
inline double moran_oracle(const Subset& k) {
  double best = 0.0;
  for (const auto& m : k.members()) best = std::max(best, moran_value(m));
  return best;
}

}  // namespace entlab
