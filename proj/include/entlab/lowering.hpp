#pragma once

// Constructive entropy lowering: periodic digit schedules whose entropy and
// dimensional entropy both hit a requested value, in full shifts, in mixing
// SFTs, and inside a given schedule set; plus the diagonal experiment for
// products S_N = T x T^2 x ... x T^N under the max metric.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "entlab/cover_entropy.hpp"
#include "entlab/dim_entropy.hpp"
#include "entlab/parallel.hpp"

namespace entlab {

inline constexpr long kMaxLoweringPeriod = 10000;
inline constexpr long kMaxSftPeriod = 256;

struct LoweringResult {
  DigitSetSchedule schedule;
  double achieved = 0.0;  // exact entropy of the schedule
  long period = 1;
  long free_positions = 0;  // positions left unconstrained by the construction
};

namespace detail {

inline void check_target(double target, double ceiling, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "tol must be > 0");
  if (!(target >= 0.0) || target > ceiling + tol) {
    throw Error(ErrorCode::TargetOutOfRange, "target outside [0, " + std::to_string(ceiling) + "]");
  }
}

// Position i of a period q is free when floor((i + 1) k / q) > floor(i k / q),
// which spreads k free positions as evenly as possible.
inline bool spread_free(long i, long k, long q) { return (i + 1) * k / q > i * k / q; }

}  // namespace detail

/// Smallest period q <= 10^4 with free/pinned positions such that
/// (k / q) log m is within tol of the target. Pinned positions use digit 0.
inline LoweringResult lower_in_full_shift(int m, double target, double tol = 1e-3) {
  if (m < 2) throw Error(ErrorCode::InvalidSpec, "alphabet must be >= 2");
  const double h = std::log(static_cast<double>(m));
  detail::check_target(target, h, tol);
  for (long q = 1; q <= kMaxLoweringPeriod; ++q) {
    const long k = std::clamp(std::lround(target * static_cast<double>(q) / h), 0L, q);
    const double value = static_cast<double>(k) / static_cast<double>(q) * h;
    if (std::abs(value - target) > tol) continue;
    std::vector<SymbolSet> period;
    for (long i = 0; i < q; ++i) period.push_back(detail::spread_free(i, k, q) ? SymbolSet::full(m) : SymbolSet{0});
    return {DigitSetSchedule::make(m, {}, std::move(period)), value, q, k};
  }
  throw Error(ErrorCode::ToleranceUnachievable, "no period up to 10^4 reaches the tolerance");
}

/// Free blocks of length a alternating with pinned stretches of length b
/// that follow a fixed cycle word of the SFT (a self-loop when one exists),
/// searched by increasing period a + b. The entropy of each candidate is
/// the exact growth rate of the periodic schedule inside the SFT.
inline LoweringResult lower_in_sft(const SubshiftSpec& shift, double target, double tol = 1e-3) {
  if (!shift.is_mixing()) throw Error(ErrorCode::NotMixing, "ambient SFT is not mixing");
  const double h = spectral_entropy(shift);
  detail::check_target(target, h, tol);
  const int m = shift.alphabet_size();
  const Word cycle = shift.shortest_cycle_word();
  const long c = static_cast<long>(cycle.size());
  auto pinned_set = [&](long pos) { return SymbolSet{static_cast<int>(cycle[static_cast<std::size_t>(pos % c)])}; };
  if (target <= tol) {
    std::vector<SymbolSet> period;
    for (long i = 0; i < c; ++i) period.push_back(pinned_set(i));
    return {DigitSetSchedule::make(m, {}, std::move(period)), 0.0, c, 0};
  }
  if (target >= h - tol) return {DigitSetSchedule::whole(m), h, 1, 1};
  for (long q = c; q <= kMaxSftPeriod; q += c) {
    std::optional<LoweringResult> best;
    for (long a = 1; a < q; ++a) {
      std::vector<SymbolSet> period;
      for (long i = 0; i < q; ++i) period.push_back(i < a ? SymbolSet::full(m) : pinned_set(i));
      auto s = DigitSetSchedule::make(m, {}, std::move(period));
      const double value = periodic_schedule_entropy(shift, Subset(s));
      if (std::abs(value - target) > tol) continue;
      if (!best || std::abs(value - target) < std::abs(best->achieved - target)) best = LoweringResult{s, value, q, a};
    }
    if (best) return *best;
  }
  throw Error(ErrorCode::ToleranceUnachievable, "no free/pinned block pattern reaches the tolerance");
}

/// Positionwise sub-schedule of C with Moran value within tol of the
/// target. The period is a multiple r q of the period of C; at each
/// position the kept set is the first s symbols of C's set, with s chosen
/// to track the running target sum. The preperiod and backward side of C
/// are kept unchanged.
inline LoweringResult lower_within_subset(const DigitSetSchedule& c, double target, double tol = 1e-3) {
  const double ceiling = moran_value(c);
  detail::check_target(target, ceiling, tol);
  if (target >= ceiling - tol) {
    long free = 0;
    for (const auto& a : c.period()) free += a.size() > 1 ? 1 : 0;
    return {c, ceiling, static_cast<long>(c.period().size()), free};
  }
  const long q = static_cast<long>(c.period().size());
  for (long r = 1; r * q <= kMaxLoweringPeriod; ++r) {
    const long big_q = r * q;
    std::vector<SymbolSet> period;
    double sum = 0.0;
    long free = 0;
    for (long i = 0; i < big_q; ++i) {
      const auto symbols = c.period()[static_cast<std::size_t>(i % q)].symbols();
      const double line = static_cast<double>(i + 1) * target;
      std::size_t keep = 1;
      for (std::size_t s = 2; s <= symbols.size(); ++s) {
        const double err = std::abs(sum + std::log(static_cast<double>(s)) - line);
        const double cur = std::abs(sum + std::log(static_cast<double>(keep)) - line);
        if (err <= cur + 1e-12) keep = s;
      }
      SymbolSet kept;
      for (std::size_t s = 0; s < keep; ++s) kept.insert(symbols[s]);
      period.push_back(kept);
      sum += std::log(static_cast<double>(keep));
      free += keep > 1 ? 1 : 0;
    }
    const double value = sum / static_cast<double>(big_q);
    if (std::abs(value - target) > tol) continue;
    PeriodicStream forward{c.preperiod(), std::move(period)};
    return {DigitSetSchedule::make_two_sided(c.alphabet_size(), std::move(forward), c.backward()), value, big_q, free};
  }
  throw Error(ErrorCode::ToleranceUnachievable, "no sub-schedule with period up to 10^4 reaches the tolerance");
}

/// A posteriori check of a lowering output with both estimators.
struct LoweringCertificate {
  double expected = 0.0;
  EntropyEstimate cover;
  CriticalExponent dimensional;
  bool cover_ok = false;
  bool dimensional_ok = false;
};

/// The cover estimate uses n_max = 8 (pre + q) so the fit window spans four
/// periods of the staircase count, which keeps the phase bias of the slope
/// small;
/// the cover check passes when the expected value lies within its bounds
/// widened by cover_slack, the dimensional check when it lies within the
/// bisection bracket widened by 2 tol.
inline LoweringCertificate certify_lowering(const SubshiftSpec& shift, const DigitSetSchedule& s, double expected,
                                            double tol = 1e-3, double cover_slack = 0.01) {
  LoweringCertificate cert;
  cert.expected = expected;
  const long q = static_cast<long>(s.period().size());
  CoverEstimateParams p;
  p.n_max = static_cast<int>(std::clamp<long>(8 * (q + static_cast<long>(s.preperiod().size())), 24, 4096));
  p.eps_list = {0.5};
  cert.cover = estimate_cover_entropy(shift, Subset(s), p).estimate;
  const auto [lo, hi] = *cert.cover.bounds;
  cert.cover_ok = expected >= lo - cover_slack && expected <= hi + cover_slack;
  DimParams d;
  d.tol = tol;
  cert.dimensional = dim_entropy(shift, Subset(s), CoverSpec::partition(1), d);
  cert.dimensional_ok = !cert.dimensional.inconclusive && expected >= cert.dimensional.lower - 2 * tol &&
                        expected <= cert.dimensional.upper + 2 * tol;
  return cert;
}

struct DiagonalReport {
  int factors = 1;
  int k = 0;  // Bowen radius used for every factor
  double h_base = 0.0;
  double lower_bound = 0.0;  // N h_base
  double upper_bound = 0.0;  // N (N + 1) / 2 h_base
  EntropyEstimate estimate;
  std::vector<double> log_counts;  // n = 1..n_max
  bool lower_bound_check = false;
  bool upper_bound_check = false;
};

/// Radius making consecutive windows of the T^N factor overlap, so the
/// Bowen coordinates of the diagonal form one contiguous interval.
inline int diagonal_radius(int factors) { return std::max(1, factors / 2); }

/// Entropy of S_N on the diagonal {(x, ..., x)}: the (n, eps) separated
/// count under the max metric equals the number of distinct restrictions
/// of x to the union over i <= N of the Bowen coordinates of T^i.
inline DiagonalReport diagonal_experiment(const SubshiftSpec& base, int factors, int n_max, double tol = 0.05) {
  if (factors < 1 || factors > 4) throw Error(ErrorCode::InvalidSpec, "N must be in [1, 4]");
  if (base.alphabet_size() > 3) throw Error(ErrorCode::InvalidSpec, "base alphabet must be <= 3");
  if (n_max < 4) throw Error(ErrorCode::InvalidSpec, "n_max must be >= 4");
  DiagonalReport r;
  r.factors = factors;
  r.k = diagonal_radius(factors);
  r.h_base = spectral_entropy(base);
  r.lower_bound = factors * r.h_base;
  r.upper_bound = factors * (factors + 1) / 2.0 * r.h_base;
  const Subset whole = Subset::whole(base.alphabet_size());
  r.log_counts.assign(static_cast<std::size_t>(n_max), 0.0);
  parallel_for(static_cast<std::size_t>(n_max), [&](std::size_t idx) {
    const int n = static_cast<int>(idx) + 1;
    std::vector<long> coords;
    for (int i = 1; i <= factors; ++i) {
      for (long c : bowen_coordinates(n, r.k, i)) coords.push_back(c);
    }
    r.log_counts[idx] = log_of(count_patterns(base, whole, coords));
  });
  const auto fit = fit_upper_half(r.log_counts, n_max);
  r.estimate.value = std::max(0.0, fit.slope);
  r.estimate.method = EstimateMethod::SlopeFit;
  r.estimate.n_min = fit.n_min;
  r.estimate.n_max = n_max;
  r.estimate.residual = fit.residual;
  r.estimate.exact = true;
  r.estimate.non_convergent = fit.residual > kNonConvergentResidual;
  r.estimate.bounds = std::pair{std::max(0.0, r.estimate.value - fit.residual), r.estimate.value + fit.residual};
  r.lower_bound_check = r.estimate.value >= r.lower_bound - tol;
  r.upper_bound_check = r.estimate.value <= r.upper_bound + tol;
  return r;
}

}  // namespace entlab
