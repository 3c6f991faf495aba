#pragma once

// Digit Cantor sets on the circle R/Z (arc-length metric, total length 1)
// as images of schedule sets under pi(x) = sum_{j>=0} x_j m^{-(j+1)} with
// 0-indexed digits, and the dimension-entropy bridge for T_m(z) = m z.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entlab/counting.hpp"
#include "entlab/dim_entropy.hpp"

namespace entlab {

struct CircleSet {
  Subset source;
  int base = 2;

  CircleSet(Subset s, int m) : source(std::move(s)), base(m) {
    if (base < 2) throw Error(ErrorCode::InvalidSpec, "base must be >= 2");
    if (source.alphabet_size() != base) throw Error(ErrorCode::IncompatibleAlphabet, "schedule alphabet must equal base");
  }

  /// Digits from an allowed set used at every forward position.
  static CircleSet digits(int m, const SymbolSet& allowed) {
    return CircleSet(Subset(DigitSetSchedule::make(m, {}, {allowed})), m);
  }
  static CircleSet full_circle(int m) { return CircleSet(Subset::whole(m), m); }

  SubshiftSpec shift() const { return SubshiftSpec::full(base); }
};

/// Closed arc [index m^{-k}, (index + 1) m^{-k}].
struct Arc {
  std::uint64_t index = 0;
  int generation = 0;
  int base = 2;

  double left() const { return static_cast<double>(index) * length(); }
  double length() const { return std::pow(static_cast<double>(base), -generation); }
};

/// Point of the circle coded by a finite digit prefix (the left end of its arc).
inline double pi_prefix(const Word& digits, int base) {
  double x = 0.0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) x = (x + *it) / base;
  return x;
}

inline constexpr std::size_t kArcLimit = std::size_t{1} << 22;

/// Largest generation whose arc indices fit in 62 bits.
inline int max_arc_generation(int base) {
  return static_cast<int>(std::floor(62.0 / std::log2(static_cast<double>(base))));
}

/// The generation-k arcs whose digit prefix is consistent with the schedule,
/// in increasing order.
inline std::vector<Arc> project_intervals(const CircleSet& c, int k) {
  if (k < 1 || k > max_arc_generation(c.base)) throw Error(ErrorCode::InvalidSpec, "k exceeds the depth cap");
  std::vector<Arc> arcs;
  if (c.source.is_empty_union()) return arcs;
  const auto count = count_words(c.shift(), c.source, k);
  if (!count.exact || *count.exact > kArcLimit) throw Error(ErrorCode::DepthOverflow, "too many arcs at this generation");
  for (const auto& w : enumerate_words(c.shift(), c.source, 0, k)) {
    std::uint64_t idx = 0;
    for (Symbol d : w) idx = idx * static_cast<std::uint64_t>(c.base) + d;
    arcs.push_back({idx, k, c.base});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.index < b.index; });
  return arcs;
}

struct MeasureBounds {
  double lower = 0.0;
  double upper = 0.0;
  int generation = 0;  // first generation with m^{-k} <= delta
};

inline constexpr int kMaxMeasureGeneration = 60;

namespace detail {

inline const DigitSetSchedule* widest_member(const Subset& s) {
  const DigitSetSchedule* best = nullptr;
  for (const auto& m : s.members()) {
    if (!best || moran_value(m) > moran_value(*best)) best = &m;
  }
  return best;
}

inline bool forward_full(const DigitSetSchedule& s) {
  const int m = s.alphabet_size();
  for (const auto& a : s.preperiod()) {
    if (static_cast<int>(a.size()) != m) return false;
  }
  for (const auto& a : s.period()) {
    if (static_cast<int>(a.size()) != m) return false;
  }
  return true;
}

// Mass-distribution bound with the product measure of one member. A set of
// diameter r in (m^{-(j+1)}, m^{-j}] meets at most 3 closed generation-j
// arcs, so mu(U) <= 3 M_j m^{(j+1) t} r^t where M_j is the cylinder mass.
inline double mass_distribution_lower(const DigitSetSchedule& s, int base, double t, int j0) {
  const double log_m = std::log(static_cast<double>(base));
  if (forward_full(s)) {
    // Lebesgue measure: mu(U) <= diam(U), so H^{t,delta} >= delta^{t-1} for t <= 1.
    if (t > 1.0) return 0.0;
    return std::exp((t - 1.0) * (-j0 * log_m));
  }
  const long pre = static_cast<long>(s.preperiod().size());
  const long q = static_cast<long>(s.period().size());
  double drift = 0.0;
  for (long i = 0; i < q; ++i) drift += t * log_m - std::log(static_cast<double>(s.allowed(pre + i).size()));
  if (drift > 1e-12) return 0.0;
  double log_mass = 0.0;
  double worst = -kInf;
  const long stop = std::max<long>(j0, pre) + q;
  for (long j = 0; j <= stop; ++j) {
    if (j >= j0) worst = std::max(worst, log_mass + (j + 1) * t * log_m);
    log_mass -= std::log(static_cast<double>(s.allowed(j).size()));
  }
  return std::exp(-(std::log(3.0) + worst));
}

}  // namespace detail

/// Bounds on the delta-approximate t-dimensional Hausdorff measure. The
/// upper bound is the cheapest generation-aligned arc cover at or below
/// delta; the lower bound is the mass-distribution principle.
inline MeasureBounds hausdorff_measure_approx(const CircleSet& c, double t, double delta) {
  if (!(t >= 0.0 && t <= 1.5)) throw Error(ErrorCode::InvalidSpec, "t must lie in [0, 1.5]");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidSpec, "delta must be > 0");
  const double log_m = std::log(static_cast<double>(c.base));
  const int k = std::max(0, static_cast<int>(std::ceil(-std::log(delta) / log_m - 1e-9)));
  if (k > kMaxMeasureGeneration) throw Error(ErrorCode::ScaleUnderflow, "delta is below the smallest arc scale");
  MeasureBounds out;
  out.generation = k;
  if (c.source.is_empty_union() || !is_nonempty(c.shift(), c.source)) return out;
  const auto logs = window_log_counts(c.shift(), c.source, 0, kMaxMeasureGeneration);
  double best = k == 0 ? 0.0 : kInf;  // generation 0: the whole circle, diameter 1
  for (int g = std::max(k, 1); g <= kMaxMeasureGeneration; ++g) {
    best = std::min(best, logs[static_cast<std::size_t>(g - 1)] - g * t * log_m);
  }
  out.upper = std::exp(best);
  const int j0 = static_cast<int>(std::floor(-std::log(delta) / log_m + 1e-9));
  out.lower = std::min(out.upper, detail::mass_distribution_lower(*detail::widest_member(c.source), c.base, t,
                                                                  std::max(0, j0)));
  return out;
}

enum class DimensionMethod { MoranClosedForm, BoxCount };

inline const char* to_string(DimensionMethod m) {
  return m == DimensionMethod::MoranClosedForm ? "moran-closed-form" : "box-count";
}

struct DimensionEstimate {
  double value = 0.0;
  DimensionMethod method = DimensionMethod::MoranClosedForm;
  std::vector<double> scales_used;
  double residual = 0.0;
  double box_count = 0.0;  // independent slope over the same scales
};

struct BoxCount {
  double slope = 0.0;
  double residual = 0.0;
  std::vector<double> scales;
};

/// Slope of log N_k against k log m over generations [k_lo, k_hi].
inline BoxCount box_count_dimension(const CircleSet& c, int k_lo = 6, int k_hi = 12) {
  if (k_lo < 1 || k_hi <= k_lo) throw Error(ErrorCode::InvalidSpec, "need 1 <= k_lo < k_hi");
  BoxCount out;
  if (c.source.is_empty_union() || !is_nonempty(c.shift(), c.source)) return out;
  const double log_m = std::log(static_cast<double>(c.base));
  const auto logs = window_log_counts(c.shift(), c.source, 0, k_hi);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = k_lo; k <= k_hi; ++k) {
    xs.push_back(k * log_m);
    ys.push_back(logs[static_cast<std::size_t>(k - 1)]);
    out.scales.push_back(std::pow(static_cast<double>(c.base), -k));
  }
  const auto fit = fit_line(xs, ys);
  out.slope = std::clamp(fit.slope, 0.0, 1.0);
  out.residual = fit.rms;
  return out;
}

/// Hausdorff dimension of the image. Eventually periodic schedules have the
/// closed form max over members of (1/q) sum log|A_j| / log m; the box-count
/// slope is reported alongside as a cross-check.
inline DimensionEstimate hausdorff_dimension(const CircleSet& c, double tol = 1e-3) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "tol must be > 0");
  DimensionEstimate out;
  const auto box = box_count_dimension(c);
  out.scales_used = box.scales;
  out.residual = box.residual;
  out.box_count = box.slope;
  if (c.source.is_empty_union() || !is_nonempty(c.shift(), c.source)) return out;
  out.value = std::clamp(moran_oracle(c.source) / std::log(static_cast<double>(c.base)), 0.0, 1.0);
  return out;
}

struct BridgeReport {
  double h_d = 0.0;
  double hb_over_logm = 0.0;
  double gap = 0.0;
  double hb_lower = 0.0;
  double hb_upper = 0.0;
  double expansion_eps = 0.0;  // d(Tx, Ty) = m d(x, y) whenever d(x, y) < expansion_eps
  bool lipschitz_lower = false;  // H_d >= h^B / log m (T_m is m-Lipschitz)
  bool lipschitz_upper = false;  // H_d <= h^B / log m (T_m expands by m locally)
  bool passes = false;
};

/// Compares the Hausdorff dimension of the image with h^B(T_m, C) / log m,
/// the latter computed from the symbolic side by dim_entropy.
inline BridgeReport bridge_check(const CircleSet& c, double tol = 1e-3) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "tol must be > 0");
  const double log_m = std::log(static_cast<double>(c.base));
  BridgeReport r;
  r.h_d = hausdorff_dimension(c, tol).value;
  DimParams p;
  p.tol = 0.5 * tol * log_m;
  const auto hb = dim_entropy(c.shift(), c.source, CoverSpec::partition(1), p);
  if (hb.inconclusive) throw Error(ErrorCode::Inconclusive, "dimensional entropy bracket is inconclusive");
  r.hb_lower = hb.lower;
  r.hb_upper = hb.upper;
  r.hb_over_logm = 0.5 * (hb.lower + hb.upper) / log_m;
  r.gap = r.h_d - r.hb_over_logm;
  r.expansion_eps = 1.0 / (4.0 * c.base);
  r.lipschitz_lower = r.h_d >= hb.lower / log_m - 2 * tol;
  r.lipschitz_upper = r.h_d <= hb.upper / log_m + 2 * tol;
  r.passes = std::abs(r.gap) <= tol;
  return r;
}

}  // namespace entlab
