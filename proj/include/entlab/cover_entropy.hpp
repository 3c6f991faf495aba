#pragma once

// Covering entropy of schedule subsets: spanning/separated counts, slope
// estimates with a cover sandwich, minimal subcovers, conditional entropy
// of covers, fiber entropy over block codes and local entropy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entlab/block_code.hpp"
#include "entlab/core.hpp"
#include "entlab/counting.hpp"
#include "entlab/parallel.hpp"
#include "entlab/schedule.hpp"
#include "entlab/subshift.hpp"

namespace entlab {

enum class EstimateMethod { ExactSpectral, SlopeFit, Sandwich };

inline const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::ExactSpectral: return "exact-spectral";
    case EstimateMethod::SlopeFit: return "slope-fit";
    case EstimateMethod::Sandwich: return "sandwich";
  }
  return "?";
}

/// Residual (in nats per step) above which a slope fit is flagged.
inline constexpr double kNonConvergentResidual = 0.05;

struct EntropyEstimate {
  double value = 0.0;
  EstimateMethod method = EstimateMethod::SlopeFit;
  int n_min = 0;
  int n_max = 0;
  double residual = 0.0;
  std::optional<std::pair<double, double>> bounds;
  bool exact = false;
  bool non_convergent = false;
  int samples = 0;
};

inline EntropyEstimate spectral_estimate(const SubshiftSpec& shift) {
  EntropyEstimate e;
  e.value = spectral_entropy(shift);
  e.method = EstimateMethod::ExactSpectral;
  e.exact = true;
  e.bounds = std::pair{e.value, e.value};
  return e;
}

/// Least-squares slope of log counts (index n - 1) over n in
/// [max(1, n_max / 2), n_max]; the residual is the fit RMS divided by n_max.
struct SlopeFit {
  double slope = 0.0;
  double residual = 0.0;
  int n_min = 1;
};

inline SlopeFit fit_upper_half(const std::vector<double>& logs, int n_max) {
  SlopeFit out;
  out.n_min = std::max(1, n_max / 2);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int n = out.n_min; n <= n_max; ++n) {
    xs.push_back(n);
    ys.push_back(logs[static_cast<std::size_t>(n - 1)]);
  }
  const auto fit = fit_line(xs, ys);
  out.slope = fit.slope;
  out.residual = fit.rms / static_cast<double>(n_max);
  return out;
}

/// Window radius for the symbolic metric d(x, y) = 2^{-min{|i| : x_i != y_i}}:
/// two points are eps-close iff they agree on [-k, k]. eps = 1 gives -1
/// (every pair is close).
inline int eps_radius(double eps) {
  if (!(eps > 0.0) || eps > 1.0) throw Error(ErrorCode::InvalidSpec, "eps must lie in (0, 1]");
  int j = 0;
  while (std::ldexp(1.0, -j) > eps) ++j;
  return j - 1;
}

/// Coordinates a point must share with the center to stay eps-close for
/// n steps of T^power: the union of [power * t - k, power * t + k].
inline std::vector<long> bowen_coordinates(int n, int k, int power) {
  std::vector<long> coords;
  if (k < 0) return coords;
  for (int t = 0; t < n; ++t) {
    for (long c = static_cast<long>(power) * t - k; c <= static_cast<long>(power) * t + k; ++c) coords.push_back(c);
  }
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

namespace detail {

inline WordCount make_count(const BigInt& c) {
  WordCount wc;
  wc.exact = c;
  wc.log_value = log_of(c);
  return wc;
}

inline bool subset_nonempty(const SubshiftSpec& shift, const Subset& k) {
  return !k.is_empty_union() && is_nonempty(shift, k);
}

}  // namespace detail

/// Number of distinct patterns of the subset on the Bowen coordinates for
/// n = 1..n_max (radius k, map T^power).
inline std::vector<WordCount> bowen_counts(const SubshiftSpec& shift, const Subset& subset, int k, int power,
                                           int n_max) {
  std::vector<WordCount> out;
  if (k < 0) {
    for (int n = 1; n <= n_max; ++n) out.push_back(detail::make_count(1));
    return out;
  }
  if (2 * k + 1 >= power) {
    const int len = power * (n_max - 1) + 2 * k + 1;
    auto len_of = [&](int n) { return static_cast<std::size_t>(power * (n - 1) + 2 * k + 1); };
    const int exact_len = std::min(len, kExactCountLimit);
    const auto counts = window_counts_exact(shift, subset, -k, exact_len);
    const auto logs = len > exact_len ? window_log_counts(shift, subset, -k, len) : std::vector<double>{};
    for (int n = 1; n <= n_max; ++n) {
      const auto l = len_of(n);
      if (static_cast<int>(l) <= exact_len) {
        out.push_back(detail::make_count(counts[l - 1]));
      } else {
        WordCount wc;
        wc.log_value = logs[l - 1];
        wc.approximate = true;
        out.push_back(wc);
      }
    }
    return out;
  }
  for (int n = 1; n <= n_max; ++n) {
    out.push_back(detail::make_count(count_patterns(shift, subset, bowen_coordinates(n, k, power))));
  }
  return out;
}

/// Spanning / separated counts with the cover sandwich
/// N(U_0^{n-1}) <= r_n <= s_n <= N(V_0^{n-1}).
struct SeparationCounts {
  WordCount s_n;
  WordCount r_n;
  WordCount n_lower;
  WordCount n_upper;
};

inline SeparationCounts separated_spanning_counts(const SubshiftSpec& shift, const Subset& subset, int n, double eps,
                                                  int power = 1) {
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "n must be >= 1");
  if (power < 1) throw Error(ErrorCode::InvalidSpec, "power must be >= 1");
  const int k = eps_radius(eps);
  SeparationCounts out;
  if (!detail::subset_nonempty(shift, subset)) {
    out.s_n = out.r_n = out.n_lower = out.n_upper = detail::make_count(1);
    return out;
  }
  // For the symbolic metric, eps-closeness along the orbit is agreement on
  // the Bowen coordinates; spanning and separated sets are both one point
  // per realized pattern.
  out.s_n = bowen_counts(shift, subset, k, power, n).back();
  out.r_n = out.s_n;
  out.n_lower = bowen_counts(shift, subset, std::min(k, 0), power, n).back();
  out.n_upper = bowen_counts(shift, subset, k + 1, power, n).back();
  return out;
}

struct CoverEstimateParams {
  int n_max = 24;
  std::vector<double> eps_list{0.5, 0.25, 0.125};
  int power = 1;
};

/// Counts and fits for one eps.
struct CountSeries {
  double eps = 0.0;
  int k = 0;
  std::vector<WordCount> s;
  std::vector<WordCount> lower;
  std::vector<WordCount> upper;
  SlopeFit fit;
  double slope_lower = 0.0;
  double slope_upper = 0.0;
};

struct CoverEntropyReport {
  EntropyEstimate estimate;
  std::vector<CountSeries> series;  // in eps_list order
};

namespace detail {

inline std::vector<double> logs_of(const std::vector<WordCount>& counts) {
  std::vector<double> out;
  out.reserve(counts.size());
  for (const auto& c : counts) out.push_back(c.log_value);
  return out;
}

}  // namespace detail

/// Slope estimate of h(T^power, K) at each eps; the value is the slope at
/// the finest eps and the bounds span the sandwich slopes there, widened
/// by the fit residual.
inline CoverEntropyReport estimate_cover_entropy(const SubshiftSpec& shift, const Subset& subset,
                                                 const CoverEstimateParams& params = {}) {
  if (params.n_max < 8) throw Error(ErrorCode::InvalidSpec, "n_max must be >= 8");
  if (params.eps_list.empty()) throw Error(ErrorCode::InvalidSpec, "eps list is empty");
  if (params.power < 1) throw Error(ErrorCode::InvalidSpec, "power must be >= 1");
  if (subset.alphabet_size() != shift.alphabet_size()) {
    throw Error(ErrorCode::IncompatibleAlphabet, "subset and shift alphabets differ");
  }
  CoverEntropyReport report;
  report.series.resize(params.eps_list.size());
  const bool nonempty = detail::subset_nonempty(shift, subset);
  parallel_for(params.eps_list.size(), [&](std::size_t i) {
    CountSeries& cs = report.series[i];
    cs.eps = params.eps_list[i];
    cs.k = eps_radius(cs.eps);
    if (!nonempty) {
      cs.s = cs.lower = cs.upper = bowen_counts(shift, subset, -1, params.power, params.n_max);
      cs.fit.n_min = std::max(1, params.n_max / 2);
      return;
    }
    cs.s = bowen_counts(shift, subset, cs.k, params.power, params.n_max);
    cs.lower = cs.k >= 0 ? bowen_counts(shift, subset, 0, params.power, params.n_max) : cs.s;
    cs.upper = bowen_counts(shift, subset, cs.k + 1, params.power, params.n_max);
    cs.fit = fit_upper_half(detail::logs_of(cs.s), params.n_max);
    cs.slope_lower = fit_upper_half(detail::logs_of(cs.lower), params.n_max).slope;
    cs.slope_upper = fit_upper_half(detail::logs_of(cs.upper), params.n_max).slope;
  });

  std::size_t finest = 0;
  for (std::size_t i = 1; i < params.eps_list.size(); ++i) {
    if (params.eps_list[i] < params.eps_list[finest]) finest = i;
  }
  const CountSeries& f = report.series[finest];
  EntropyEstimate& e = report.estimate;
  e.method = EstimateMethod::SlopeFit;
  e.n_min = f.fit.n_min;
  e.n_max = params.n_max;
  e.exact = std::none_of(f.s.begin(), f.s.end(), [](const WordCount& c) { return c.approximate; });
  if (!nonempty) {
    e.value = 0.0;
    e.bounds = std::pair{0.0, 0.0};
    return report;
  }
  e.value = std::max(0.0, f.fit.slope);
  e.residual = f.fit.residual;
  e.non_convergent = e.residual > kNonConvergentResidual;
  const double lo = std::min({f.slope_lower, f.fit.slope, f.slope_upper}) - e.residual;
  const double hi = std::max({f.slope_lower, f.fit.slope, f.slope_upper}) + e.residual;
  e.bounds = std::pair{std::max(0.0, std::min(lo, e.value)), std::max(hi, e.value)};
  return report;
}

// ---------------------------------------------------------------------------
// Covers

/// A cover of the shift by unions of cylinders at coordinate 0. A word
/// partition of depth d has one cell per admissible d-word; depth 0 is the
/// trivial cover {X}. A general cover lists, per element, the words of a
/// common length whose cylinders form the element.
class CoverSpec {
 public:
  enum class Kind { WordPartition, General };

  static CoverSpec partition(int depth) {
    if (depth < 0) throw Error(ErrorCode::InvalidSpec, "partition depth must be >= 0");
    CoverSpec c;
    c.kind_ = Kind::WordPartition;
    c.depth_ = depth;
    return c;
  }
  static CoverSpec trivial() { return partition(0); }

  static CoverSpec general(const SubshiftSpec& shift, std::vector<std::vector<Word>> elements) {
    if (elements.empty()) throw Error(ErrorCode::InvalidSpec, "cover has no elements");
    std::size_t len = 0;
    for (const auto& el : elements) {
      if (el.empty()) throw Error(ErrorCode::InvalidSpec, "cover element has no cylinders");
      for (const auto& w : el) {
        if (w.empty()) throw Error(ErrorCode::InvalidSpec, "cylinder word must be non-empty");
        if (len == 0) len = w.size();
        if (w.size() != len) throw Error(ErrorCode::InvalidSpec, "cylinder words must share one length");
        for (Symbol s : w) {
          if (s >= shift.alphabet_size()) throw Error(ErrorCode::InvalidSpec, "cylinder symbol outside alphabet");
        }
      }
    }
    CoverSpec c;
    c.kind_ = Kind::General;
    c.depth_ = static_cast<int>(len);
    c.elements_ = std::move(elements);
    for (const auto& w : enumerate_words(shift, Subset::whole(shift.alphabet_size()), 0, c.depth_)) {
      if (c.elements_containing(w).empty()) {
        throw Error(ErrorCode::InvalidSpec, "cover elements do not cover the word " + word_to_string(w));
      }
    }
    return c;
  }

  Kind kind() const { return kind_; }
  int depth() const { return depth_; }
  const std::vector<std::vector<Word>>& elements() const { return elements_; }

  std::vector<int> elements_containing(const Word& w) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (std::find(elements_[i].begin(), elements_[i].end(), w) != elements_[i].end()) {
        out.push_back(static_cast<int>(i));
      }
    }
    return out;
  }

 private:
  Kind kind_ = Kind::WordPartition;
  int depth_ = 1;
  std::vector<std::vector<Word>> elements_;
};

struct CoverCount {
  BigInt count = 1;
  bool approximate = false;
};

/// Largest n * depth accepted by the subcover counters.
inline constexpr long kCoverDepthLimit = 4096;
/// Largest number of join elements |U|^n a general cover may generate.
inline constexpr double kJoinLimit = 1 << 20;

/// N(U_0^{n-1}, K): exact for word partitions, greedy for general covers.
inline CoverCount min_subcover_count(const SubshiftSpec& shift, const CoverSpec& cover, const Subset& subset, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "n must be >= 1");
  if (subset.alphabet_size() != shift.alphabet_size()) {
    throw Error(ErrorCode::IncompatibleAlphabet, "subset and shift alphabets differ");
  }
  if (static_cast<long>(n) * cover.depth() > kCoverDepthLimit) {
    throw Error(ErrorCode::DepthOverflow, "n * depth exceeds " + std::to_string(kCoverDepthLimit));
  }
  CoverCount out;
  if (!detail::subset_nonempty(shift, subset)) return out;
  if (cover.depth() == 0) return out;
  const int len = n + cover.depth() - 1;
  if (cover.kind() == CoverSpec::Kind::WordPartition) {
    WindowTree tree(shift, subset, 0);
    out.count = detail::layer_counts<BigInt>(tree, len).back();
    return out;
  }
  const auto m = static_cast<double>(cover.elements().size());
  if (std::pow(m, n) > kJoinLimit) throw Error(ErrorCode::DepthOverflow, "join of the cover is too large");
  out.approximate = true;
  const auto words = enumerate_words(shift, subset, 0, len);
  const int d = cover.depth();
  const auto base = static_cast<std::uint64_t>(cover.elements().size());
  // Join element (i_0, ..., i_{n-1}) contains word w when every shifted
  // window of w lies in element i_t.
  std::map<std::uint64_t, std::vector<int>> members;
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    std::vector<std::vector<int>> choices;
    for (int t = 0; t < n; ++t) {
      Word window(words[wi].begin() + t, words[wi].begin() + t + d);
      choices.push_back(cover.elements_containing(window));
    }
    auto dfs = [&](auto&& self, int t, std::uint64_t code) -> void {
      if (t == n) {
        members[code].push_back(static_cast<int>(wi));
        return;
      }
      for (int e : choices[static_cast<std::size_t>(t)]) self(self, t + 1, code * base + static_cast<std::uint64_t>(e));
    };
    dfs(dfs, 0, 0);
  }
  std::vector<char> covered(words.size(), 0);
  std::size_t remaining = words.size();
  long picks = 0;
  while (remaining > 0) {
    std::size_t best_gain = 0;
    const std::vector<int>* best = nullptr;
    for (const auto& [code, ws] : members) {
      std::size_t gain = 0;
      for (int w : ws) gain += covered[static_cast<std::size_t>(w)] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = &ws;
      }
    }
    for (int w : *best) {
      if (!covered[static_cast<std::size_t>(w)]) {
        covered[static_cast<std::size_t>(w)] = 1;
        --remaining;
      }
    }
    ++picks;
  }
  out.count = picks;
  return out;
}

namespace detail {

// Number of realized continuations of `node` (at depth `from`) to depth
// `to`.
inline BigInt continuations(WindowTree& tree, const WindowTree::Node& node, int from, int to) {
  std::unordered_map<std::uint64_t, BigInt> layer{{node.key(), BigInt(1)}};
  for (int depth = from; depth < to; ++depth) {
    std::unordered_map<std::uint64_t, BigInt> next;
    for (const auto& [key, count] : layer) {
      tree.children(WindowTree::Node::from_key(key), depth,
                    [&](Symbol, const WindowTree::Node& child) { next[child.key()] += count; });
    }
    layer = std::move(next);
  }
  BigInt total = 0;
  for (const auto& [key, count] : layer) total += count;
  return total;
}

// Distinct window-tree nodes at a depth.
inline std::vector<WindowTree::Node> nodes_at(WindowTree& tree, int depth) {
  std::vector<std::uint64_t> layer{tree.root().key()};
  if (tree.root().mask == 0) return {};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::uint64_t> next;
    for (auto key : layer) {
      tree.children(WindowTree::Node::from_key(key), d,
                    [&](Symbol, const WindowTree::Node& child) { next.push_back(child.key()); });
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    layer = std::move(next);
  }
  std::vector<WindowTree::Node> out;
  for (auto key : layer) out.push_back(WindowTree::Node::from_key(key));
  return out;
}

}  // namespace detail

/// N((U1)_0^{n-1} | (U2)_0^{n-1}) on the subset, for word partitions.
inline BigInt conditional_count(const SubshiftSpec& shift, const CoverSpec& u1, const CoverSpec& u2, int n,
                                const Subset& subset) {
  if (u1.kind() != CoverSpec::Kind::WordPartition || u2.kind() != CoverSpec::Kind::WordPartition) {
    throw Error(ErrorCode::InvalidSpec, "conditional entropy is implemented for word partitions");
  }
  if (static_cast<long>(n) * std::max(u1.depth(), u2.depth()) > kCoverDepthLimit) {
    throw Error(ErrorCode::DepthOverflow, "n * depth exceeds " + std::to_string(kCoverDepthLimit));
  }
  if (!detail::subset_nonempty(shift, subset)) return 1;
  const int l1 = u1.depth() == 0 ? 0 : n + u1.depth() - 1;
  const int l2 = u2.depth() == 0 ? 0 : n + u2.depth() - 1;
  // A cell of the finer join lies inside one cell of the coarser one.
  if (l1 <= l2) return 1;
  WindowTree tree(shift, subset, 0);
  BigInt best = 0;
  for (const auto& node : detail::nodes_at(tree, l2)) {
    best = std::max(best, detail::continuations(tree, node, l2, l1));
  }
  return best;
}

/// h(T, U1 | U2): slope of log N over the upper half of 1..n_max, clamped
/// to the subadditive upper bound inf_n (1/n) log N_n.
inline EntropyEstimate conditional_cover_entropy(const SubshiftSpec& shift, const CoverSpec& u1, const CoverSpec& u2,
                                                 int n_max, const std::optional<Subset>& subset = std::nullopt) {
  if (n_max < 2) throw Error(ErrorCode::InvalidSpec, "n_max must be >= 2");
  const Subset k = subset ? *subset : Subset::whole(shift.alphabet_size());
  std::vector<double> logs(static_cast<std::size_t>(n_max));
  parallel_for(logs.size(), [&](std::size_t i) {
    logs[i] = log_of(conditional_count(shift, u1, u2, static_cast<int>(i) + 1, k));
  });
  double upper = kInf;
  for (int n = 1; n <= n_max; ++n) upper = std::min(upper, logs[static_cast<std::size_t>(n - 1)] / n);
  const auto fit = fit_upper_half(logs, n_max);
  EntropyEstimate e;
  e.method = EstimateMethod::Sandwich;
  e.n_min = fit.n_min;
  e.n_max = n_max;
  e.residual = fit.residual;
  e.non_convergent = fit.residual > kNonConvergentResidual;
  e.exact = true;
  e.value = std::clamp(fit.slope, 0.0, std::max(0.0, upper));
  e.bounds = std::pair{std::max(0.0, std::min(e.value, fit.slope - fit.residual)), std::max(0.0, upper)};
  return e;
}

/// Upper envelope of h*(T, X): min over U2 of max over U1 of h(T, U1 | U2),
/// both ranging over word partitions of depth 1..max_depth.
inline EntropyEstimate conditional_entropy_star(const SubshiftSpec& shift, int n_max = 16, int max_depth = 6) {
  EntropyEstimate best;
  best.value = kInf;
  for (int d2 = 1; d2 <= max_depth; ++d2) {
    EntropyEstimate worst;
    worst.value = -1.0;
    for (int d1 = 1; d1 <= max_depth; ++d1) {
      auto e = conditional_cover_entropy(shift, CoverSpec::partition(d1), CoverSpec::partition(d2), n_max);
      if (e.value > worst.value) worst = e;
    }
    if (worst.value < best.value) best = worst;
  }
  best.method = EstimateMethod::Sandwich;
  return best;
}

// ---------------------------------------------------------------------------
// Factor maps

/// Eventually periodic target points w^infinity (primitive w) of period at
/// most `max_period`, in (period, lexicographic) order, at most `limit`.
inline std::vector<Word> periodic_target_words(const SubshiftSpec& target, int max_period, int limit) {
  std::vector<Word> out;
  const int m = target.alphabet_size();
  for (int p = 1; p <= max_period && static_cast<int>(out.size()) < limit; ++p) {
    Word w(static_cast<std::size_t>(p), 0);
    while (static_cast<int>(out.size()) < limit) {
      bool primitive = true;
      for (int d = 1; d < p && primitive; ++d) {
        if (p % d != 0) continue;
        bool repeats = true;
        for (int i = d; i < p && repeats; ++i) repeats = w[static_cast<std::size_t>(i)] == w[static_cast<std::size_t>(i - d)];
        if (repeats) primitive = false;
      }
      if (primitive) {
        Word cyc;
        const int reps = (target.graph().block + 2 * p) / p + 1;
        for (int r = 0; r < reps; ++r) cyc.insert(cyc.end(), w.begin(), w.end());
        if (target.is_admissible(cyc)) out.push_back(w);
      }
      int i = p - 1;
      while (i >= 0 && w[static_cast<std::size_t>(i)] + 1 == m) w[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
      ++w[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

namespace detail {

using FiberState = std::pair<std::uint64_t, Word>;

// Log of the number of realized source words of length n + 2r whose image
// is the periodic word y on [0, n), for n = 1..n_max.
inline std::vector<double> fiber_log_counts(const BlockCode& code, const Subset& subset, const Word& y, int n_max) {
  const int r = code.radius();
  const int width = code.window();
  WindowTree tree(code.source(), subset, 0);
  std::vector<double> out;
  if (tree.root().mask == 0) return std::vector<double>(static_cast<std::size_t>(n_max), -kInf);
  std::map<FiberState, double> layer{{{tree.root().key(), Word{}}, 1.0}};
  double scale = 0.0;
  const int total = n_max + 2 * r;
  for (int depth = 0; depth < total; ++depth) {
    std::map<FiberState, double> next;
    for (const auto& [state, weight] : layer) {
      tree.children(WindowTree::Node::from_key(state.first), depth, [&](Symbol s, const WindowTree::Node& child) {
        Word hist = state.second;
        hist.push_back(s);
        if (static_cast<int>(hist.size()) == width) {
          const auto image = code.local(std::span<const Symbol>(hist));
          const auto pos = static_cast<std::size_t>(depth + 1 - width);
          if (!image || *image != y[pos % y.size()]) return;
          hist.erase(hist.begin());
        }
        next[{child.key(), std::move(hist)}] += weight;
      });
    }
    layer = std::move(next);
    double sum = 0.0;
    for (const auto& [state, weight] : layer) sum += weight;
    if (sum <= 0.0) {
      while (static_cast<int>(out.size()) < n_max) out.push_back(-kInf);
      return out;
    }
    for (auto& [state, weight] : layer) weight /= sum;
    scale += std::log(sum);
    if (depth + 1 >= width) out.push_back(scale);
  }
  return out;
}

}  // namespace detail

/// sup over sampled periodic y of the slope of log #(source n-words over
/// y's n-window): an estimate of h_top(T, X | pi).
inline EntropyEstimate relative_entropy_over_factor(const BlockCode& code, int n_max, int fiber_samples,
                                                    int max_period = 6) {
  if (n_max < 2 || fiber_samples < 1) throw Error(ErrorCode::InvalidSpec, "n_max >= 2 and fiber_samples >= 1");
  const auto ys = periodic_target_words(code.target(), max_period, fiber_samples);
  const auto whole = Subset::whole(code.source().alphabet_size());
  std::vector<std::optional<SlopeFit>> fits(ys.size());
  parallel_for(ys.size(), [&](std::size_t i) {
    const auto logs = detail::fiber_log_counts(code, whole, ys[i], n_max);
    if (logs.back() == -kInf) return;
    fits[i] = fit_upper_half(logs, n_max);
  });
  EntropyEstimate e;
  e.method = EstimateMethod::SlopeFit;
  e.n_max = n_max;
  e.n_min = std::max(1, n_max / 2);
  for (const auto& f : fits) {
    if (!f) continue;
    ++e.samples;
    if (e.samples == 1 || f->slope > e.value) {
      e.value = f->slope;
      e.residual = f->residual;
    }
  }
  e.value = std::max(0.0, e.value);
  e.non_convergent = e.residual > kNonConvergentResidual;
  return e;
}

/// Log of the number of distinct image words of the subset on [0, n) for
/// n = 1..n_max (subset construction over source windows [-r, n + r)).
inline std::vector<double> image_log_counts(const BlockCode& code, const Subset& subset, int n_max) {
  const int r = code.radius();
  const int width = code.window();
  WindowTree tree(code.source(), subset, -r);
  std::vector<double> out;
  if (tree.root().mask == 0) return std::vector<double>(static_cast<std::size_t>(n_max), -kInf);
  using StateSet = std::vector<detail::FiberState>;
  std::map<StateSet, BigInt> layer{{StateSet{{tree.root().key(), Word{}}}, BigInt(1)}};
  const int total = n_max + 2 * r;
  for (int depth = 0; depth < total; ++depth) {
    std::map<StateSet, BigInt> next;
    const bool emits = depth + 1 >= width;
    for (const auto& [states, count] : layer) {
      std::map<Symbol, std::set<detail::FiberState>> by_image;
      for (const auto& state : states) {
        tree.children(WindowTree::Node::from_key(state.first), depth, [&](Symbol s, const WindowTree::Node& child) {
          Word hist = state.second;
          hist.push_back(s);
          Symbol image = 0;
          if (emits) {
            const auto im = code.local(std::span<const Symbol>(hist));
            if (!im) return;
            image = *im;
            hist.erase(hist.begin());
          }
          by_image[image].insert({child.key(), std::move(hist)});
        });
      }
      for (auto& [image, set] : by_image) next[StateSet(set.begin(), set.end())] += count;
    }
    layer = std::move(next);
    if (emits) {
      BigInt sum = 0;
      for (const auto& [states, count] : layer) sum += count;
      out.push_back(log_of(sum));
    }
  }
  return out;
}

/// Slope estimate of h(S, pi K) from image word counts.
inline EntropyEstimate estimate_image_entropy(const BlockCode& code, const Subset& subset, int n_max) {
  const auto logs = image_log_counts(code, subset, n_max);
  EntropyEstimate e;
  e.n_max = n_max;
  e.exact = true;
  if (logs.back() == -kInf) return e;
  const auto fit = fit_upper_half(logs, n_max);
  e.n_min = fit.n_min;
  e.value = std::max(0.0, fit.slope);
  e.residual = fit.residual;
  e.non_convergent = fit.residual > kNonConvergentResidual;
  return e;
}

// ---------------------------------------------------------------------------
// Local entropy

/// Phi_eps(x) = {y : d(T^n x, T^n y) <= eps for all n >= 0}: the points
/// agreeing with the center on every coordinate >= -k.
inline DigitSetSchedule forward_fiber(const DigitSetSchedule& center, double eps) {
  if (!center.is_point()) throw Error(ErrorCode::InvalidSpec, "center must be a single point");
  const int k = eps_radius(eps);
  const int m = center.alphabet_size();
  if (k < 0) return DigitSetSchedule::whole(m);
  PeriodicStream back;
  for (int j = 0; j < k; ++j) back.pre.push_back(center.allowed(-j - 1));
  back.period = {SymbolSet::full(m)};
  return DigitSetSchedule::make_two_sided(m, center.forward(), std::move(back));
}

/// h(T, Phi_eps(x)) estimated at the finer radii eps/2, eps/4, eps/8.
inline EntropyEstimate local_entropy(const SubshiftSpec& shift, const DigitSetSchedule& center, double eps,
                                     int n_max = 16) {
  if (center.alphabet_size() != shift.alphabet_size()) {
    throw Error(ErrorCode::IncompatibleAlphabet, "center and shift alphabets differ");
  }
  if (!is_nonempty(shift, Subset(center))) throw Error(ErrorCode::InadmissibleWord, "center is not a point of the shift");
  CoverEstimateParams params;
  params.n_max = n_max;
  params.eps_list = {eps / 2, eps / 4, eps / 8};
  return estimate_cover_entropy(shift, Subset(forward_fiber(center, eps)), params).estimate;
}

}  // namespace entlab
