#pragma once

// Bowen dimensional entropy of schedule subsets: n-values of cylinder
// elements, depth-capped Caratheodory bounds and critical-exponent
// bisection.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/counting.hpp"
#include "entlab/cover_entropy.hpp"
#include "entlab/schedule.hpp"
#include "entlab/subshift.hpp"

namespace entlab {

/// Marker for an infinite n-value.
inline constexpr long kInfiniteN = std::numeric_limits<long>::max();

/// A cylinder [word] placed at coordinates [anchor, anchor + |word| - 1],
/// or, when `singleton` is set, the single point it names.
struct CylinderElement {
  Word word;
  long anchor = 0;
  std::optional<DigitSetSchedule> singleton;
};

/// Length of the cells of U_0^{power-1} for a depth-d word partition.
inline int cell_length(const CoverSpec& u, int power) { return u.depth() + power - 1; }

/// Number of consecutive T^power images of a cylinder on [anchor,
/// anchor + len - 1] lying in one cell of U_0^{power-1}.
inline long cylinder_n_value(long anchor, long len, int cell, int power) {
  if (anchor > 0 || anchor + len < cell) return 0;
  return (anchor + len - cell) / power + 1;
}

inline long n_value(const CylinderElement& e, const CoverSpec& u, int power = 1) {
  if (u.kind() != CoverSpec::Kind::WordPartition) throw Error(ErrorCode::InvalidSpec, "n-values need a word partition");
  if (power < 1) throw Error(ErrorCode::InvalidSpec, "power must be >= 1");
  if (u.depth() == 0) return kInfiniteN;
  if (e.singleton) {
    if (!e.singleton->is_point()) throw Error(ErrorCode::InvalidSpec, "singleton element must name one point");
    return kInfiniteN;
  }
  return cylinder_n_value(e.anchor, static_cast<long>(e.word.size()), cell_length(u, power), power);
}

/// The realized-word tree of a subset on [0, depth), merged by window-tree
/// node per level, with edge multiplicities kept per symbol.
class CylinderTree {
 public:
  CylinderTree(const SubshiftSpec& shift, const Subset& subset, int depth) : depth_(depth) {
    WindowTree tree(shift, subset, 0);
    layers_.resize(static_cast<std::size_t>(depth) + 1);
    edges_.resize(static_cast<std::size_t>(depth));
    if (subset.is_empty_union() || tree.root().mask == 0) {
      empty_ = true;
      return;
    }
    layers_[0].push_back(tree.root().key());
    for (int d = 0; d < depth; ++d) {
      std::unordered_map<std::uint64_t, int> index;
      auto& next = layers_[static_cast<std::size_t>(d) + 1];
      auto& edges = edges_[static_cast<std::size_t>(d)];
      edges.resize(layers_[static_cast<std::size_t>(d)].size());
      for (std::size_t i = 0; i < layers_[static_cast<std::size_t>(d)].size(); ++i) {
        const auto node = WindowTree::Node::from_key(layers_[static_cast<std::size_t>(d)][i]);
        tree.children(node, d, [&](Symbol, const WindowTree::Node& child) {
          auto [it, inserted] = index.emplace(child.key(), static_cast<int>(next.size()));
          if (inserted) next.push_back(child.key());
          edges[i].push_back(it->second);
        });
      }
    }
  }

  bool empty() const { return empty_; }
  int depth() const { return depth_; }
  std::size_t width(int level) const { return layers_[static_cast<std::size_t>(level)].size(); }
  const std::vector<int>& children(int level, std::size_t i) const {
    return edges_[static_cast<std::size_t>(level)][i];
  }

  /// Log number of continuations of each node at every level to level `h`.
  std::vector<std::vector<double>> log_continuations(int h) const {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(h) + 1);
    out[static_cast<std::size_t>(h)].assign(width(h), 0.0);
    for (int d = h - 1; d >= 0; --d) {
      auto& row = out[static_cast<std::size_t>(d)];
      row.assign(width(d), -kInf);
      for (std::size_t i = 0; i < width(d); ++i) {
        for (int c : children(d, i)) row[i] = log_add(row[i], out[static_cast<std::size_t>(d) + 1][static_cast<std::size_t>(c)]);
      }
    }
    return out;
  }

 private:
  int depth_;
  bool empty_ = false;
  std::vector<std::vector<std::uint64_t>> layers_;
  std::vector<std::vector<std::vector<int>>> edges_;
};

/// Log-domain bounds on m(K, lambda, k) over cylinder covers whose
/// elements have depth at most the cap.
struct LogMBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// `cont` holds log continuation counts to some level h >= cap (from
/// CylinderTree::log_continuations); the lower bound uses the uniform
/// measure on depth-h words.
inline LogMBounds log_m_bounds(const CylinderTree& tree, const std::vector<std::vector<double>>& cont, double lambda,
                               long k, int cap, int cell, int power) {
  const long n_cap = cylinder_n_value(0, cap, cell, power);
  if (n_cap < k) {
    throw Error(ErrorCode::DepthCapTooSmall,
                "depth cap " + std::to_string(cap) + " gives n = " + std::to_string(n_cap) + " < k = " + std::to_string(k));
  }
  // Upper: exact optimum over covers by cylinders of depth <= cap; each
  // node either closes (when its n-value reaches k) or splits.
  std::vector<double> v(tree.width(cap), -lambda * static_cast<double>(n_cap));
  for (int d = cap - 1; d >= 0; --d) {
    const long n = cylinder_n_value(0, d, cell, power);
    std::vector<double> row(tree.width(d), -kInf);
    for (std::size_t i = 0; i < row.size(); ++i) {
      for (int c : tree.children(d, i)) row[i] = log_add(row[i], v[static_cast<std::size_t>(c)]);
      if (n >= k) row[i] = std::min(row[i], -lambda * static_cast<double>(n));
    }
    v = std::move(row);
  }
  LogMBounds out;
  out.upper = v[0];
  // Lower: mass distribution. An element with n-value j lies in a
  // cylinder of depth cell + power (j - 1).
  const double log_total = cont[0][0];
  out.lower = kInf;
  for (long j = k; j <= n_cap; ++j) {
    const long depth = cell + power * (j - 1);
    const auto& row = cont[static_cast<std::size_t>(depth)];
    const double log_mu_max = *std::max_element(row.begin(), row.end()) - log_total;
    out.lower = std::min(out.lower, -lambda * static_cast<double>(j) - log_mu_max);
  }
  return out;
}

struct MValue {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on m(K, lambda, k) at the given depth cap (lower bound from the
/// uniform measure on words of twice that depth); the empty set follows
/// the conventions +inf / 1 / 0 by the sign of lambda.
inline MValue m_value(const SubshiftSpec& shift, const Subset& subset, const CoverSpec& u, double lambda, long k,
                      int depth_cap, int power = 1) {
  if (u.kind() != CoverSpec::Kind::WordPartition || u.depth() < 1) {
    throw Error(ErrorCode::InvalidSpec, "m_value needs a word partition of depth >= 1");
  }
  if (k < 1) throw Error(ErrorCode::InvalidSpec, "k must be >= 1");
  if (k > depth_cap) throw Error(ErrorCode::DepthCapTooSmall, "k exceeds the depth cap");
  if (subset.alphabet_size() != shift.alphabet_size()) {
    throw Error(ErrorCode::IncompatibleAlphabet, "subset and shift alphabets differ");
  }
  if (subset.is_empty_union() || !is_nonempty(shift, subset)) {
    const double v = lambda < 0 ? kInf : (lambda == 0 ? 1.0 : 0.0);
    return {v, v};
  }
  const CylinderTree tree(shift, subset, 2 * depth_cap);
  const auto cont = tree.log_continuations(2 * depth_cap);
  const auto b = log_m_bounds(tree, cont, lambda, k, depth_cap, cell_length(u, power), power);
  return {std::exp(b.lower), std::exp(b.upper)};
}

struct CriticalExponent {
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
  bool inconclusive = false;
  int depth_cap = 0;
};

struct DimParams {
  double tol = 1e-3;
  int depth_cap = 0;  // 0 picks a cap aligned with the schedule periods
  int power = 1;
};

namespace detail {

// Two probe scales s1 < s2, both past the transient and differing by a
// multiple of the joint period. Probe i looks at covers with depths in
// [s_i, s_i + width]; the common width is a multiple of the period so the
// two windows see the same phases.
struct ProbeScales {
  int s1 = 0;
  int s2 = 0;
  int width = 0;

  int cap1() const { return s1 + width; }
  int cap2() const { return s2 + width; }
};

inline int round_up(long x, long multiple) { return static_cast<int>(((x + multiple - 1) / multiple) * multiple); }

inline ProbeScales probe_scales(const SubshiftSpec& shift, const Subset& subset, int cell, int power, int depth_cap) {
  const long period = lcm_ll(subset.forward_period_lcm(), power);
  ProbeScales p;
  if (depth_cap > 0) {
    p.s2 = depth_cap / 2;
    p.width = depth_cap - p.s2;
    const long step = period <= p.s2 / 2 ? period * std::max<long>(1, (p.s2 / 2) / period) : std::max(1, p.s2 / 2);
    p.s1 = p.s2 - static_cast<int>(step);
  } else {
    const int transient = static_cast<int>(subset.forward_preperiod_max()) + shift.graph().block + cell + power;
    p.s1 = std::max(16, transient);
    p.s2 = p.s1 + round_up(16, period);
    p.width = round_up(p.s2, period);
  }
  if (p.s1 < cell || p.s1 >= p.s2) throw Error(ErrorCode::DepthCapTooSmall, "depth cap too small for the probe scales");
  return p;
}

}  // namespace detail

/// h^B_U(T^power, K) by bisection on lambda in [0, power * log m]. With
/// k = n(s) and cap s + width, a probe is below the critical exponent when the
/// mass-distribution lower bound grows from s1 to s2, and above when the
/// cover upper bound shrinks while the lower bound does not grow.
inline CriticalExponent dim_entropy(const SubshiftSpec& shift, const Subset& subset, const CoverSpec& u,
                                    const DimParams& params = {}) {
  if (!(params.tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "tol must be > 0");
  if (u.kind() != CoverSpec::Kind::WordPartition) throw Error(ErrorCode::InvalidSpec, "dim_entropy needs a word partition");
  if (params.power < 1) throw Error(ErrorCode::InvalidSpec, "power must be >= 1");
  if (subset.alphabet_size() != shift.alphabet_size()) {
    throw Error(ErrorCode::IncompatibleAlphabet, "subset and shift alphabets differ");
  }
  CriticalExponent out;
  if (u.depth() == 0 || subset.is_empty_union() || !is_nonempty(shift, subset)) return out;
  const int cell = cell_length(u, params.power);
  const auto scales = detail::probe_scales(shift, subset, cell, params.power, params.depth_cap);
  out.depth_cap = scales.cap2();
  const CylinderTree tree(shift, subset, 2 * out.depth_cap);
  const auto cont = tree.log_continuations(2 * out.depth_cap);
  const long k1 = cylinder_n_value(0, scales.s1, cell, params.power);
  const long k2 = cylinder_n_value(0, scales.s2, cell, params.power);
  double lo = 0.0;
  double hi = params.power * std::log(static_cast<double>(shift.alphabet_size()));
  while (hi - lo > params.tol) {
    const double mid = 0.5 * (lo + hi);
    const auto b1 = log_m_bounds(tree, cont, mid, k1, scales.cap1(), cell, params.power);
    const auto b2 = log_m_bounds(tree, cont, mid, k2, scales.cap2(), cell, params.power);
    const bool lower_grows = b2.lower > b1.lower + 1e-9;
    const bool upper_shrinks = b2.upper < b1.upper - 1e-9;
    if (!lower_grows && !upper_shrinks && b2.upper > b1.upper + 1e-9 && b2.lower < b1.lower - 1e-9) {
      out.inconclusive = true;
    }
    const bool above = upper_shrinks && !lower_grows;
    (above ? hi : lo) = mid;
    ++out.iterations;
  }
  out.lower = lo;
  out.upper = hi;
  return out;
}

}  // namespace entlab
