#pragma once

// Exact word counting for schedule subsets of a subshift.
//
// A word on a coordinate window [a, b] is counted when some point of the
// subset restricts to it. Realizability is decided exactly: the window's
// first block must extend leftwards forever and its last block rightwards
// forever inside the schedule, which for eventually periodic schedules is
// a greatest-fixed-point computation on the presentation graph.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/schedule.hpp"
#include "entlab/subshift.hpp"

namespace entlab {

using BigInt = boost::multiprecision::cpp_int;

/// Word counts are exact up to this length and log-domain floating point
/// beyond it.
inline constexpr int kExactCountLimit = 64;

inline double log_of(const BigInt& value) {
  if (value <= 0) return -kInf;
  const auto bits = static_cast<long>(boost::multiprecision::msb(value));
  if (bits < 1000) return std::log(value.convert_to<double>());
  const long shift = bits - 60;
  BigInt top = value >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

/// Which vertices of the presentation extend forever to the right / left
/// inside one schedule.
class Liveness {
 public:
  using VertexSet = std::vector<char>;

  Liveness(const Presentation& graph, const DigitSetSchedule& schedule) : g_(&graph), s_(&schedule) {
    init_forward_cycle();
    init_backward_cycle();
  }

  /// Vertices whose last symbol sits at coordinate `c` and that continue
  /// forever to the right within the schedule.
  const VertexSet& forward(long c) {
    if (c >= fstart_) return fcycle_at(c);
    auto it = fmemo_.find(c);
    if (it != fmemo_.end()) return it->second;
    long x = c + 1;
    while (x < fstart_ && !fmemo_.count(x)) ++x;
    for (long y = x - 1; y >= c; --y) {
      const VertexSet& next = y + 1 >= fstart_ ? fcycle_at(y + 1) : fmemo_.at(y + 1);
      fmemo_.emplace(y, pre_forward(next, s_->allowed(y + 1)));
    }
    return fmemo_.at(c);
  }

  /// Vertices whose first symbol sits at coordinate `a` and that continue
  /// forever to the left within the schedule.
  const VertexSet& backward(long a) {
    if (a <= bstart_) return bcycle_at(a);
    auto it = bmemo_.find(a);
    if (it != bmemo_.end()) return it->second;
    long x = a - 1;
    while (x > bstart_ && !bmemo_.count(x)) --x;
    for (long y = x + 1; y <= a; ++y) {
      const VertexSet& prev = y - 1 <= bstart_ ? bcycle_at(y - 1) : bmemo_.at(y - 1);
      bmemo_.emplace(y, pre_backward(prev, s_->allowed(y - 1)));
    }
    return bmemo_.at(a);
  }

 private:
  const VertexSet& fcycle_at(long c) const {
    return fcycle_[static_cast<std::size_t>((c - fstart_) % static_cast<long>(fcycle_.size()))];
  }
  const VertexSet& bcycle_at(long a) const {
    return bcycle_[static_cast<std::size_t>((bstart_ - a) % static_cast<long>(bcycle_.size()))];
  }

  VertexSet pre_forward(const VertexSet& next, const SymbolSet& allowed_next) const {
    VertexSet r(next.size(), 0);
    for (int v = 0; v < g_->size(); ++v) {
      for (const auto& e : g_->out[static_cast<std::size_t>(v)]) {
        if (allowed_next.contains(e.symbol) && next[static_cast<std::size_t>(e.vertex)]) {
          r[static_cast<std::size_t>(v)] = 1;
          break;
        }
      }
    }
    return r;
  }

  VertexSet pre_backward(const VertexSet& prev, const SymbolSet& allowed_prev) const {
    VertexSet r(prev.size(), 0);
    for (int v = 0; v < g_->size(); ++v) {
      for (const auto& e : g_->in[static_cast<std::size_t>(v)]) {
        if (allowed_prev.contains(e.symbol) && prev[static_cast<std::size_t>(e.vertex)]) {
          r[static_cast<std::size_t>(v)] = 1;
          break;
        }
      }
    }
    return r;
  }

  // Coordinates c >= fstart_ see only the periodic part to their right.
  void init_forward_cycle() {
    fstart_ = static_cast<long>(s_->forward().pre.size()) - 1;
    const auto q = static_cast<long>(s_->forward().period.size());
    fcycle_.assign(static_cast<std::size_t>(q), VertexSet(static_cast<std::size_t>(g_->size()), 1));
    for (bool changed = true; changed;) {
      changed = false;
      for (long phase = q - 1; phase >= 0; --phase) {
        auto next = pre_forward(fcycle_[static_cast<std::size_t>((phase + 1) % q)], s_->allowed(fstart_ + phase + 1));
        if (next != fcycle_[static_cast<std::size_t>(phase)]) {
          fcycle_[static_cast<std::size_t>(phase)] = std::move(next);
          changed = true;
        }
      }
    }
  }

  void init_backward_cycle() {
    bstart_ = -static_cast<long>(s_->backward().pre.size());
    const auto q = static_cast<long>(s_->backward().period.size());
    bcycle_.assign(static_cast<std::size_t>(q), VertexSet(static_cast<std::size_t>(g_->size()), 1));
    for (bool changed = true; changed;) {
      changed = false;
      for (long phase = q - 1; phase >= 0; --phase) {
        auto next = pre_backward(bcycle_[static_cast<std::size_t>((phase + 1) % q)], s_->allowed(bstart_ - phase - 1));
        if (next != bcycle_[static_cast<std::size_t>(phase)]) {
          bcycle_[static_cast<std::size_t>(phase)] = std::move(next);
          changed = true;
        }
      }
    }
  }

  const Presentation* g_;
  const DigitSetSchedule* s_;
  long fstart_ = 0;
  long bstart_ = 0;
  std::vector<VertexSet> fcycle_;
  std::vector<VertexSet> bcycle_;
  std::map<long, VertexSet> fmemo_;
  std::map<long, VertexSet> bmemo_;
};

/// Navigates the tree of realized words of a subset on a window starting
/// at `origin`. A node is (state, member mask): the state is a prefix-trie
/// node while fewer than `block` symbols are known, and a presentation
/// vertex afterwards; the mask records which union members still contain
/// a point with this prefix.
class WindowTree {
 public:
  struct Node {
    int state = 0;
    std::uint32_t mask = 0;

    std::uint64_t key() const { return (static_cast<std::uint64_t>(state) << 32) | mask; }
    static Node from_key(std::uint64_t k) {
      return {static_cast<int>(k >> 32), static_cast<std::uint32_t>(k & 0xffffffffu)};
    }
    friend bool operator==(const Node& a, const Node& b) { return a.state == b.state && a.mask == b.mask; }
  };

  WindowTree(const SubshiftSpec& shift, const Subset& subset, long origin)
      : g_(&shift.graph()), subset_(&subset), origin_(origin) {
    if (subset.alphabet_size() != shift.alphabet_size()) {
      throw Error(ErrorCode::IncompatibleAlphabet, "subset and shift alphabets differ");
    }
    for (const auto& m : subset.members()) live_.emplace_back(*g_, m);
    build_trie();
    compute_start_viability();
  }

  int block() const { return g_->block; }
  long origin() const { return origin_; }
  int members() const { return static_cast<int>(live_.size()); }
  const Presentation& graph() const { return *g_; }

  Node root() const { return {0, root_mask_}; }

  /// Vertex id for a state at depth >= block, -1 otherwise.
  int vertex_of(const Node& n) const { return n.state >= trie_size() ? n.state - trie_size() : -1; }

  /// Calls f(symbol, child) for every realized one-symbol extension of a
  /// node at the given depth (number of symbols already fixed).
  template <class F>
  void children(const Node& node, int depth, F&& f) {
    const long coord = origin_ + depth;
    const auto& symbol_masks = allowed_masks(depth);
    if (node.state < trie_size()) {
      for (const auto& [s, child] : trie_children_[static_cast<std::size_t>(node.state)]) {
        const std::uint32_t mask = node.mask & symbol_masks[s] & viability(child);
        if (mask) f(static_cast<Symbol>(s), Node{child, mask});
      }
      return;
    }
    const int v = node.state - trie_size();
    const auto& live = forward_masks(coord);
    for (const auto& e : g_->out[static_cast<std::size_t>(v)]) {
      const std::uint32_t mask = node.mask & symbol_masks[e.symbol] & live[static_cast<std::size_t>(e.vertex)];
      if (mask) f(e.symbol, Node{trie_size() + e.vertex, mask});
    }
  }

 private:
  int trie_size() const { return static_cast<int>(trie_children_.size()); }

  std::uint32_t viability(int state) const {
    return state < trie_size() ? trie_viable_[static_cast<std::size_t>(state)]
                               : vertex_viable_[static_cast<std::size_t>(state - trie_size())];
  }

  // Member mask per symbol at coordinate origin + depth.
  const std::vector<std::uint32_t>& allowed_masks(int depth) {
    while (static_cast<int>(allowed_cache_.size()) <= depth) {
      const long coord = origin_ + static_cast<long>(allowed_cache_.size());
      std::vector<std::uint32_t> masks(static_cast<std::size_t>(g_->alphabet), 0);
      for (std::size_t i = 0; i < subset_->members().size(); ++i) {
        const auto& allowed = subset_->members()[i].allowed(coord);
        for (int s = 0; s < g_->alphabet; ++s) {
          if (allowed.contains(s)) masks[static_cast<std::size_t>(s)] |= 1u << i;
        }
      }
      allowed_cache_.push_back(std::move(masks));
    }
    return allowed_cache_[static_cast<std::size_t>(depth)];
  }

  // Member mask per vertex: forward-live with last symbol at `coord`.
  const std::vector<std::uint32_t>& forward_masks(long coord) {
    const auto idx = static_cast<std::size_t>(coord - origin_);
    while (forward_cache_.size() <= idx) {
      const long c = origin_ + static_cast<long>(forward_cache_.size());
      std::vector<std::uint32_t> masks(static_cast<std::size_t>(g_->size()), 0);
      for (std::size_t i = 0; i < live_.size(); ++i) {
        const auto& f = live_[i].forward(c);
        for (int v = 0; v < g_->size(); ++v) {
          if (f[static_cast<std::size_t>(v)]) masks[static_cast<std::size_t>(v)] |= 1u << i;
        }
      }
      forward_cache_.push_back(std::move(masks));
    }
    return forward_cache_[idx];
  }

  void build_trie() {
    // Trie over proper prefixes (length < block) of vertex words; the
    // children of depth block-1 nodes are vertex states.
    const int block = g_->block;
    std::map<Word, int> ids;
    ids[Word{}] = 0;
    trie_words_.push_back(Word{});
    for (const auto& v : g_->vertices) {
      for (int len = 1; len < block; ++len) {
        Word p(v.begin(), v.begin() + len);
        if (!ids.count(p)) {
          ids[p] = static_cast<int>(trie_words_.size());
          trie_words_.push_back(p);
        }
      }
    }
    trie_children_.assign(trie_words_.size(), {});
    const int trie_count = static_cast<int>(trie_words_.size());
    for (int t = 0; t < trie_count; ++t) {
      const Word& p = trie_words_[static_cast<std::size_t>(t)];
      if (static_cast<int>(p.size()) + 1 < block) {
        for (int s = 0; s < g_->alphabet; ++s) {
          Word c = p;
          c.push_back(static_cast<Symbol>(s));
          auto it = ids.find(c);
          if (it != ids.end()) trie_children_[static_cast<std::size_t>(t)].emplace_back(s, it->second);
        }
      } else {
        for (int s = 0; s < g_->alphabet; ++s) {
          Word c = p;
          c.push_back(static_cast<Symbol>(s));
          const int v = g_->find(c);
          if (v >= 0) trie_children_[static_cast<std::size_t>(t)].emplace_back(s, trie_count + v);
        }
      }
    }
  }

  // A vertex placed at coordinates [origin, origin + block - 1] is viable
  // for a member when its symbols are allowed there and it extends both
  // ways; trie nodes inherit the union of their descendants.
  void compute_start_viability() {
    const int block = g_->block;
    vertex_viable_.assign(static_cast<std::size_t>(g_->size()), 0);
    for (std::size_t i = 0; i < live_.size(); ++i) {
      const auto& member = subset_->members()[i];
      const auto& back = live_[i].backward(origin_);
      const auto& fwd = live_[i].forward(origin_ + block - 1);
      for (int v = 0; v < g_->size(); ++v) {
        if (!back[static_cast<std::size_t>(v)] || !fwd[static_cast<std::size_t>(v)]) continue;
        const Word& w = g_->vertices[static_cast<std::size_t>(v)];
        bool ok = true;
        for (int j = 0; j < block && ok; ++j) ok = member.allowed(origin_ + j).contains(w[static_cast<std::size_t>(j)]);
        if (ok) vertex_viable_[static_cast<std::size_t>(v)] |= 1u << i;
      }
    }
    trie_viable_.assign(trie_words_.size(), 0);
    for (int v = 0; v < g_->size(); ++v) {
      const Word& w = g_->vertices[static_cast<std::size_t>(v)];
      // Walk the trie along the vertex's proper prefixes.
      int t = 0;
      trie_viable_[0] |= vertex_viable_[static_cast<std::size_t>(v)];
      for (int len = 1; len < block; ++len) {
        for (const auto& [s, child] : trie_children_[static_cast<std::size_t>(t)]) {
          if (s == w[static_cast<std::size_t>(len - 1)]) {
            t = child;
            break;
          }
        }
        trie_viable_[static_cast<std::size_t>(t)] |= vertex_viable_[static_cast<std::size_t>(v)];
      }
    }
    root_mask_ = trie_viable_[0];
  }

  const Presentation* g_;
  const Subset* subset_;
  long origin_;
  std::vector<Liveness> live_;
  std::vector<Word> trie_words_;
  std::vector<std::vector<std::pair<int, int>>> trie_children_;
  std::vector<std::uint32_t> trie_viable_;
  std::vector<std::uint32_t> vertex_viable_;
  std::uint32_t root_mask_ = 0;
  std::vector<std::vector<std::uint32_t>> allowed_cache_;
  std::vector<std::vector<std::uint32_t>> forward_cache_;
};

namespace detail {

// Layer-by-layer path counting. Returns counts for window lengths
// 1..max_len; for double, values are logs and layers are rescaled.
template <class Num>
std::vector<Num> layer_counts(WindowTree& tree, int max_len) {
  constexpr bool kLog = std::is_same_v<Num, double>;
  std::vector<Num> result;
  result.reserve(static_cast<std::size_t>(max_len));
  std::unordered_map<std::uint64_t, Num> layer;
  const auto root = tree.root();
  double scale = 0.0;
  if (root.mask == 0) {
    for (int i = 0; i < max_len; ++i) result.push_back(kLog ? Num(-kInf) : Num(0));
    return result;
  }
  layer.emplace(root.key(), Num(1));
  for (int depth = 0; depth < max_len; ++depth) {
    std::unordered_map<std::uint64_t, Num> next;
    next.reserve(layer.size() * 2);
    for (const auto& [key, count] : layer) {
      tree.children(WindowTree::Node::from_key(key), depth,
                    [&](Symbol, const WindowTree::Node& child) { next[child.key()] += count; });
    }
    layer = std::move(next);
    Num total(0);
    for (const auto& [key, count] : layer) total += count;
    if constexpr (kLog) {
      if (total <= 0.0) {
        for (int i = depth; i < max_len; ++i) result.push_back(-kInf);
        return result;
      }
      result.push_back(scale + std::log(total));
      for (auto& [key, count] : layer) count /= total;
      scale += std::log(total);
    } else {
      result.push_back(total);
      if (total == 0) {
        for (int i = depth + 1; i < max_len; ++i) result.push_back(Num(0));
        return result;
      }
    }
  }
  return result;
}

}  // namespace detail

/// Exact counts of realized words on windows [origin, origin + len - 1]
/// for len = 1..max_len.
inline std::vector<BigInt> window_counts_exact(const SubshiftSpec& shift, const Subset& subset, long origin,
                                               int max_len) {
  WindowTree tree(shift, subset, origin);
  return detail::layer_counts<BigInt>(tree, max_len);
}

/// Log counts (natural log; -inf for zero) for len = 1..max_len. Exact
/// integer arithmetic is used while len <= kExactCountLimit.
inline std::vector<double> window_log_counts(const SubshiftSpec& shift, const Subset& subset, long origin,
                                             int max_len) {
  WindowTree tree(shift, subset, origin);
  if (max_len <= kExactCountLimit) {
    auto exact = detail::layer_counts<BigInt>(tree, max_len);
    std::vector<double> out;
    out.reserve(exact.size());
    for (const auto& c : exact) out.push_back(log_of(c));
    return out;
  }
  return detail::layer_counts<double>(tree, max_len);
}

/// Number of distinct restrictions of subset points to an arbitrary finite
/// coordinate set, by subset construction over the window tree.
template <class Num = BigInt>
Num count_patterns(const SubshiftSpec& shift, const Subset& subset, std::vector<long> coords) {
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  if (coords.empty()) return subset.is_empty_union() ? Num(0) : Num(1);
  const long first = coords.front();
  const long last = coords.back();
  WindowTree tree(shift, subset, first);
  const auto root = tree.root();
  if (root.mask == 0) return Num(0);
  std::map<std::vector<std::uint64_t>, Num> layer;
  layer.emplace(std::vector<std::uint64_t>{root.key()}, Num(1));
  std::size_t next_coord = 0;
  for (long c = first; c <= last; ++c) {
    const bool observed = next_coord < coords.size() && coords[next_coord] == c;
    if (observed) ++next_coord;
    const int depth = static_cast<int>(c - first);
    std::map<std::vector<std::uint64_t>, Num> next;
    for (const auto& [nodes, count] : layer) {
      std::map<Symbol, std::vector<std::uint64_t>> by_symbol;
      for (auto key : nodes) {
        tree.children(WindowTree::Node::from_key(key), depth, [&](Symbol s, const WindowTree::Node& child) {
          by_symbol[observed ? s : Symbol{0}].push_back(child.key());
        });
      }
      for (auto& [s, keys] : by_symbol) {
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        next[keys] += count;
      }
    }
    layer = std::move(next);
  }
  Num total(0);
  for (const auto& [nodes, count] : layer) total += count;
  return total;
}

/// A word count: exact below the limit, log-domain (flagged) above it.
struct WordCount {
  std::optional<BigInt> exact;
  double log_value = -kInf;
  bool approximate = false;

  std::string str() const {
    if (exact) return exact->str();
    return "exp(" + std::to_string(log_value) + ")";
  }
};

/// Number of admissible n-words on coordinates 0..n-1 consistent with the
/// constraint (the whole shift when none is given).
inline WordCount count_words(const SubshiftSpec& shift, const std::optional<Subset>& constraint, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "n must be >= 1");
  const Subset subset = constraint ? *constraint : Subset::whole(shift.alphabet_size());
  if (subset.alphabet_size() != shift.alphabet_size()) {
    throw Error(ErrorCode::IncompatibleAlphabet, "constraint alphabet differs from the shift alphabet");
  }
  WordCount wc;
  if (n <= kExactCountLimit) {
    auto counts = window_counts_exact(shift, subset, 0, n);
    wc.exact = counts.back();
    wc.log_value = log_of(*wc.exact);
  } else {
    auto logs = window_log_counts(shift, subset, 0, n);
    wc.log_value = logs.back();
    wc.approximate = true;
  }
  return wc;
}

/// True when the subset has at least one point in the shift.
inline bool is_nonempty(const SubshiftSpec& shift, const Subset& subset) {
  if (subset.is_empty_union()) return false;
  WindowTree tree(shift, subset, 0);
  return tree.root().mask != 0;
}

}  // namespace entlab

namespace entlab {

/// All realized words of the subset on [origin, origin + len - 1], in
/// lexicographic order. Exponential; meant for small windows.
inline std::vector<Word> enumerate_words(const SubshiftSpec& shift, const Subset& subset, long origin, int len) {
  WindowTree tree(shift, subset, origin);
  std::vector<Word> out;
  if (tree.root().mask == 0) return out;
  Word prefix;
  auto dfs = [&](auto&& self, const WindowTree::Node& node, int depth) -> void {
    if (depth == len) {
      out.push_back(prefix);
      return;
    }
    std::vector<std::pair<Symbol, WindowTree::Node>> kids;
    tree.children(node, depth, [&](Symbol s, const WindowTree::Node& child) { kids.emplace_back(s, child); });
    std::sort(kids.begin(), kids.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [s, child] : kids) {
      prefix.push_back(s);
      self(self, child, depth + 1);
      prefix.pop_back();
    }
  };
  dfs(dfs, tree.root(), 0);
  return out;
}

}  // namespace entlab

namespace entlab {

/// Exact entropy of an eventually periodic schedule intersected with the
/// shift: (1/q) log of the Perron root of the one-period transfer product,
/// restricted to blocks that are realized and extend forever. For a finite
/// union this is the maximum over members; the empty set gives 0.
inline double periodic_schedule_entropy(const SubshiftSpec& shift, const Subset& subset) {
  const auto& g = shift.graph();
  const int n = g.size();
  double best = 0.0;
  for (const auto& member : subset.members()) {
    const Subset single(member);
    const long q = static_cast<long>(member.period().size());
    const long start = std::max<long>(static_cast<long>(member.preperiod().size()), g.block);
    // Blocks realized with last symbol at coordinate start - 1.
    WindowTree tree(shift, single, 0);
    if (tree.root().mask == 0) continue;
    std::vector<WindowTree::Node> layer{tree.root()};
    for (int depth = 0; depth < start; ++depth) {
      std::vector<WindowTree::Node> next;
      for (const auto& node : layer) {
        tree.children(node, depth, [&](Symbol, const WindowTree::Node& child) { next.push_back(child); });
      }
      std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
      next.erase(std::unique(next.begin(), next.end()), next.end());
      layer = std::move(next);
    }
    std::vector<char> realized(static_cast<std::size_t>(n), 0);
    for (const auto& node : layer) {
      if (const int v = tree.vertex_of(node); v >= 0) realized[static_cast<std::size_t>(v)] = 1;
    }
    if (std::none_of(realized.begin(), realized.end(), [](char c) { return c != 0; })) continue;

    std::vector<std::vector<double>> product(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int v = 0; v < n; ++v) product[v][v] = 1.0;
    double log_scale = 0.0;
    for (long c = start; c < start + q; ++c) {
      const auto& allowed = member.allowed(c);
      std::vector<std::vector<double>> next(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
      for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
          const double x = product[u][v];
          if (x == 0.0) continue;
          for (const auto& e : g.out[static_cast<std::size_t>(v)]) {
            if (allowed.contains(e.symbol)) next[u][e.vertex] += x;
          }
        }
      }
      double top = 0.0;
      for (const auto& row : next) top = std::max(top, *std::max_element(row.begin(), row.end()));
      if (top == 0.0) {
        product = std::move(next);
        break;
      }
      for (auto& row : next) {
        for (auto& x : row) x /= top;
      }
      log_scale += std::log(top);
      product = std::move(next);
    }
    // Restrict to blocks reachable (through the product) from realized ones.
    std::vector<char> keep = realized;
    for (bool grew = true; grew;) {
      grew = false;
      for (int u = 0; u < n; ++u) {
        if (!keep[static_cast<std::size_t>(u)]) continue;
        for (int v = 0; v < n; ++v) {
          if (product[u][v] > 0.0 && !keep[static_cast<std::size_t>(v)]) {
            keep[static_cast<std::size_t>(v)] = 1;
            grew = true;
          }
        }
      }
    }
    std::vector<int> idx;
    for (int v = 0; v < n; ++v) {
      if (keep[static_cast<std::size_t>(v)]) idx.push_back(v);
    }
    std::vector<std::vector<double>> sub(idx.size(), std::vector<double>(idx.size(), 0.0));
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) sub[a][b] = product[idx[a]][idx[b]];
    }
    const auto root = perron_root(sub, log_scale);
    if (root.log_root > -kInf) best = std::max(best, root.log_root / static_cast<double>(q));
  }
  return best;
}

}  // namespace entlab
