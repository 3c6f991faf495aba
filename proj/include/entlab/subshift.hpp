#pragma once

// Subshifts of finite type over a finite alphabet, presented as a
// higher-block vertex graph, plus the Perron-root entropy oracle.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "entlab/core.hpp"

namespace entlab {

/// Vertex graph whose vertices are the admissible words of length `block`.
/// A bi-infinite path spells a point of the shift; every vertex lies on one
/// (the graph is trimmed to its essential part on construction).
struct Presentation {
  struct Edge {
    Symbol symbol;  // symbol appended (out edges) or prepended (in edges)
    int vertex;
  };

  int alphabet = 0;
  int block = 1;
  std::vector<Word> vertices;
  std::vector<std::vector<Edge>> out;
  std::vector<std::vector<Edge>> in;

  int size() const { return static_cast<int>(vertices.size()); }

  int find(const Word& w) const {
    auto it = index_.find(encode(w));
    return it == index_.end() ? -1 : it->second;
  }

  std::uint64_t encode(const Word& w) const {
    std::uint64_t code = 0;
    for (Symbol s : w) code = code * static_cast<std::uint64_t>(alphabet) + s;
    return code;
  }

  void reindex() {
    index_.clear();
    for (int v = 0; v < size(); ++v) index_.emplace(encode(vertices[static_cast<std::size_t>(v)]), v);
  }

 private:
  std::unordered_map<std::uint64_t, int> index_;
};

namespace detail {

/// Tarjan strongly connected components; returns component id per vertex.
inline std::vector<int> strong_components(const std::vector<std::vector<int>>& adj, int& count) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  int next = 0;
  count = 0;
  // Iterative DFS: (vertex, next child position).
  std::vector<std::pair<int, std::size_t>> call;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos < adj[v].size()) {
        const int w = adj[v][pos++];
        if (index[w] == -1) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = count;
          } while (w != v);
          ++count;
        }
        const int finished = v;
        call.pop_back();
        if (!call.empty()) {
          const int parent = call.back().first;
          low[parent] = std::min(low[parent], low[finished]);
        }
      }
    }
  }
  return comp;
}

}  // namespace detail

/// Result of a Perron-root computation on a nonnegative matrix.
struct PerronRoot {
  double log_root = -kInf;  // log of the spectral radius (-inf for nilpotent)
  bool irreducible = true;  // false when several nontrivial components exist
  int nontrivial_components = 0;
};

/// Spectral radius of a square nonnegative matrix, by Collatz-Wielandt
/// bracketing of power iteration on (B + I) for each irreducible block.
/// `log_scale` is added to the result (for matrices that were normalized).
inline PerronRoot perron_root(const std::vector<std::vector<double>>& matrix, double log_scale = 0.0,
                              double rel_tol = 1e-12) {
  PerronRoot result;
  const int n = static_cast<int>(matrix.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (matrix[i][j] > 0.0) adj[i].push_back(j);
    }
  }
  int count = 0;
  const auto comp = detail::strong_components(adj, count);
  std::vector<std::vector<int>> members(count);
  for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);

  double best = -kInf;
  for (const auto& block : members) {
    const int k = static_cast<int>(block.size());
    bool nontrivial = k > 1 || matrix[block[0]][block[0]] > 0.0;
    if (!nontrivial) continue;
    ++result.nontrivial_components;
    double scale = 0.0;
    for (int a : block) {
      for (int b : block) scale = std::max(scale, matrix[a][b]);
    }
    // Power iteration on B/scale + I; eigenvalue shift keeps it primitive.
    std::vector<double> x(k, 1.0), y(k);
    double lo = 0.0;
    double hi = kInf;
    for (int iter = 0; iter < 2000000; ++iter) {
      for (int a = 0; a < k; ++a) {
        double acc = x[a];
        for (int b = 0; b < k; ++b) acc += matrix[block[a]][block[b]] / scale * x[b];
        y[a] = acc;
      }
      lo = kInf;
      hi = 0.0;
      double norm = 0.0;
      for (int a = 0; a < k; ++a) {
        const double ratio = y[a] / x[a];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        norm = std::max(norm, y[a]);
      }
      for (int a = 0; a < k; ++a) x[a] = y[a] / norm;
      const double rho = 0.5 * (lo + hi) - 1.0;
      if (hi - lo <= rel_tol * std::max(rho, 1e-300)) break;
    }
    const double rho = (0.5 * (lo + hi) - 1.0) * scale;
    best = std::max(best, std::log(rho));
  }
  result.irreducible = result.nontrivial_components <= 1;
  result.log_root = best == -kInf ? -kInf : best + log_scale;
  return result;
}

/// A subshift of finite type over {0, ..., alphabet-1}, given by forbidden
/// words or a 0/1 transition matrix.
class SubshiftSpec {
 public:
  static SubshiftSpec full(int alphabet) { return from_forbidden(alphabet, {}); }

  static SubshiftSpec from_forbidden(int alphabet, std::vector<Word> forbidden) {
    if (alphabet < 1 || alphabet > kMaxAlphabet) {
      throw Error(ErrorCode::InvalidSpec, "alphabet size must be in [1, 256]");
    }
    int longest = 0;
    for (const auto& w : forbidden) {
      if (w.empty()) throw Error(ErrorCode::InvalidSpec, "forbidden word must be non-empty");
      for (Symbol s : w) {
        if (s >= alphabet) throw Error(ErrorCode::InvalidSpec, "forbidden word uses symbol outside alphabet");
      }
      longest = std::max(longest, static_cast<int>(w.size()));
    }
    SubshiftSpec spec;
    spec.alphabet_ = alphabet;
    spec.forbidden_ = std::move(forbidden);
    spec.memory_ = std::max(longest - 1, 0);
    spec.build_from_forbidden();
    return spec;
  }

  static SubshiftSpec from_matrix(std::vector<std::vector<int>> matrix) {
    const int m = static_cast<int>(matrix.size());
    if (m < 1 || m > kMaxAlphabet) throw Error(ErrorCode::InvalidSpec, "matrix size must be in [1, 256]");
    for (const auto& row : matrix) {
      if (static_cast<int>(row.size()) != m) throw Error(ErrorCode::InvalidSpec, "transition matrix must be square");
      for (int e : row) {
        if (e != 0 && e != 1) throw Error(ErrorCode::InvalidSpec, "transition matrix entries must be 0/1");
      }
    }
    SubshiftSpec spec;
    spec.alphabet_ = m;
    spec.matrix_ = std::move(matrix);
    spec.memory_ = 1;
    spec.build_from_matrix();
    return spec;
  }

  int alphabet_size() const { return alphabet_; }
  int memory() const { return memory_; }
  const std::vector<Word>& forbidden_words() const { return forbidden_; }
  const std::optional<std::vector<std::vector<int>>>& transition_matrix() const { return matrix_; }
  const Presentation& graph() const { return *graph_; }

  /// Number of vertices removed by trimming (symbols or blocks that lie on
  /// no bi-infinite path).
  int stranded() const { return stranded_; }

  bool is_full_shift() const { return !matrix_ && forbidden_.empty(); }

  /// True when `w` occurs in some point of the shift.
  bool is_admissible(const Word& w) const {
    const auto& g = *graph_;
    for (Symbol s : w) {
      if (s >= alphabet_) return false;
    }
    if (static_cast<int>(w.size()) < g.block) {
      for (const auto& v : g.vertices) {
        if (std::equal(w.begin(), w.end(), v.begin())) return true;
      }
      return false;
    }
    Word window(w.begin(), w.begin() + g.block);
    int v = g.find(window);
    if (v < 0) return false;
    for (std::size_t i = static_cast<std::size_t>(g.block); i < w.size(); ++i) {
      int next = -1;
      for (const auto& e : g.out[static_cast<std::size_t>(v)]) {
        if (e.symbol == w[i]) {
          next = e.vertex;
          break;
        }
      }
      if (next < 0) return false;
      v = next;
    }
    return true;
  }

  /// Whether the trimmed graph is primitive (the shift is mixing).
  bool is_mixing() const {
    const auto& g = *graph_;
    const int n = g.size();
    std::vector<std::vector<int>> adj(n);
    for (int v = 0; v < n; ++v) {
      for (const auto& e : g.out[static_cast<std::size_t>(v)]) adj[v].push_back(e.vertex);
    }
    int count = 0;
    detail::strong_components(adj, count);
    if (count != 1) return false;
    // Irreducible; primitive iff the gcd of cycle lengths is 1. Use BFS
    // levels: period = gcd over edges of level(u) + 1 - level(v).
    std::vector<int> level(n, -1);
    std::vector<int> queue{0};
    level[0] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      for (int v : adj[u]) {
        if (level[v] < 0) {
          level[v] = level[u] + 1;
          queue.push_back(v);
        }
      }
    }
    long long period = 0;
    for (int u = 0; u < n; ++u) {
      for (int v : adj[u]) period = std::gcd(period, static_cast<long long>(std::abs(level[u] + 1 - level[v])));
    }
    return period == 1;
  }

  /// Symbol with a self-loop in the symbol transition structure, if any.
  std::optional<Symbol> self_loop_symbol() const {
    for (int s = 0; s < alphabet_; ++s) {
      Word w(static_cast<std::size_t>(graph_->block) + 2, static_cast<Symbol>(s));
      if (is_admissible(w)) return static_cast<Symbol>(s);
    }
    return std::nullopt;
  }

  /// Shortest word u such that u repeated forever is a point of the shift.
  Word shortest_cycle_word() const {
    if (auto s = self_loop_symbol()) return Word{*s};
    const auto& g = *graph_;
    // BFS from every vertex back to itself; the label of the cycle is the
    // periodic word.
    Word best;
    for (int start = 0; start < g.size(); ++start) {
      std::vector<int> parent(static_cast<std::size_t>(g.size()), -2);
      std::vector<Symbol> via(static_cast<std::size_t>(g.size()), 0);
      std::vector<int> queue;
      for (const auto& e : g.out[static_cast<std::size_t>(start)]) {
        if (parent[static_cast<std::size_t>(e.vertex)] == -2) {
          parent[static_cast<std::size_t>(e.vertex)] = -1;
          via[static_cast<std::size_t>(e.vertex)] = e.symbol;
          queue.push_back(e.vertex);
        }
      }
      bool found = parent[static_cast<std::size_t>(start)] != -2;
      for (std::size_t h = 0; h < queue.size() && !found; ++h) {
        const int u = queue[h];
        for (const auto& e : g.out[static_cast<std::size_t>(u)]) {
          if (parent[static_cast<std::size_t>(e.vertex)] == -2) {
            parent[static_cast<std::size_t>(e.vertex)] = u;
            via[static_cast<std::size_t>(e.vertex)] = e.symbol;
            queue.push_back(e.vertex);
            if (e.vertex == start) {
              found = true;
              break;
            }
          }
        }
      }
      if (!found) continue;
      Word labels;
      for (int v = start;;) {
        labels.push_back(via[static_cast<std::size_t>(v)]);
        const int p = parent[static_cast<std::size_t>(v)];
        if (p == -1) break;
        v = p;
      }
      std::reverse(labels.begin(), labels.end());
      if (best.empty() || labels.size() < best.size()) best = labels;
    }
    return best;
  }

 private:
  SubshiftSpec() : graph_(std::make_shared<Presentation>()) {}

  bool avoids_forbidden_suffix(const Word& w) const {
    for (const auto& f : forbidden_) {
      if (f.size() <= w.size() && std::equal(f.begin(), f.end(), w.end() - static_cast<long>(f.size()))) {
        return false;
      }
    }
    return true;
  }

  void build_from_forbidden() {
    const int block = std::max(memory_, 1);
    double states = std::pow(static_cast<double>(alphabet_), block);
    if (states > 4.0e6) throw Error(ErrorCode::InternalLimit, "presentation too large");
    auto g = std::make_shared<Presentation>();
    g->alphabet = alphabet_;
    g->block = block;
    // Enumerate admissible block-words by extension, checking suffixes.
    std::vector<Word> layer{Word{}};
    for (int len = 0; len < block; ++len) {
      std::vector<Word> next;
      for (const auto& w : layer) {
        for (int s = 0; s < alphabet_; ++s) {
          Word x = w;
          x.push_back(static_cast<Symbol>(s));
          if (avoids_forbidden_suffix(x)) next.push_back(std::move(x));
        }
      }
      layer = std::move(next);
    }
    g->vertices = std::move(layer);
    g->reindex();
    g->out.assign(g->vertices.size(), {});
    g->in.assign(g->vertices.size(), {});
    for (int v = 0; v < g->size(); ++v) {
      const Word& w = g->vertices[static_cast<std::size_t>(v)];
      for (int s = 0; s < alphabet_; ++s) {
        Word x = w;
        x.push_back(static_cast<Symbol>(s));
        if (!avoids_forbidden_suffix(x)) continue;
        const int t = g->find(Word(x.begin() + 1, x.end()));
        if (t < 0) continue;
        g->out[static_cast<std::size_t>(v)].push_back({static_cast<Symbol>(s), t});
        g->in[static_cast<std::size_t>(t)].push_back({w.front(), v});
      }
    }
    graph_ = std::move(g);
    trim();
  }

  void build_from_matrix() {
    auto g = std::make_shared<Presentation>();
    g->alphabet = alphabet_;
    g->block = 1;
    for (int s = 0; s < alphabet_; ++s) g->vertices.push_back(Word{static_cast<Symbol>(s)});
    g->reindex();
    g->out.assign(g->vertices.size(), {});
    g->in.assign(g->vertices.size(), {});
    for (int a = 0; a < alphabet_; ++a) {
      for (int b = 0; b < alphabet_; ++b) {
        if ((*matrix_)[a][b]) {
          g->out[a].push_back({static_cast<Symbol>(b), b});
          g->in[b].push_back({static_cast<Symbol>(a), a});
        }
      }
    }
    graph_ = std::move(g);
    trim();
  }

  // Remove vertices without a bi-infinite path through them.
  void trim() {
    auto& g = *graph_;
    const int n = g.size();
    std::vector<char> alive(n, 1);
    std::vector<int> indeg(n), outdeg(n);
    for (int v = 0; v < n; ++v) {
      outdeg[v] = static_cast<int>(g.out[v].size());
      indeg[v] = static_cast<int>(g.in[v].size());
    }
    std::vector<int> queue;
    for (int v = 0; v < n; ++v) {
      if (indeg[v] == 0 || outdeg[v] == 0) {
        alive[v] = 0;
        queue.push_back(v);
      }
    }
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int v = queue[h];
      for (const auto& e : g.out[v]) {
        if (alive[e.vertex] && --indeg[e.vertex] == 0) {
          alive[e.vertex] = 0;
          queue.push_back(e.vertex);
        }
      }
      for (const auto& e : g.in[v]) {
        if (alive[e.vertex] && --outdeg[e.vertex] == 0) {
          alive[e.vertex] = 0;
          queue.push_back(e.vertex);
        }
      }
    }
    std::vector<int> remap(n, -1);
    Presentation trimmed;
    trimmed.alphabet = g.alphabet;
    trimmed.block = g.block;
    for (int v = 0; v < n; ++v) {
      if (alive[v]) {
        remap[v] = trimmed.size();
        trimmed.vertices.push_back(g.vertices[v]);
      }
    }
    stranded_ = n - trimmed.size();
    if (trimmed.size() == 0) throw Error(ErrorCode::InvalidSpec, "the subshift is empty");
    trimmed.out.assign(trimmed.vertices.size(), {});
    trimmed.in.assign(trimmed.vertices.size(), {});
    for (int v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      for (const auto& e : g.out[v]) {
        if (alive[e.vertex]) trimmed.out[remap[v]].push_back({e.symbol, remap[e.vertex]});
      }
      for (const auto& e : g.in[v]) {
        if (alive[e.vertex]) trimmed.in[remap[v]].push_back({e.symbol, remap[e.vertex]});
      }
    }
    trimmed.reindex();
    *graph_ = std::move(trimmed);
  }

  int alphabet_ = 0;
  int memory_ = 0;
  int stranded_ = 0;
  std::vector<Word> forbidden_;
  std::optional<std::vector<std::vector<int>>> matrix_;
  std::shared_ptr<Presentation> graph_;
};

/// Entropy of the shift as the log Perron eigenvalue of its presentation,
/// with a flag when several irreducible components compete.
struct SpectralEntropy {
  double value = 0.0;
  bool irreducible = true;
};

inline SpectralEntropy spectral_entropy_report(const SubshiftSpec& shift) {
  const auto& g = shift.graph();
  std::vector<std::vector<double>> a(static_cast<std::size_t>(g.size()),
                                     std::vector<double>(static_cast<std::size_t>(g.size()), 0.0));
  for (int v = 0; v < g.size(); ++v) {
    for (const auto& e : g.out[static_cast<std::size_t>(v)]) a[v][e.vertex] += 1.0;
  }
  const auto root = perron_root(a);
  return {std::max(root.log_root, 0.0), root.irreducible};
}

inline double spectral_entropy(const SubshiftSpec& shift) { return spectral_entropy_report(shift).value; }

}  // namespace entlab
