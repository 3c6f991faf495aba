#pragma once

// Cyclic towers (X_n, T_n): 2n+1 copies C^0..C^{2n} of a base subshift,
// stacked at heights J^j = [2j/(4n+1), (2j+1)/(4n+1)] on the line x = 1/n.
// T_n moves piece j to piece phi(j), except that the gate piece
// phi^{-1}(0) applies the base shift on its way into piece 0.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "entlab/cover_entropy.hpp"
#include "entlab/parallel.hpp"

namespace entlab {

struct PermutationPhi {
  int n = 1;
  std::vector<int> map;

  int size() const { return 2 * n + 1; }
  int operator()(int i) const { return map[static_cast<std::size_t>(i)]; }
  int inverse(int i) const {
    for (int j = 0; j < size(); ++j) {
      if (map[static_cast<std::size_t>(j)] == i) return j;
    }
    return -1;
  }
};

/// A permutation of {0..2n} that is a single (2n+1)-cycle and moves no
/// index by more than 2.
inline bool phi_invariants_hold(const PermutationPhi& phi) {
  const int size = phi.size();
  if (static_cast<int>(phi.map.size()) != size) return false;
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  for (int i = 0; i < size; ++i) {
    const int v = phi(i);
    if (v < 0 || v >= size || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
    if (std::abs(v - i) > 2) return false;
  }
  for (int i = 0; i < size; ++i) {
    int x = i;
    for (int j = 1; j <= size; ++j) {
      x = phi(x);
      if ((x == i) != (j == size)) return false;
    }
  }
  return true;
}

/// Even indices climb 0 -> 2 -> ... -> 2n, then 2n -> 2n-1 and odd indices
/// descend 2n-1 -> 2n-3 -> ... -> 1 -> 0.
inline PermutationPhi build_phi(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "n must be >= 1");
  PermutationPhi phi;
  phi.n = n;
  phi.map.assign(static_cast<std::size_t>(2 * n + 1), 0);
  for (int i = 0; i < n; ++i) phi.map[static_cast<std::size_t>(2 * i)] = 2 * i + 2;
  phi.map[static_cast<std::size_t>(2 * n)] = 2 * n - 1;
  for (int i = 3; i <= 2 * n - 1; i += 2) phi.map[static_cast<std::size_t>(i)] = i - 2;
  phi.map[1] = 0;
  if (!phi_invariants_hold(phi)) throw Error(ErrorCode::InternalLimit, "phi invariants failed");
  return phi;
}

struct TowerOptions {
  bool require_entropy = true;  // reject bases below (2n+1) log 2
};

enum class PieceRelation { Always, Never, Ambiguous };

struct TowerSystem {
  int n = 1;
  PermutationPhi phi;
  SubshiftSpec base = SubshiftSpec::full(2);
  double base_entropy = 0.0;

  int pieces() const { return 2 * n + 1; }
  int gate() const { return phi.inverse(0); }
  double scale() const { return 1.0 / (4.0 * n + 1.0); }
  double eps_n() const { return 5.0 * scale(); }
  std::pair<double, double> piece_interval(int j) const { return {2.0 * j * scale(), (2.0 * j + 1.0) * scale()}; }

  /// Whether every pair of points in two distinct pieces is within eps
  /// (Always), none is (Never), or it depends on the points (Ambiguous).
  PieceRelation relation(int a, int b, double eps) const {
    const int gap = std::abs(a - b);
    const double dmin = (2.0 * gap - 1.0) * scale();
    const double dmax = (2.0 * gap + 1.0) * scale();
    if (dmax <= eps) return PieceRelation::Always;
    if (dmin > eps) return PieceRelation::Never;
    return PieceRelation::Ambiguous;
  }
};

inline TowerSystem build_tower(int n, const SubshiftSpec& base, const TowerOptions& options = {}) {
  TowerSystem t;
  t.n = n;
  t.phi = build_phi(n);
  t.base = base;
  t.base_entropy = spectral_entropy(base);
  if (options.require_entropy && t.base_entropy < (2 * n + 1) * std::log(2.0) - 1e-12) {
    throw Error(ErrorCode::BaseEntropyTooSmall, "base entropy is below (2n+1) log 2");
  }
  return t;
}

/// A tower point with a periodic base sequence c_i = word[(i + offset) mod |word|].
struct TowerPoint {
  int piece = 0;
  Word word;
  long offset = 0;

  Symbol base_at(long i) const {
    const long len = static_cast<long>(word.size());
    return word[static_cast<std::size_t>(((i + offset) % len + len) % len)];
  }
  bool operator==(const TowerPoint& o) const {
    if (piece != o.piece || word != o.word) return false;
    const long len = static_cast<long>(word.size());
    return ((offset - o.offset) % len + len) % len == 0;
  }

  DigitSetSchedule base_point(int alphabet) const {
    const long len = static_cast<long>(word.size());
    Word fwd;
    Word bwd;
    for (long i = 0; i < len; ++i) {
      fwd.push_back(base_at(i));
      bwd.push_back(base_at(-1 - i));
    }
    return DigitSetSchedule::point(alphabet, {}, fwd, {}, bwd);
  }
};

inline TowerPoint tower_map(const TowerSystem& t, TowerPoint p) {
  if (p.piece == t.gate()) {
    p.piece = 0;
    p.offset = (p.offset + 1) % static_cast<long>(p.word.size());
  } else {
    p.piece = t.phi(p.piece);
  }
  return p;
}

inline TowerPoint tower_inverse(const TowerSystem& t, TowerPoint p) {
  if (p.piece == 0) {
    p.piece = t.gate();
    const long len = static_cast<long>(p.word.size());
    p.offset = ((p.offset - 1) % len + len) % len;
  } else {
    p.piece = t.phi.inverse(p.piece);
  }
  return p;
}

struct TowerLocalEntropy {
  EntropyEstimate estimate;
  double exact_lower = 0.0;  // h(S)/(2n+1) when the whole center piece lies in the fiber
  std::vector<int> pieces;   // pieces whose points all stay eps-close, plus the center's own
  bool upper_certified = false;  // no ambiguous piece and every other tower is farther than eps
};

/// h(T_n, Phi_eps(x)) for a center x of the tower. The fiber is restricted
/// to the center's tower: a distinct piece is included when the interval
/// bounds keep it within eps along the whole piece cycle, and the center's
/// own piece contributes the forward base fiber at radius eps (4n+1).
/// Separated points are counted at base radius 1 for steps up to `steps`.
inline TowerLocalEntropy tower_local_entropy(const TowerSystem& t, const TowerPoint& center, double eps, int steps = 0) {
  if (center.piece < 0 || center.piece >= t.pieces()) throw Error(ErrorCode::InvalidSpec, "center piece out of range");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidSpec, "eps must be > 0");
  const int period = t.pieces();
  if (steps <= 0) steps = 12 * period;
  if (steps < 8) throw Error(ErrorCode::InvalidSpec, "steps must be >= 8");
  constexpr int kCount = 1;
  TowerLocalEntropy out;
  std::vector<std::vector<int>> orbit(static_cast<std::size_t>(period));
  for (int j = 0; j < period; ++j) {
    int x = j;
    for (int s = 0; s < period; ++s) {
      orbit[static_cast<std::size_t>(j)].push_back(x);
      x = t.phi(x);
    }
  }
  bool ambiguous = false;
  for (int j = 0; j < period; ++j) {
    if (j == center.piece) {
      out.pieces.push_back(j);
      continue;
    }
    bool always = true;
    bool never = false;
    bool unsure = false;
    for (int s = 0; s < period; ++s) {
      const auto r = t.relation(orbit[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)],
                                orbit[static_cast<std::size_t>(center.piece)][static_cast<std::size_t>(s)], eps);
      always = always && r == PieceRelation::Always;
      never = never || r == PieceRelation::Never;
      unsure = unsure || r == PieceRelation::Ambiguous;
    }
    if (unsure && !never) ambiguous = true;
    if (always) out.pieces.push_back(j);
  }
  const double own_eps = std::min(1.0, eps / t.scale());
  const int m = t.base.alphabet_size();
  const auto fiber = forward_fiber(center.base_point(m), own_eps);
  if (eps_radius(own_eps) < 0) out.exact_lower = t.base_entropy / period;
  const int max_len = steps / period + 2 * kCount + 2;
  const auto free_logs = window_log_counts(t.base, Subset::whole(m), -kCount, max_len);
  const auto own_logs = window_log_counts(t.base, Subset(fiber), -kCount, max_len);
  std::vector<double> logs(static_cast<std::size_t>(steps), -kInf);
  for (int j : out.pieces) {
    const auto& table = j == center.piece ? own_logs : free_logs;
    for (int nsteps = 1; nsteps <= steps; ++nsteps) {
      // Base shifts applied during the first nsteps - 1 moves.
      int count = 0;
      for (int s = 0; s + 1 < nsteps; ++s) count += orbit[static_cast<std::size_t>(j)][static_cast<std::size_t>(s % period)] == t.gate();
      const double v = table[static_cast<std::size_t>(count + 2 * kCount)];
      logs[static_cast<std::size_t>(nsteps - 1)] = log_add(logs[static_cast<std::size_t>(nsteps - 1)], v);
    }
  }
  const auto fit = fit_upper_half(logs, steps);
  out.estimate.value = std::max(0.0, fit.slope);
  out.estimate.method = EstimateMethod::SlopeFit;
  out.estimate.n_min = fit.n_min;
  out.estimate.n_max = steps;
  out.estimate.residual = fit.residual;
  out.estimate.exact = true;
  out.estimate.non_convergent = fit.residual > kNonConvergentResidual;
  out.estimate.bounds = std::pair{std::max(0.0, out.estimate.value - fit.residual), out.estimate.value + fit.residual};
  // Other towers sit on lines x = 1/n' (and the limit fiber on x = 0).
  const double nearest_tower = 1.0 / t.n - 1.0 / (t.n + 1);
  out.upper_certified = !ambiguous && nearest_tower > eps;
  return out;
}

/// Centers of a tower: center c sits in piece c mod (2n+1) with a base
/// point drawn from the generator (a random periodic word on full-shift
/// bases, the shortest cycle word otherwise).
inline TowerPoint sample_center(const TowerSystem& t, int id, std::mt19937_64& rng) {
  TowerPoint p;
  p.piece = id % t.pieces();
  if (t.base.is_full_shift()) {
    const int len = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < len; ++i) p.word.push_back(static_cast<Symbol>(rng() % static_cast<std::uint64_t>(t.base.alphabet_size())));
  } else {
    p.word = t.base.shortest_cycle_word();
  }
  return p;
}

struct HStarRow {
  double eps = 0.0;
  int center_id = 0;
  int tower = 0;
  int piece = 0;
  double estimate = 0.0;
  double exact_lower = 0.0;
};

struct HStarProfile {
  std::vector<double> eps_values;  // descending
  std::vector<double> values;      // max over centers per eps
  std::vector<int> argmax;         // center id of the max per eps
  std::vector<HStarRow> rows;      // eps-major, then center id
};

/// Default eps grid: eps_n of every tower, then eps_1 / 10, descending.
inline std::vector<double> auto_eps(const std::vector<TowerSystem>& towers) {
  std::vector<double> eps;
  for (const auto& t : towers) eps.push_back(t.eps_n());
  if (!towers.empty()) eps.push_back(towers.front().eps_n() / 10.0);
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  return eps;
}

/// sup over sampled centers of h(T, Phi_eps(x)) for each eps, with the
/// centers of all towers numbered consecutively.
inline HStarProfile h_star_profile(const std::vector<TowerSystem>& towers, std::vector<double> eps_list,
                                   int centers_per_system, std::uint64_t seed, int steps = 0) {
  if (centers_per_system < 1) throw Error(ErrorCode::InvalidSpec, "need at least one center per tower");
  if (!std::is_sorted(eps_list.begin(), eps_list.end(), std::greater<>())) {
    throw Error(ErrorCode::InvalidSpec, "eps list must be descending");
  }
  std::mt19937_64 rng(seed);
  struct Center {
    std::size_t tower;
    TowerPoint point;
  };
  std::vector<Center> centers;
  for (std::size_t i = 0; i < towers.size(); ++i) {
    for (int c = 0; c < centers_per_system; ++c) centers.push_back({i, sample_center(towers[i], c, rng)});
  }
  HStarProfile out;
  out.eps_values = eps_list;
  out.rows.resize(eps_list.size() * centers.size());
  parallel_for(out.rows.size(), [&](std::size_t idx) {
    const std::size_t e = idx / centers.size();
    const std::size_t c = idx % centers.size();
    const auto& tower = towers[centers[c].tower];
    const auto r = tower_local_entropy(tower, centers[c].point, eps_list[e], steps);
    out.rows[idx] = {eps_list[e], static_cast<int>(c), tower.n, centers[c].point.piece, r.estimate.value, r.exact_lower};
  });
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    double best = 0.0;
    int arg = centers.empty() ? -1 : 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const auto& row = out.rows[e * centers.size() + c];
      if (row.estimate > best) {
        best = row.estimate;
        arg = row.center_id;
      }
    }
    out.values.push_back(best);
    out.argmax.push_back(arg);
  }
  return out;
}

}  // namespace entlab
