// Acceptance run: one PASS/FAIL line per criterion, with the measured
// numbers behind each verdict.
// Usage: acceptance <path-to-entlab-binary> [criterion-number].

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "entlab/entlab.hpp"
#include "support/oracles.hpp"

using namespace entlab;

namespace {

const double kLog2 = std::log(2.0);
const double kTol = 1e-3;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

SubshiftSpec golden_mean() { return SubshiftSpec::from_forbidden(2, {word_from_string("11")}); }

double mid(const CriticalExponent& c) { return 0.5 * (c.lower + c.upper); }

CriticalExponent h_b(const SubshiftSpec& shift, const Subset& k, int power = 1) {
  DimParams p;
  p.tol = kTol;
  p.power = power;
  return dim_entropy(shift, k, CoverSpec::partition(1), p);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void entropy_oracle(Verdict& v) {
  CoverEstimateParams p;
  p.n_max = 24;
  auto t0 = std::chrono::steady_clock::now();
  const double golden = std::log((1 + std::sqrt(5.0)) / 2);
  const double gm = estimate_cover_entropy(golden_mean(), Subset::whole(2), p).estimate.value;
  const double t_gm = seconds_since(t0);
  v.detail << "golden " << gm << " (err " << std::abs(gm - golden) << ", " << t_gm << "s)";
  v.require(std::abs(gm - golden) <= 0.02 && t_gm <= 30, "golden mean");
  for (int m = 2; m <= 4; ++m) {
    t0 = std::chrono::steady_clock::now();
    const double e = estimate_cover_entropy(SubshiftSpec::full(m), Subset::whole(m), p).estimate.value;
    const double t = seconds_since(t0);
    const double err = std::abs(e - std::log(static_cast<double>(m)));
    v.detail << "; full" << m << " err " << err << " (" << t << "s)";
    v.require(err <= 0.01 && t <= 30, "full " + std::to_string(m) + "-shift");
  }
}

void bridge_identity(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sched = [](int m, std::vector<SymbolSet> pre, std::vector<SymbolSet> period) {
    return DigitSetSchedule::make(m, std::move(pre), std::move(period));
  };
  const std::vector<CircleSet> sets{
      {Subset(sched(3, {}, {SymbolSet{0, 2}})), 3},
      {Subset(sched(2, {}, {SymbolSet{0, 1}, SymbolSet{0}})), 2},
      {Subset(sched(2, {SymbolSet{1}}, {SymbolSet{0, 1}, SymbolSet{0, 1}, SymbolSet{1}})), 2},
      {Subset(sched(3, {}, {SymbolSet{0, 1, 2}, SymbolSet{1}})), 3},
      {Subset::union_of(3, {sched(3, {}, {SymbolSet{0, 2}}), sched(3, {}, {SymbolSet{0, 1, 2}, SymbolSet{1}})}), 3},
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    try {
      const auto b = bridge_check(sets[i], kTol);
      worst = std::max(worst, std::abs(b.gap));
      if (i == 0) v.detail << "{0,2} base 3: H_d " << b.h_d << " vs hB/log3 " << b.hb_over_logm << "; ";
    } catch (const Error& e) {
      v.require(false, "set " + std::to_string(i) + ": " + e.what());
    }
  }
  const double t = seconds_since(t0);
  v.detail << "worst gap " << worst << " over " << sets.size() << " sets (" << t << "s)";
  v.require(worst <= 5e-3, "gap above 5e-3");
  v.require(t <= 120, "runtime");
}

void caratheodory_conventions(Verdict& v) {
  const auto full2 = SubshiftSpec::full(2);
  const auto u = CoverSpec::partition(1);
  const double inf = std::numeric_limits<double>::infinity();
  const auto neg = m_value(full2, Subset::empty(2), u, -0.5, 3, 8);
  const auto zero = m_value(full2, Subset::empty(2), u, 0.0, 3, 8);
  const auto pos = m_value(full2, Subset::empty(2), u, 0.5, 3, 8);
  v.require(neg.lower == inf && neg.upper == inf, "m(empty, lambda < 0) = inf");
  v.require(zero.lower == 1.0 && zero.upper == 1.0, "m(empty, 0) = 1");
  v.require(pos.lower == 0.0 && pos.upper == 0.0, "m(empty, lambda > 0) = 0");
  const auto he = h_b(full2, Subset::empty(2));
  v.require(he.lower == 0.0 && he.upper == 0.0, "h^B(empty) = 0");

  const auto gm = golden_mean();
  const std::vector<double> lambdas{0.0, 0.2, 0.4, 0.6, 0.8};
  const std::vector<long> ks{1, 3, 5, 7, 9};
  std::vector<std::vector<MValue>> grid(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (long k : ks) grid[i].push_back(m_value(gm, Subset::whole(2), u, lambdas[i], k, 18));
  }
  int violations = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = 0; j < ks.size(); ++j) {
      if (grid[i][j].lower > grid[i][j].upper * (1 + 1e-9)) ++violations;
      if (i > 0 && grid[i][j].upper > grid[i - 1][j].upper * (1 + 1e-12)) ++violations;
      if (j > 0 && grid[i][j].upper < grid[i][j - 1].upper * (1 - 1e-12)) ++violations;
    }
  }
  v.detail << "empty-set conventions inf/1/0 exact, h^B(empty) = 0; 5x5 grid monotonicity violations " << violations;
  v.require(violations == 0, "monotonicity");
}

void power_shift_union_suite(Verdict& v) {
  std::mt19937_64 rng(4001);
  double worst_power = 0.0;
  double worst_shift = 0.0;
  double worst_union = 0.0;
  bool within = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + trial % 2;
    const auto full = SubshiftSpec::full(m);
    const auto s = oracle::random_schedule(rng, m, 2, 3);
    const auto other = oracle::random_schedule(rng, m, 2, 3);
    const double base = mid(h_b(full, Subset(s)));
    for (int power = 2; power <= 3; ++power) {
      const double d = std::abs(mid(h_b(full, Subset(s), power)) - power * base);
      worst_power = std::max(worst_power, d);
      within = within && d <= 2 * kTol;
    }
    for (long i = 1; i <= 3; ++i) {
      const double d = std::abs(mid(h_b(full, Subset(s.shifted(i)))) - base);
      worst_shift = std::max(worst_shift, d);
      within = within && d <= 2 * kTol;
    }
    const double ho = mid(h_b(full, Subset(other)));
    const double d = std::abs(mid(h_b(full, Subset::union_of(m, {s, other}))) - std::max(base, ho));
    worst_union = std::max(worst_union, d);
    within = within && d <= 2 * kTol;
  }
  v.detail << "10 schedules: power gap " << worst_power << ", shift gap " << worst_shift << ", union gap "
           << worst_union << " (tol " << kTol << ")";
  v.require(within, "a gap exceeds 2 tol");
}

void lowering_achievement(Verdict& v) {
  std::mt19937_64 rng(4002);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_hit = 0.0;
  int certified = 0;
  long max_period = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double target = unit(rng) * kLog2;
    const auto r = lower_in_full_shift(2, target, kTol);
    worst_hit = std::max(worst_hit, std::abs(moran_value(r.schedule) - target));
    max_period = std::max(max_period, r.period);
    const auto cert = certify_lowering(SubshiftSpec::full(2), r.schedule, r.achieved, kTol);
    if (cert.cover_ok && cert.dimensional_ok) ++certified;
  }
  int contained = 0;
  double worst_within = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 3;
    const auto c = oracle::random_schedule(rng, m, 2, 3);
    const double target = unit(rng) * moran_value(c);
    const auto r = lower_within_subset(c, target, kTol);
    bool ok = r.schedule.contained_in(c);
    for (long j = -20; j <= 400 && ok; ++j) {
      for (auto d : r.schedule.allowed(j).symbols()) ok = ok && c.allowed(j).contains(d);
    }
    contained += ok ? 1 : 0;
    worst_within = std::max(worst_within, std::abs(moran_value(r.schedule) - target));
  }
  v.detail << "20 targets: worst |moran - target| " << worst_hit << ", max period " << max_period << ", certified "
           << certified << "/20; within-subset contained " << contained << "/20, worst " << worst_within;
  v.require(worst_hit <= kTol && max_period <= kMaxLoweringPeriod, "full-shift hits");
  v.require(certified == 20, "certification");
  v.require(contained == 20 && worst_within <= kTol, "within-subset lowering");
}

void diagonal_dichotomy(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gm = golden_mean();
  const double h = spectral_entropy(gm);
  const auto two = diagonal_experiment(gm, 2, 12);
  const auto three = diagonal_experiment(gm, 3, 12);
  const auto rotation = SubshiftSpec::from_matrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  double zero_worst = 0.0;
  for (int n = 1; n <= 4; ++n) zero_worst = std::max(zero_worst, diagonal_experiment(rotation, n, 12).estimate.value);
  const double t = seconds_since(t0);
  v.detail << "N=2 estimate " << two.estimate.value << " in [" << 2 * h - 0.05 << ", " << 3 * h + 0.05
           << "]; growth 2->3: bound " << three.lower_bound - two.lower_bound << ", estimate "
           << three.estimate.value - two.estimate.value << " (h " << h << "); zero-entropy base max "
           << zero_worst << " (" << t << "s)";
  v.require(two.estimate.value >= 2 * h - 0.05 && two.estimate.value <= 3 * h + 0.05, "N=2 window");
  v.require(three.lower_bound - two.lower_bound >= h - 0.05, "lower bound growth");
  v.require(three.estimate.value - two.estimate.value >= h - 0.05, "estimate growth");
  v.require(zero_worst <= 0.02, "zero-entropy base");
  v.require(t <= 300, "runtime");
}

void tower_construction(Verdict& v) {
  bool phi_ok = true;
  for (int n = 1; n <= 20; ++n) phi_ok = phi_ok && phi_invariants_hold(build_phi(n));
  v.require(phi_ok, "phi invariants");
  v.detail << "phi invariants n<=20 " << (phi_ok ? "hold" : "broken");
  for (int n = 1; n <= 2; ++n) {
    const auto t = build_tower(n, SubshiftSpec::full(1 << (2 * n + 1)));
    const TowerPoint x{0, Word{0, 1}, 0};
    const auto r = tower_local_entropy(t, x, t.eps_n());
    v.detail << "; n=" << n << " eps_n " << t.eps_n() << ": exact " << r.exact_lower << ", estimate "
             << r.estimate.value;
    v.require(std::abs(r.exact_lower - kLog2) <= 1e-12, "exact lower bound n=" + std::to_string(n));
    v.require(r.estimate.value >= kLog2 - 0.1, "estimate n=" + std::to_string(n));
  }
  const auto t1 = build_tower(1, SubshiftSpec::full(8));
  std::mt19937_64 rng(4003);
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    auto x = sample_center(t1, i, rng);
    x.piece = 0;
    worst = std::max(worst, tower_local_entropy(t1, x, t1.eps_n() / 10).estimate.value);
  }
  v.detail << "; fixed center at eps_1/10: max " << worst;
  v.require(worst <= 0.1, "quasi test");
}

void conditional_relative(Verdict& v) {
  const auto full2 = SubshiftSpec::full(2);
  const auto gm = golden_mean();
  bool chain_zero = true;
  for (const auto& shift : {full2, gm}) {
    for (int d = 1; d <= 3; ++d) {
      const auto u = CoverSpec::partition(d);
      for (int n = 1; n <= 10; ++n) chain_zero = chain_zero && conditional_count(shift, u, u, n, Subset::whole(shift.alphabet_size())) == 1;
      chain_zero = chain_zero && conditional_cover_entropy(shift, u, u, 16).value == 0.0;
    }
  }
  v.require(chain_zero, "N(U|U) chain");
  const auto pairing = BlockCode::symbol_map(SubshiftSpec::full(4), full2, {0, 1, 0, 1});
  const double fiber = relative_entropy_over_factor(pairing, 16, 10).value;
  v.require(std::abs(fiber - kLog2) <= 0.01, "pairing fiber");

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
  CoverEstimateParams p;
  p.n_max = 16;
  double worst_left = 0.0;
  double worst_right = 0.0;
  for (const auto& c : cases) {
    const double image = estimate_image_entropy(c.code, c.subset, 16).value;
    const double source = estimate_cover_entropy(c.code.source(), c.subset, p).estimate.value;
    const double rel = relative_entropy_over_factor(c.code, 16, 12).value;
    worst_left = std::max(worst_left, image - source);
    worst_right = std::max(worst_right, source - image - rel);
  }
  v.detail << "N(U|U) = 1 for all n; pairing fiber " << fiber << "; sandwich excess left " << worst_left
           << ", right " << worst_right << " over 5 cases (estimator slack 0.01)";
  v.require(worst_left <= 0.01 && worst_right <= 0.01, "sandwich");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void determinism(Verdict& v, const std::string& cli) {
  if (cli.empty()) {
    v.require(false, "no CLI path given");
    return;
  }
  const auto dir = std::filesystem::temp_directory_path() / ("entlab_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string samples = ENTLAB_SAMPLES_DIR;
  const std::vector<std::string> runs{
      "tower --n 2 --base-alphabet 32 --centers 16 --eps auto --seed 7 --out csv",
      "hstar --nmax 2 --centers 4 --seed 11 --out json",
      "entropy --system " + samples + "/golden_mean.json --nmax 16 --out csv",
      "dim-entropy --system " + samples + "/full3.json --subset " + samples + "/cantor_union.json --out json",
      "diagonal --base " + samples + "/golden_mean.json --N 2 --nmax 10 --out csv",
  };
  int identical = 0;
  std::size_t hash = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string first;
    bool same = true;
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / ("run" + std::to_string(i) + "_" + std::to_string(rep));
      const std::string workers = rep == 0 ? "1" : "4";
      const std::string cmd = "ENTLAB_WORKERS=" + workers + " '" + cli + "' " + runs[i] + " --output '" +
                              out.string() + "' > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) same = false;
      const std::string body = slurp(out);
      if (body.empty()) same = false;
      if (rep == 0) first = body;
      else same = same && body == first;
    }
    if (same) {
      ++identical;
      hash ^= std::hash<std::string>{}(first) + 0x9e3779b97f4a7c15ULL + (hash << 6) + (hash >> 2);
    }
  }
  std::filesystem::remove_all(dir);
  v.detail << identical << "/" << runs.size() << " commands byte-identical across repeats (1 vs 4 workers), hash "
           << std::hex << hash << std::dec;
  v.require(identical == static_cast<int>(runs.size()), "repeat mismatch");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const int only = argc > 2 ? std::atoi(argv[2]) : 0;
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"entropy oracle agreement", entropy_oracle},
      {"bridge identity H_d = h^B / log m", bridge_identity},
      {"Caratheodory conventions and monotonicity", caratheodory_conventions},
      {"power, shift and finite-union identities", power_shift_union_suite},
      {"lowering achievement and certification", lowering_achievement},
      {"diagonal dichotomy at finite N", diagonal_dichotomy},
      {"tower construction and local entropy", tower_construction},
      {"conditional and relative entropy", conditional_relative},
      {"seeded determinism", [&](Verdict& v) { determinism(v, cli); }},
  };
  int failed = 0;
  std::cout << std::setprecision(6);
  int ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != static_cast<int>(i) + 1) continue;
    ++ran;
    Verdict v;
    v.detail << std::setprecision(6);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double t = seconds_since(t0);
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " | "
              << v.detail.str() << " | " << std::fixed << std::setprecision(2) << t << "s" << std::defaultfloat
              << std::setprecision(6) << std::endl;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 && ran > 0 ? 0 : 1;
}
