// entlab command-line driver: one subcommand per experiment. Results go to
// stdout or, with --output, atomically to a file; a one-line summary is
// echoed. Exit codes: 0 ok, 2 configuration error, 3 inconclusive (results
// still written), 4 internal limit.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "entlab/entlab.hpp"
#include "entlab/io.hpp"

namespace {

using entlab::io::ConfigError;
using entlab::io::fmt;
using entlab::io::json;

constexpr int kExitConfig = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitLimit = 4;

struct Output {
  std::string format;
  std::string path;
};

struct Result {
  std::string body;
  std::string summary;
  bool inconclusive = false;
};

int exit_code_for(entlab::ErrorCode code) {
  using entlab::ErrorCode;
  switch (code) {
    case ErrorCode::Inconclusive: return kExitInconclusive;
    case ErrorCode::DepthOverflow:
    case ErrorCode::DepthCapTooSmall:
    case ErrorCode::ToleranceUnachievable:
    case ErrorCode::ScaleUnderflow:
    case ErrorCode::InternalLimit: return kExitLimit;
    default: return kExitConfig;
  }
}

void check_format(const Output& out) {
  if (out.format != "csv" && out.format != "json") throw ConfigError("--out must be csv or json");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json estimate_json(const entlab::EntropyEstimate& e) {
  json j{{"value", e.value},         {"method", entlab::to_string(e.method)}, {"n_min", e.n_min},
         {"n_max", e.n_max},         {"residual", e.residual},                 {"exact", e.exact},
         {"non_convergent", e.non_convergent}};
  if (e.bounds) j["bounds"] = {e.bounds->first, e.bounds->second};
  return j;
}

entlab::Subset load_subset(const std::string& path, int alphabet) {
  if (path.empty()) return entlab::Subset::whole(alphabet);
  auto s = entlab::io::subset_from_json(entlab::io::load_json(path), path);
  if (s.alphabet_size() != alphabet) throw ConfigError(path + ": subset alphabet differs from the system alphabet");
  return s;
}

entlab::SubshiftSpec load_system(const std::string& path) {
  return entlab::io::system_from_json(entlab::io::load_json(path), path);
}

entlab::Subset digits_or_schedule(int base, const std::vector<int>& digits, const std::string& schedule) {
  if (!schedule.empty()) return load_subset(schedule, base);
  if (digits.empty()) return entlab::Subset::whole(base);
  entlab::SymbolSet allowed;
  for (int d : digits) {
    if (d < 0 || d >= base) throw ConfigError("--digits: digit " + std::to_string(d) + " outside the base");
    allowed.insert(d);
  }
  return entlab::Subset(entlab::DigitSetSchedule::make(base, {}, {allowed}));
}

// ---- entropy ---------------------------------------------------------------

struct EntropyArgs {
  std::string system;
  std::string subset;
  int nmax = 24;
  std::vector<double> eps{0.5, 0.25, 0.125};
  int power = 1;
};

Result run_entropy(const EntropyArgs& a, const Output& out) {
  const auto shift = load_system(a.system);
  const auto subset = load_subset(a.subset, shift.alphabet_size());
  entlab::CoverEstimateParams p;
  p.n_max = a.nmax;
  p.eps_list = a.eps;
  p.power = a.power;
  const auto report = entlab::estimate_cover_entropy(shift, subset, p);
  Result r;
  r.inconclusive = report.estimate.non_convergent;
  if (out.format == "csv") {
    std::ostringstream os;
    os << "# entropies in nats; counts are exact integers or exp(log) when approximate\n";
    os << "n,eps,s_n,r_n,N_lower,N_upper,slope\n";
    for (const auto& s : report.series) {
      for (std::size_t i = 0; i < s.s.size(); ++i) {
        os << i + 1 << ',' << fmt(s.eps) << ',' << s.s[i].str() << ',' << s.s[i].str() << ',' << s.lower[i].str() << ','
           << s.upper[i].str() << ',' << fmt(s.fit.slope) << '\n';
      }
    }
    r.body = os.str();
  } else {
    json j{{"command", "entropy"}, {"units", "nats"}, {"estimate", estimate_json(report.estimate)}};
    json series = json::array();
    for (const auto& s : report.series) {
      json rows = json::array();
      for (std::size_t i = 0; i < s.s.size(); ++i) {
        rows.push_back({{"n", i + 1}, {"s_n", s.s[i].str()}, {"r_n", s.s[i].str()}, {"N_lower", s.lower[i].str()},
                        {"N_upper", s.upper[i].str()}});
      }
      series.push_back({{"eps", s.eps}, {"k", s.k}, {"slope", s.fit.slope}, {"slope_lower", s.slope_lower},
                        {"slope_upper", s.slope_upper}, {"residual", s.fit.residual}, {"rows", rows}});
    }
    j["series"] = series;
    r.body = dump(j);
  }
  const auto& e = report.estimate;
  r.summary = "entropy: estimate=" + fmt(e.value) + " nats bounds=[" + fmt(e.bounds->first) + ", " +
              fmt(e.bounds->second) + "] residual=" + fmt(e.residual) + (r.inconclusive ? " (non-convergent)" : "");
  return r;
}

// ---- dim-entropy -------------------------------------------------------------

struct DimArgs {
  std::string system;
  std::string subset;
  double tol = 1e-3;
  int depth_cap = 0;
  int power = 1;
  int cover_depth = 1;
};

Result run_dim_entropy(const DimArgs& a, const Output& out) {
  const auto shift = load_system(a.system);
  const auto subset = load_subset(a.subset, shift.alphabet_size());
  entlab::DimParams p;
  p.tol = a.tol;
  p.depth_cap = a.depth_cap;
  p.power = a.power;
  const auto c = entlab::dim_entropy(shift, subset, entlab::CoverSpec::partition(a.cover_depth), p);
  Result r;
  r.inconclusive = c.inconclusive;
  if (out.format == "csv") {
    r.body = "# entropies in nats\nlower,upper,iterations,inconclusive,depth_cap\n" + fmt(c.lower) + "," + fmt(c.upper) +
             "," + std::to_string(c.iterations) + "," + (c.inconclusive ? "true" : "false") + "," +
             std::to_string(c.depth_cap) + "\n";
  } else {
    r.body = dump({{"command", "dim-entropy"},
                   {"units", "nats"},
                   {"lower", c.lower},
                   {"upper", c.upper},
                   {"midpoint", 0.5 * (c.lower + c.upper)},
                   {"iterations", c.iterations},
                   {"inconclusive", c.inconclusive},
                   {"depth_cap", c.depth_cap}});
  }
  r.summary = "dim-entropy: h^B in [" + fmt(c.lower) + ", " + fmt(c.upper) + "] nats" +
              (c.inconclusive ? " (inconclusive)" : "");
  return r;
}

// ---- hausdorff / bridge ------------------------------------------------------

struct CircleArgs {
  int base = 3;
  std::vector<int> digits;
  std::string schedule;
  double tol = 1e-3;
};

Result run_hausdorff(const CircleArgs& a, const Output& out) {
  const entlab::CircleSet c(digits_or_schedule(a.base, a.digits, a.schedule), a.base);
  const auto d = entlab::hausdorff_dimension(c, a.tol);
  Result r;
  if (out.format == "csv") {
    r.body = "value,method,box_count,residual\n" + fmt(d.value) + "," + entlab::to_string(d.method) + "," +
             fmt(d.box_count) + "," + fmt(d.residual) + "\n";
  } else {
    json scales = json::array();
    for (double s : d.scales_used) scales.push_back(s);
    r.body = dump({{"command", "hausdorff"},
                   {"base", a.base},
                   {"value", d.value},
                   {"method", entlab::to_string(d.method)},
                   {"box_count", d.box_count},
                   {"residual", d.residual},
                   {"scales_used", scales}});
  }
  r.summary = "hausdorff: H_d=" + fmt(d.value) + " (box-count " + fmt(d.box_count) + ")";
  return r;
}

Result run_bridge(const CircleArgs& a, const Output& out) {
  const entlab::CircleSet c(digits_or_schedule(a.base, a.digits, a.schedule), a.base);
  const auto b = entlab::bridge_check(c, a.tol);
  Result r;
  r.inconclusive = !b.passes;
  if (out.format == "csv") {
    r.body = "H_d,hB_over_logm,gap,hB_lower,hB_upper,passes\n" + fmt(b.h_d) + "," + fmt(b.hb_over_logm) + "," +
             fmt(b.gap) + "," + fmt(b.hb_lower) + "," + fmt(b.hb_upper) + "," + (b.passes ? "true" : "false") + "\n";
  } else {
    r.body = dump({{"command", "bridge"},
                   {"base", a.base},
                   {"H_d", b.h_d},
                   {"hB_over_logm", b.hb_over_logm},
                   {"gap", b.gap},
                   {"hB_lower", b.hb_lower},
                   {"hB_upper", b.hb_upper},
                   {"expansion_eps", b.expansion_eps},
                   {"lipschitz_lower", b.lipschitz_lower},
                   {"lipschitz_upper", b.lipschitz_upper},
                   {"tol", a.tol},
                   {"passes", b.passes}});
  }
  r.summary = "bridge: H_d=" + fmt(b.h_d) + " hB/log m=" + fmt(b.hb_over_logm) + " gap=" + fmt(b.gap) +
              (b.passes ? " <= " : " > ") + "tol " + fmt(a.tol);
  return r;
}

// ---- lower -------------------------------------------------------------------

struct LowerArgs {
  std::string system;
  std::string within;
  double target = 0.0;
  double tol = 1e-3;
  std::string emit;
  bool certify = false;
};

Result run_lower(const LowerArgs& a, const Output& out) {
  const auto shift = load_system(a.system);
  entlab::LoweringResult res;
  std::string method;
  if (!a.within.empty()) {
    const auto c = load_subset(a.within, shift.alphabet_size());
    if (c.members().size() != 1) throw ConfigError(a.within + ": --within needs a single schedule");
    if (!shift.is_full_shift()) throw ConfigError("--within requires a full-shift system");
    res = entlab::lower_within_subset(c.members().front(), a.target, a.tol);
    method = "within";
  } else if (shift.is_full_shift()) {
    res = entlab::lower_in_full_shift(shift.alphabet_size(), a.target, a.tol);
    method = "full-shift";
  } else {
    res = entlab::lower_in_sft(shift, a.target, a.tol);
    method = "sft";
  }
  const json sched = entlab::io::schedule_to_json(res.schedule);
  if (!a.emit.empty()) entlab::io::write_atomic(a.emit, dump(sched));
  Result r;
  json j{{"command", "lower"},       {"units", "nats"},        {"method", method},
         {"target", a.target},       {"tol", a.tol},           {"achieved", res.achieved},
         {"period", res.period},     {"free_positions", res.free_positions}, {"schedule", sched}};
  std::string cert_note;
  if (a.certify) {
    const auto cert = entlab::certify_lowering(shift, res.schedule, res.achieved, a.tol);
    j["certificate"] = {{"cover", estimate_json(cert.cover)},
                        {"cover_ok", cert.cover_ok},
                        {"dimensional", {cert.dimensional.lower, cert.dimensional.upper}},
                        {"dimensional_ok", cert.dimensional_ok}};
    r.inconclusive = !(cert.cover_ok && cert.dimensional_ok);
    cert_note = std::string(" certified=") + (r.inconclusive ? "no" : "yes");
  }
  if (out.format == "csv") {
    r.body = "method,target,achieved,period,free_positions\n" + method + "," + fmt(a.target) + "," + fmt(res.achieved) +
             "," + std::to_string(res.period) + "," + std::to_string(res.free_positions) + "\n";
  } else {
    r.body = dump(j);
  }
  r.summary = "lower: " + method + " period=" + std::to_string(res.period) + " achieved=" + fmt(res.achieved) +
              " nats" + cert_note;
  return r;
}

// ---- diagonal ----------------------------------------------------------------

struct DiagonalArgs {
  std::string base;
  int factors = 2;
  int nmax = 12;
  double tol = 0.05;
};

Result run_diagonal(const DiagonalArgs& a, const Output& out) {
  const auto shift = load_system(a.base);
  std::vector<entlab::DiagonalReport> reports;
  for (int f = 1; f <= a.factors; ++f) reports.push_back(entlab::diagonal_experiment(shift, f, a.nmax, a.tol));
  Result r;
  if (out.format == "csv") {
    std::ostringstream os;
    os << "# entropies in nats\nN,n,log_count,estimate,lower_bound,upper_bound\n";
    for (const auto& d : reports) {
      for (std::size_t i = 0; i < d.log_counts.size(); ++i) {
        os << d.factors << ',' << i + 1 << ',' << fmt(d.log_counts[i]) << ',' << fmt(d.estimate.value) << ','
           << fmt(d.lower_bound) << ',' << fmt(d.upper_bound) << '\n';
      }
    }
    r.body = os.str();
  } else {
    json list = json::array();
    for (const auto& d : reports) {
      list.push_back({{"N", d.factors},
                      {"k", d.k},
                      {"estimate", estimate_json(d.estimate)},
                      {"lower_bound", d.lower_bound},
                      {"upper_bound", d.upper_bound},
                      {"lower_bound_check", d.lower_bound_check},
                      {"upper_bound_check", d.upper_bound_check}});
    }
    r.body = dump({{"command", "diagonal"}, {"units", "nats"}, {"h_base", reports.front().h_base}, {"reports", list}});
  }
  const auto& last = reports.back();
  r.inconclusive = !(last.lower_bound_check && last.upper_bound_check);
  r.summary = "diagonal: N=" + std::to_string(last.factors) + " estimate=" + fmt(last.estimate.value) + " in [" +
              fmt(last.lower_bound) + ", " + fmt(last.upper_bound) + "] nats";
  return r;
}

// ---- tower / hstar -----------------------------------------------------------

std::vector<double> parse_eps(const std::string& text, const std::vector<entlab::TowerSystem>& towers) {
  if (text == "auto") return entlab::auto_eps(towers);
  std::vector<double> eps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      eps.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--eps: cannot parse '" + item + "'");
    }
  }
  std::sort(eps.begin(), eps.end(), std::greater<>());
  return eps;
}

struct TowerArgs {
  int n = 1;
  int base_alphabet = 0;
  int centers = 16;
  std::string eps = "auto";
  std::uint64_t seed = 1;
  int steps = 0;
  int nmax = 3;
};

std::string tower_rows_csv(const entlab::HStarProfile& p) {
  std::ostringstream os;
  os << "# entropies in nats\neps,center_id,piece,estimate,exact_lower\n";
  for (const auto& row : p.rows) {
    os << fmt(row.eps) << ',' << row.center_id << ',' << row.piece << ',' << fmt(row.estimate) << ','
       << fmt(row.exact_lower) << '\n';
  }
  return os.str();
}

json tower_rows_json(const entlab::HStarProfile& p) {
  json rows = json::array();
  for (const auto& row : p.rows) {
    rows.push_back({{"eps", row.eps},
                    {"center_id", row.center_id},
                    {"tower", row.tower},
                    {"piece", row.piece},
                    {"estimate", row.estimate},
                    {"exact_lower", row.exact_lower}});
  }
  return rows;
}

entlab::TowerSystem make_tower(int n, int alphabet) {
  if (n < 1 || n > 3) throw ConfigError("--n must be in [1, 3]");
  const int a = alphabet > 0 ? alphabet : (1 << (2 * n + 1));
  if (a > entlab::kMaxAlphabet) throw ConfigError("--base-alphabet must be <= 256");
  return entlab::build_tower(n, entlab::SubshiftSpec::full(a));
}

Result run_tower(const TowerArgs& a, const Output& out) {
  const std::vector<entlab::TowerSystem> towers{make_tower(a.n, a.base_alphabet)};
  const auto eps = parse_eps(a.eps, towers);
  const auto p = entlab::h_star_profile(towers, eps, a.centers, a.seed, a.steps);
  Result r;
  if (out.format == "csv") {
    r.body = tower_rows_csv(p);
  } else {
    r.body = dump({{"command", "tower"},
                   {"units", "nats"},
                   {"n", a.n},
                   {"eps_n", towers.front().eps_n()},
                   {"seed", a.seed},
                   {"rows", tower_rows_json(p)}});
  }
  std::size_t at_eps_n = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (std::abs(eps[i] - towers.front().eps_n()) < 1e-12) at_eps_n = i;
  }
  r.summary = "tower: n=" + std::to_string(a.n) + " eps_n=" + fmt(towers.front().eps_n()) +
              " max local entropy at eps_n=" + fmt(p.values[at_eps_n]) + " nats";
  return r;
}

Result run_hstar(const TowerArgs& a, const Output& out) {
  std::vector<entlab::TowerSystem> towers;
  for (int n = 1; n <= a.nmax; ++n) towers.push_back(make_tower(n, 0));
  const auto eps = parse_eps(a.eps, towers);
  const auto p = entlab::h_star_profile(towers, eps, a.centers, a.seed, a.steps);
  Result r;
  if (out.format == "csv") {
    std::ostringstream os;
    os << "# entropies in nats\neps,h_star,argmax_center\n";
    for (std::size_t i = 0; i < eps.size(); ++i) os << fmt(eps[i]) << ',' << fmt(p.values[i]) << ',' << p.argmax[i] << '\n';
    r.body = os.str();
  } else {
    json prof = json::array();
    for (std::size_t i = 0; i < eps.size(); ++i) prof.push_back({{"eps", eps[i]}, {"h_star", p.values[i]}, {"argmax_center", p.argmax[i]}});
    r.body = dump({{"command", "hstar"}, {"units", "nats"}, {"nmax", a.nmax}, {"seed", a.seed}, {"profile", prof},
                   {"rows", tower_rows_json(p)}});
  }
  r.summary = "hstar: " + std::to_string(towers.size()) + " towers, h*(eps) at smallest eps=" + fmt(p.values.back()) + " nats";
  return r;
}

void add_output(CLI::App* cmd, Output& out, const std::string& default_format) {
  cmd->add_option("--out", out.format, "Output format: csv or json (default " + default_format + ")");
  cmd->add_option("--output", out.path, "Write results to this file (atomically) instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entlab: entropy, dimensional entropy and Hausdorff dimension experiments on symbolic systems"};
  app.require_subcommand(1);

  Output out;
  std::function<Result()> job;

  EntropyArgs ea;
  auto* entropy = app.add_subcommand("entropy", "Covering entropy by spanning/separated counts");
  entropy->add_option("--system", ea.system, "Shift spec (JSON)")->required();
  entropy->add_option("--subset", ea.subset, "Schedule set (JSON); whole shift when omitted");
  entropy->add_option("--nmax", ea.nmax, "Largest n")->capture_default_str();
  entropy->add_option("--eps", ea.eps, "Comma-separated scales")->delimiter(',');
  entropy->add_option("--power", ea.power, "Iterate T^power")->capture_default_str();
  add_output(entropy, out, "csv");
  entropy->callback([&] {
    if (out.format.empty()) out.format = "csv";
    job = [&] { return run_entropy(ea, out); };
  });

  DimArgs da;
  auto* dim = app.add_subcommand("dim-entropy", "Bowen dimensional entropy by critical-exponent bisection");
  dim->add_option("--system", da.system, "Shift spec (JSON)")->required();
  dim->add_option("--subset", da.subset, "Schedule set (JSON)");
  dim->add_option("--tol", da.tol, "Bracket width")->capture_default_str();
  dim->add_option("--depth-cap", da.depth_cap, "Cylinder depth cap (0 = automatic)")->capture_default_str();
  dim->add_option("--power", da.power, "Iterate T^power")->capture_default_str();
  dim->add_option("--cover-depth", da.cover_depth, "Word-partition depth of the cover")->capture_default_str();
  add_output(dim, out, "json");
  dim->callback([&] {
    if (out.format.empty()) out.format = "json";
    job = [&] { return run_dim_entropy(da, out); };
  });

  CircleArgs ha;
  auto* haus = app.add_subcommand("hausdorff", "Hausdorff dimension of a digit Cantor set on the circle");
  haus->add_option("--base", ha.base, "Base m >= 2")->required();
  haus->add_option("--digits", ha.digits, "Allowed digits at every position")->delimiter(',');
  haus->add_option("--schedule", ha.schedule, "Schedule set (JSON) instead of --digits");
  haus->add_option("--tol", ha.tol, "Tolerance")->capture_default_str();
  add_output(haus, out, "json");
  haus->callback([&] {
    if (out.format.empty()) out.format = "json";
    job = [&] { return run_hausdorff(ha, out); };
  });

  CircleArgs ba;
  auto* bridge = app.add_subcommand("bridge", "Compare H_d with h^B(T_m, C) / log m");
  bridge->add_option("--base", ba.base, "Base m >= 2")->required();
  bridge->add_option("--digits", ba.digits, "Allowed digits at every position")->delimiter(',');
  bridge->add_option("--schedule", ba.schedule, "Schedule set (JSON) instead of --digits");
  bridge->add_option("--tol", ba.tol, "Tolerance on the gap")->capture_default_str();
  add_output(bridge, out, "json");
  bridge->callback([&] {
    if (out.format.empty()) out.format = "json";
    job = [&] { return run_bridge(ba, out); };
  });

  LowerArgs la;
  auto* lower = app.add_subcommand("lower", "Construct a schedule with a prescribed entropy");
  lower->add_option("--system", la.system, "Ambient shift spec (JSON)")->required();
  lower->add_option("--within", la.within, "Lower inside this schedule (JSON)");
  lower->add_option("--target", la.target, "Target entropy in nats")->required();
  lower->add_option("--tol", la.tol, "Tolerance")->capture_default_str();
  lower->add_option("--emit", la.emit, "Write the schedule (JSON) here");
  lower->add_flag("--certify", la.certify, "Check the result with both estimators");
  add_output(lower, out, "json");
  lower->callback([&] {
    if (out.format.empty()) out.format = "json";
    job = [&] { return run_lower(la, out); };
  });

  DiagonalArgs ga;
  auto* diag = app.add_subcommand("diagonal", "Entropy of T x T^2 x ... x T^N on the diagonal");
  diag->add_option("--base", ga.base, "Base shift spec (JSON)")->required();
  diag->add_option("--N", ga.factors, "Number of factors (1..4)")->capture_default_str();
  diag->add_option("--nmax", ga.nmax, "Largest n")->capture_default_str();
  diag->add_option("--tol", ga.tol, "Tolerance on the bound checks")->capture_default_str();
  add_output(diag, out, "csv");
  diag->callback([&] {
    if (out.format.empty()) out.format = "csv";
    job = [&] { return run_diagonal(ga, out); };
  });

  TowerArgs ta;
  auto* tower = app.add_subcommand("tower", "Local entropy profile of one cyclic tower");
  tower->add_option("--n", ta.n, "Tower index (1..3)")->required();
  tower->add_option("--base-alphabet", ta.base_alphabet, "Full-shift base alphabet (default 2^(2n+1))");
  tower->add_option("--centers", ta.centers, "Sampled centers")->capture_default_str();
  tower->add_option("--eps", ta.eps, "auto or comma-separated scales")->capture_default_str();
  tower->add_option("--seed", ta.seed, "Sampling seed")->capture_default_str();
  tower->add_option("--steps", ta.steps, "Orbit length for counting (0 = 12 cycles)")->capture_default_str();
  add_output(tower, out, "csv");
  tower->callback([&] {
    if (out.format.empty()) out.format = "csv";
    job = [&] { return run_tower(ta, out); };
  });

  TowerArgs sa;
  auto* hstar = app.add_subcommand("hstar", "h*(eps) over the tower assembly n = 1..nmax");
  hstar->add_option("--nmax", sa.nmax, "Largest tower index (1..3)")->capture_default_str();
  hstar->add_option("--centers", sa.centers, "Sampled centers per tower")->capture_default_str();
  hstar->add_option("--eps", sa.eps, "auto or comma-separated scales")->capture_default_str();
  hstar->add_option("--seed", sa.seed, "Sampling seed")->capture_default_str();
  hstar->add_option("--steps", sa.steps, "Orbit length for counting (0 = 12 cycles)")->capture_default_str();
  add_output(hstar, out, "csv");
  hstar->callback([&] {
    if (out.format.empty()) out.format = "csv";
    job = [&] { return run_hstar(sa, out); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    check_format(out);
    const Result r = job();
    if (out.path.empty()) {
      std::cout << r.body;
      std::cerr << r.summary << '\n';
    } else {
      entlab::io::write_atomic(out.path, r.body);
      std::cout << r.summary << '\n';
    }
    return r.inconclusive ? kExitInconclusive : 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const entlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal limit: " << e.what() << '\n';
    return kExitLimit;
  }
}
