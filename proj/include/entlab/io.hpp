#pragma once

// JSON ingestion of shift and schedule specs, schedule emission, canonical
// number formatting and atomic file writes. Requires nlohmann/json.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "entlab/counting.hpp"
#include "entlab/schedule.hpp"
#include "entlab/subshift.hpp"

namespace entlab::io {

using nlohmann::json;

/// Malformed or out-of-contract configuration (missing file, bad JSON,
/// wrong field types or values).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line and column (1-based) of a byte offset in text.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                      e.what() + ")");
  }
}

inline json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

inline Symbol as_symbol(const json& j, int alphabet, const std::string& where) {
  const int v = as_int(j, where);
  if (v < 0 || v >= alphabet) throw ConfigError(where + ": symbol " + std::to_string(v) + " outside the alphabet");
  return static_cast<Symbol>(v);
}

}  // namespace detail

/// A word is a string of decimal digits (alphabets up to 10) or an array
/// of integers.
inline Word word_from_json(const json& j, int alphabet, const std::string& where) {
  Word w;
  if (j.is_string()) {
    for (char c : j.get<std::string>()) {
      if (c < '0' || c > '9' || c - '0' >= alphabet) throw ConfigError(where + ": bad symbol '" + std::string(1, c) + "'");
      w.push_back(static_cast<Symbol>(c - '0'));
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) w.push_back(detail::as_symbol(j[i], alphabet, where + "[" + std::to_string(i) + "]"));
  } else {
    throw ConfigError(where + ": a word is a digit string or an integer array");
  }
  return w;
}

/// A symbol set is an integer array or the string "*" (every symbol).
inline SymbolSet symbol_set_from_json(const json& j, int alphabet, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "*") return SymbolSet::full(alphabet);
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": a symbol set is a non-empty integer array or \"*\"");
  SymbolSet s;
  for (std::size_t i = 0; i < j.size(); ++i) s.insert(detail::as_symbol(j[i], alphabet, where + "[" + std::to_string(i) + "]"));
  return s;
}

inline std::vector<SymbolSet> sets_from_json(const json& j, int alphabet, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of symbol sets");
  std::vector<SymbolSet> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(symbol_set_from_json(j[i], alphabet, where + "[" + std::to_string(i) + "]"));
  return out;
}

/// {"alphabet": m, "forbidden": [...]} or {"matrix": [[...]]}.
inline SubshiftSpec system_from_json(const json& j, const std::string& where = "system") {
  try {
    if (j.is_object() && j.contains("matrix")) {
      const auto& mj = j.at("matrix");
      if (!mj.is_array()) throw ConfigError(where + ".matrix: expected an array of rows");
      std::vector<std::vector<int>> rows;
      for (std::size_t r = 0; r < mj.size(); ++r) {
        if (!mj[r].is_array()) throw ConfigError(where + ".matrix: expected an array of rows");
        std::vector<int> row;
        for (std::size_t c = 0; c < mj[r].size(); ++c) row.push_back(detail::as_int(mj[r][c], where + ".matrix"));
        rows.push_back(std::move(row));
      }
      return SubshiftSpec::from_matrix(std::move(rows));
    }
    const int m = detail::as_int(detail::field(j, "alphabet", where), where + ".alphabet");
    std::vector<Word> forbidden;
    if (j.contains("forbidden")) {
      const auto& fj = j.at("forbidden");
      if (!fj.is_array()) throw ConfigError(where + ".forbidden: expected an array of words");
      for (std::size_t i = 0; i < fj.size(); ++i) {
        forbidden.push_back(word_from_json(fj[i], m, where + ".forbidden[" + std::to_string(i) + "]"));
      }
    }
    return SubshiftSpec::from_forbidden(m, std::move(forbidden));
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline TwoSidedRule rule_from_string(const std::string& s, const std::string& where) {
  if (s == "free") return TwoSidedRule::Free;
  if (s == "mirrored") return TwoSidedRule::Mirrored;
  if (s == "pinned") return TwoSidedRule::Pinned;
  if (s == "explicit") return TwoSidedRule::Explicit;
  throw ConfigError(where + ": unknown two_sided rule '" + s + "'");
}

inline const char* to_string(TwoSidedRule r) {
  switch (r) {
    case TwoSidedRule::Free: return "free";
    case TwoSidedRule::Mirrored: return "mirrored";
    case TwoSidedRule::Pinned: return "pinned";
    case TwoSidedRule::Explicit: return "explicit";
  }
  return "free";
}

/// One schedule: {"preperiod": [...], "period": [...], "two_sided": rule,
/// "pinned": word, "backward": {"preperiod": [...], "period": [...]}}.
inline DigitSetSchedule schedule_from_json(const json& j, int alphabet, const std::string& where) {
  try {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    auto pre = j.contains("preperiod") ? sets_from_json(j.at("preperiod"), alphabet, where + ".preperiod")
                                       : std::vector<SymbolSet>{};
    auto period = sets_from_json(detail::field(j, "period", where), alphabet, where + ".period");
    const std::string rule_name = j.contains("two_sided") ? j.at("two_sided").get<std::string>()
                                                          : (j.contains("backward") ? "explicit" : "free");
    const auto rule = rule_from_string(rule_name, where + ".two_sided");
    if (rule == TwoSidedRule::Explicit) {
      const auto& b = detail::field(j, "backward", where);
      PeriodicStream back;
      if (b.contains("preperiod")) back.pre = sets_from_json(b.at("preperiod"), alphabet, where + ".backward.preperiod");
      back.period = sets_from_json(detail::field(b, "period", where + ".backward"), alphabet, where + ".backward.period");
      return DigitSetSchedule::make_two_sided(alphabet, {std::move(pre), std::move(period)}, std::move(back));
    }
    Word pinned;
    if (j.contains("pinned")) pinned = word_from_json(j.at("pinned"), alphabet, where + ".pinned");
    return DigitSetSchedule::make(alphabet, std::move(pre), std::move(period), rule, pinned);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

/// {"alphabet": m} plus one of: schedule fields, "union": [schedules],
/// "whole": true, "empty": true.
inline Subset subset_from_json(const json& j, const std::string& where = "subset") {
  const int m = detail::as_int(detail::field(j, "alphabet", where), where + ".alphabet");
  if (m < 1 || m > kMaxAlphabet) throw ConfigError(where + ".alphabet: out of range");
  try {
    if (j.value("whole", false)) return Subset::whole(m);
    if (j.value("empty", false)) return Subset::empty(m);
    if (j.contains("union")) {
      const auto& u = j.at("union");
      if (!u.is_array()) throw ConfigError(where + ".union: expected an array");
      std::vector<DigitSetSchedule> members;
      for (std::size_t i = 0; i < u.size(); ++i) {
        members.push_back(schedule_from_json(u[i], m, where + ".union[" + std::to_string(i) + "]"));
      }
      return Subset::union_of(m, std::move(members));
    }
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return Subset(schedule_from_json(j, m, where));
}

inline json sets_to_json(const std::vector<SymbolSet>& sets) {
  json out = json::array();
  for (const auto& s : sets) {
    json a = json::array();
    for (auto x : s.symbols()) a.push_back(x);
    out.push_back(a);
  }
  return out;
}

inline json schedule_to_json(const DigitSetSchedule& s) {
  json j;
  j["alphabet"] = s.alphabet_size();
  j["preperiod"] = sets_to_json(s.preperiod());
  j["period"] = sets_to_json(s.period());
  j["two_sided"] = "explicit";
  j["backward"] = {{"preperiod", sets_to_json(s.backward().pre)}, {"period", sets_to_json(s.backward().period)}};
  return j;
}

/// Shortest round-trip representation, stable across runs.
inline std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Writes through a sibling temp file and renames it into place.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(path + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw ConfigError(path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError(path + ": rename failed");
  }
}

}  // namespace entlab::io
