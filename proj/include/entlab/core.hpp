#pragma once

// Basic vocabulary shared by every module: symbols, symbol sets, words,
// error codes, and small numeric helpers.

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace entlab {

using Symbol = std::uint16_t;
inline constexpr int kMaxAlphabet = 256;

using Word = std::vector<Symbol>;

enum class ErrorCode {
  InvalidSpec,
  IncompatibleAlphabet,
  WordTooShort,
  InadmissibleWord,
  DepthOverflow,
  DepthCapTooSmall,
  Inconclusive,
  TargetOutOfRange,
  NotMixing,
  ToleranceUnachievable,
  BaseEntropyTooSmall,
  ScaleUnderflow,
  InternalLimit,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IncompatibleAlphabet: return "IncompatibleAlphabet";
    case ErrorCode::WordTooShort: return "WordTooShort";
    case ErrorCode::InadmissibleWord: return "InadmissibleWord";
    case ErrorCode::DepthOverflow: return "DepthOverflow";
    case ErrorCode::DepthCapTooSmall: return "DepthCapTooSmall";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::NotMixing: return "NotMixing";
    case ErrorCode::ToleranceUnachievable: return "ToleranceUnachievable";
    case ErrorCode::BaseEntropyTooSmall: return "BaseEntropyTooSmall";
    case ErrorCode::ScaleUnderflow: return "ScaleUnderflow";
    case ErrorCode::InternalLimit: return "InternalLimit";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Set of symbols drawn from an alphabet of at most kMaxAlphabet letters.
class SymbolSet {
 public:
  SymbolSet() = default;
  SymbolSet(std::initializer_list<int> symbols) {
    for (int s : symbols) insert(s);
  }

  static SymbolSet full(int alphabet) {
    SymbolSet set;
    for (int s = 0; s < alphabet; ++s) set.bits_.set(static_cast<std::size_t>(s));
    return set;
  }
  static SymbolSet single(int symbol) {
    SymbolSet set;
    set.insert(symbol);
    return set;
  }

  void insert(int symbol) {
    if (symbol < 0 || symbol >= kMaxAlphabet) {
      throw Error(ErrorCode::InvalidSpec, "symbol out of range: " + std::to_string(symbol));
    }
    bits_.set(static_cast<std::size_t>(symbol));
  }
  void erase(int symbol) { bits_.reset(static_cast<std::size_t>(symbol)); }
  bool contains(int symbol) const {
    return symbol >= 0 && symbol < kMaxAlphabet && bits_.test(static_cast<std::size_t>(symbol));
  }
  int size() const { return static_cast<int>(bits_.count()); }
  bool empty() const { return bits_.none(); }

  /// Largest symbol + 1, or 0 when empty.
  int span() const {
    for (int s = kMaxAlphabet - 1; s >= 0; --s) {
      if (bits_.test(static_cast<std::size_t>(s))) return s + 1;
    }
    return 0;
  }
  int min() const {
    for (int s = 0; s < kMaxAlphabet; ++s) {
      if (bits_.test(static_cast<std::size_t>(s))) return s;
    }
    return -1;
  }

  bool is_subset_of(const SymbolSet& other) const { return (bits_ & ~other.bits_).none(); }

  std::vector<Symbol> symbols() const {
    std::vector<Symbol> out;
    for (int s = 0; s < kMaxAlphabet; ++s) {
      if (bits_.test(static_cast<std::size_t>(s))) out.push_back(static_cast<Symbol>(s));
    }
    return out;
  }

  SymbolSet operator&(const SymbolSet& other) const {
    SymbolSet r;
    r.bits_ = bits_ & other.bits_;
    return r;
  }
  SymbolSet operator|(const SymbolSet& other) const {
    SymbolSet r;
    r.bits_ = bits_ | other.bits_;
    return r;
  }
  friend bool operator==(const SymbolSet& a, const SymbolSet& b) { return a.bits_ == b.bits_; }

 private:
  std::bitset<kMaxAlphabet> bits_;
};

/// Parses "0101" (single decimal digits) into a word.
inline Word word_from_string(std::string_view text) {
  Word w;
  w.reserve(text.size());
  for (char c : text) {
    if (c < '0' || c > '9') throw Error(ErrorCode::InvalidSpec, "bad symbol character");
    w.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

inline std::string word_to_string(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 10) {
      out.push_back(static_cast<char>('0' + w[i]));
    } else {
      if (i != 0) out.push_back('.');
      out += std::to_string(w[i]);
      if (i + 1 != w.size()) out.push_back('.');
    }
  }
  return out;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) tolerant of -inf operands.
inline double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// Least-squares line through (x_i, y_i).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // root-mean-square of the residuals
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit fit;
  const std::size_t n = xs.size();
  if (n == 0) return fit;
  if (n == 1) {
    fit.intercept = ys[0];
    return fit;
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

inline long long gcd_ll(long long a, long long b) { return std::gcd(a, b); }
inline long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

}  // namespace entlab
