#pragma once

// Sliding block codes between subshifts.

#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/counting.hpp"
#include "entlab/subshift.hpp"

namespace entlab {

/// A factor map given by a local rule on (2 * radius + 1)-windows.
class BlockCode {
 public:
  using Rule = std::function<Symbol(std::span<const Symbol>)>;

  /// Tabulates the rule on every admissible source window and checks that
  /// images of admissible words are admissible in the target.
  static BlockCode make(SubshiftSpec source, SubshiftSpec target, int radius, const Rule& rule) {
    if (radius < 0) throw Error(ErrorCode::InvalidSpec, "radius must be >= 0");
    BlockCode code(std::move(source), std::move(target), radius);
    const int width = 2 * radius + 1;
    const auto whole = Subset::whole(code.source_.alphabet_size());
    for (const auto& w : enumerate_words(code.source_, whole, 0, width)) {
      const Symbol image = rule(std::span<const Symbol>(w));
      if (image >= code.target_.alphabet_size()) {
        throw Error(ErrorCode::InvalidSpec, "local rule produced a symbol outside the target alphabet");
      }
      code.table_.emplace(code.encode(w), image);
    }
    // Forbidden target words have length <= memory + 1; checking images of
    // that length covers every constraint.
    const int check_len = code.target_.memory() + 1 + 2 * radius;
    for (const auto& w : enumerate_words(code.source_, whole, 0, check_len)) {
      if (!code.target_.is_admissible(code.image_unchecked(w))) {
        throw Error(ErrorCode::InvalidSpec, "block code image is not admissible in the target");
      }
    }
    return code;
  }

  static BlockCode identity(const SubshiftSpec& shift) {
    return make(shift, shift, 0, [](std::span<const Symbol> w) { return w[0]; });
  }

  /// Radius-0 code applying a symbol map.
  static BlockCode symbol_map(const SubshiftSpec& source, const SubshiftSpec& target, std::vector<Symbol> map) {
    return make(source, target, 0, [map = std::move(map)](std::span<const Symbol> w) { return map.at(w[0]); });
  }

  /// Everything to the one-symbol shift.
  static BlockCode collapse(const SubshiftSpec& source) {
    return make(source, SubshiftSpec::full(1), 0, [](std::span<const Symbol>) { return Symbol{0}; });
  }

  int radius() const { return radius_; }
  int window() const { return 2 * radius_ + 1; }
  const SubshiftSpec& source() const { return source_; }
  const SubshiftSpec& target() const { return target_; }

  /// Image symbol of an admissible window (std::nullopt when inadmissible).
  std::optional<Symbol> local(std::span<const Symbol> window) const {
    auto it = table_.find(encode(window));
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

 private:
  BlockCode(SubshiftSpec source, SubshiftSpec target, int radius)
      : source_(std::move(source)), target_(std::move(target)), radius_(radius) {}

  std::uint64_t encode(std::span<const Symbol> w) const {
    std::uint64_t code = 0;
    for (Symbol s : w) code = code * static_cast<std::uint64_t>(source_.alphabet_size()) + s;
    return code;
  }

  Word image_unchecked(const Word& w) const {
    Word out;
    const auto width = static_cast<std::size_t>(window());
    for (std::size_t i = 0; i + width <= w.size(); ++i) {
      out.push_back(table_.at(encode(std::span<const Symbol>(w.data() + i, width))));
    }
    return out;
  }

  SubshiftSpec source_;
  SubshiftSpec target_;
  int radius_;
  std::unordered_map<std::uint64_t, Symbol> table_;
};

/// Image of a source word; the result is shorter by 2 * radius.
inline Word apply_block_code(const BlockCode& code, const Word& w) {
  if (static_cast<int>(w.size()) < code.window()) {
    throw Error(ErrorCode::WordTooShort, "word shorter than the code window");
  }
  if (!code.source().is_admissible(w)) throw Error(ErrorCode::InadmissibleWord, word_to_string(w));
  Word out;
  const auto width = static_cast<std::size_t>(code.window());
  for (std::size_t i = 0; i + width <= w.size(); ++i) {
    out.push_back(*code.local(std::span<const Symbol>(w.data() + i, width)));
  }
  return out;
}

}  // namespace entlab
