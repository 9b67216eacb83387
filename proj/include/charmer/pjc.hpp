#pragma once

// Word-level restrictions used when attacking typo-corrector style defenses.
//
// A word is a maximal run of characters other than U+0020. Edits are judged
// in the expanded-slot coordinates of sentence_space.hpp:
//  - an edit touches a word when it replaces/deletes one of its characters,
//    inserts inside it, or inserts a non-space character right against it;
//  - replacing or deleting a space touches the words on both sides of it;
//  - a word's first-character zone is its first character plus the gap
//    before it, and the last-character zone mirrors that at the end;
//  - inserting a non-space character with no word on either side creates a
//    new one-character word.
// Identity edits are always allowed.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "charmer/sentence.hpp"

namespace charmer {

enum class PjcFlag : std::uint8_t {
  Repeat = 1 << 0,  // never touch a word twice
  First = 1 << 1,   // never touch a word's first character
  Last = 1 << 2,    // never touch a word's last character
  Length = 1 << 3,  // never touch words shorter than four characters
  LowEng = 1 << 4,  // only remove/insert/replace with 'a'..'z'
};

class PjcConstraints {
 public:
  PjcConstraints() = default;

  static PjcConstraints all();
  /// Comma separated subset of repeat,first,last,length,loweng; empty or
  /// "none" disables everything. Throws std::invalid_argument otherwise.
  static PjcConstraints parse(std::string_view spec);

  PjcConstraints& enable(PjcFlag f) {
    bits_ |= static_cast<std::uint8_t>(f);
    return *this;
  }
  bool has(PjcFlag f) const noexcept {
    return (bits_ & static_cast<std::uint8_t>(f)) != 0;
  }
  bool any() const noexcept { return bits_ != 0; }

  /// Canonical comma separated form, "none" when empty.
  std::string to_string() const;

  friend bool operator==(PjcConstraints, PjcConstraints) = default;

 private:
  std::uint8_t bits_ = 0;
};

/// Half-open character range [begin, end) of one word.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(WordSpan, WordSpan) = default;
};

std::vector<WordSpan> split_words(std::u32string_view text);

/// Which characters of the current sentence belong to words that were
/// already perturbed. Carried through every accepted edit.
class EditHistory {
 public:
  EditHistory() = default;
  explicit EditHistory(const Sentence& s) : dirty_(s.size(), false) {}

  /// History of single_edit(s, i, c).
  EditHistory advance(const Sentence& s, std::size_t i, char32_t c) const;

  bool word_edited(WordSpan w) const;
  const std::vector<bool>& dirty() const noexcept { return dirty_; }

 private:
  std::vector<bool> dirty_;
};

/// True when the edit (1-based slot i, replacement c) respects every enabled
/// constraint.
bool edit_allowed(const Sentence& s, std::size_t i, char32_t c,
                  PjcConstraints constraints, const EditHistory& history);

}  // namespace charmer
