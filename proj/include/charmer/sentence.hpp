#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace charmer {

/// Reserved placeholder used by the expansion operator. Never part of an
/// alphabet and never accepted in input text.
inline constexpr char32_t kSpecialChar = U'\0';

/// Default probe character for position selection.
inline constexpr char32_t kDefaultTestChar = U' ';

/// Maximum number of scalar values in a sentence.
inline constexpr std::size_t kMaxSentenceLength = 1024;

/// Immutable sequence of Unicode scalar values. Construction rejects the
/// reserved character and anything longer than kMaxSentenceLength.
class Sentence {
 public:
  Sentence() = default;
  explicit Sentence(std::u32string chars);

  static Sentence from_utf8(std::string_view text);

  std::u32string_view chars() const noexcept { return chars_; }
  const std::u32string& str() const noexcept { return chars_; }
  std::size_t size() const noexcept { return chars_.size(); }
  bool empty() const noexcept { return chars_.empty(); }
  char32_t operator[](std::size_t i) const { return chars_[i]; }

  /// Number of slots in the expanded form, 2|s| + 1.
  std::size_t expanded_size() const noexcept { return 2 * chars_.size() + 1; }

  std::string to_utf8() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
  friend auto operator<=>(const Sentence&, const Sentence&) = default;

 private:
  struct Unchecked {};
  Sentence(std::u32string chars, Unchecked) : chars_(std::move(chars)) {}
  friend Sentence make_unchecked_sentence(std::u32string chars);

  std::u32string chars_;
};

/// Sequence over the alphabet plus the reserved character. Produced by
/// expand(); replacements may leave it in any shape.
class ExpandedSentence {
 public:
  ExpandedSentence() = default;
  explicit ExpandedSentence(std::u32string chars) : chars_(std::move(chars)) {}

  std::u32string_view chars() const noexcept { return chars_; }
  std::size_t size() const noexcept { return chars_.size(); }
  char32_t operator[](std::size_t i) const { return chars_[i]; }

  /// Replacement operator: returns a copy with 1-based slot `i` set to `c`.
  ExpandedSentence replaced(std::size_t i, char32_t c) const;

  friend bool operator==(const ExpandedSentence&,
                         const ExpandedSentence&) = default;

 private:
  std::u32string chars_;
};

/// Character set available to an attack, plus the probe character.
class Alphabet {
 public:
  Alphabet() = default;
  /// Characters are sorted and deduplicated. Throws InvalidSentence when the
  /// set contains the reserved character or the test character is reserved.
  explicit Alphabet(std::u32string chars, char32_t test_char = kDefaultTestChar);

  static Alphabet from_utf8(std::string_view chars,
                            char32_t test_char = kDefaultTestChar);

  /// Sorted ascending, unique.
  std::u32string_view chars() const noexcept { return chars_; }
  std::size_t size() const noexcept { return chars_.size(); }
  char32_t test_char() const noexcept { return test_char_; }
  bool contains(char32_t c) const noexcept;

  /// Stable hex digest of the character set and test character.
  std::string fingerprint() const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::u32string chars_;
  char32_t test_char_ = kDefaultTestChar;
};

/// Builds a sentence without revalidation. Only for library internals that
/// derive a sentence from an already valid one.
Sentence make_unchecked_sentence(std::u32string chars);

}  // namespace charmer

template <>
struct std::hash<charmer::Sentence> {
  std::size_t operator()(const charmer::Sentence& s) const noexcept {
    return std::hash<std::u32string_view>{}(s.chars());
  }
};
