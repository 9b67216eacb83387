#include "charmer/sentence.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>

#include "charmer/error.hpp"
#include "charmer/utf8.hpp"

namespace charmer {

Sentence::Sentence(std::u32string chars) : chars_(std::move(chars)) {
  if (chars_.find(kSpecialChar) != std::u32string::npos) {
    throw InvalidSentence("sentence contains the reserved character U+0000");
  }
  if (chars_.size() > kMaxSentenceLength) {
    throw InvalidSentence("sentence length " + std::to_string(chars_.size()) +
                          " exceeds maximum " +
                          std::to_string(kMaxSentenceLength));
  }
}

Sentence Sentence::from_utf8(std::string_view text) {
  return Sentence(utf8::decode(text));
}

std::string Sentence::to_utf8() const { return utf8::encode(chars_); }

Sentence make_unchecked_sentence(std::u32string chars) {
  return Sentence(std::move(chars), Sentence::Unchecked{});
}

ExpandedSentence ExpandedSentence::replaced(std::size_t i, char32_t c) const {
  if (i < 1 || i > chars_.size()) {
    throw std::out_of_range("replacement index " + std::to_string(i) +
                            " outside [1, " + std::to_string(chars_.size()) +
                            "]");
  }
  ExpandedSentence out = *this;
  out.chars_[i - 1] = c;
  return out;
}

Alphabet::Alphabet(std::u32string chars, char32_t test_char)
    : chars_(std::move(chars)), test_char_(test_char) {
  std::sort(chars_.begin(), chars_.end());
  chars_.erase(std::unique(chars_.begin(), chars_.end()), chars_.end());
  if (contains(kSpecialChar)) {
    throw InvalidSentence("alphabet contains the reserved character U+0000");
  }
  if (test_char_ == kSpecialChar) {
    throw InvalidSentence("test character must differ from U+0000");
  }
}

Alphabet Alphabet::from_utf8(std::string_view chars, char32_t test_char) {
  return Alphabet(utf8::decode(chars), test_char);
}

bool Alphabet::contains(char32_t c) const noexcept {
  return std::binary_search(chars_.begin(), chars_.end(), c);
}

std::string Alphabet::fingerprint() const {
  // FNV-1a over little-endian code points, then the test character.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](char32_t c) {
    for (int b = 0; b < 4; ++b) {
      h ^= (static_cast<std::uint32_t>(c) >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  for (char32_t c : chars_) mix(c);
  mix(0xFFFFFFFF);
  mix(test_char_);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace charmer
