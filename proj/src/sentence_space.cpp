#include "charmer/sentence_space.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "charmer/error.hpp"

namespace charmer {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  // Two rows over the shorter string.
  std::vector<std::size_t> prev(a.size() + 1);
  std::vector<std::size_t> cur(a.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t j = 1; j <= b.size(); ++j) {
    cur[0] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      cur[i] = std::min({cur[i - 1] + 1, prev[i] + 1,
                         prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[a.size()];
}

ExpandedSentence expand(const Sentence& s) {
  std::u32string out(s.expanded_size(), kSpecialChar);
  for (std::size_t j = 0; j < s.size(); ++j) out[2 * j + 1] = s[j];
  return ExpandedSentence(std::move(out));
}

Sentence contract(const ExpandedSentence& e) {
  std::u32string out;
  out.reserve(e.size());
  for (char32_t c : e.chars()) {
    if (c != kSpecialChar) out.push_back(c);
  }
  return Sentence(std::move(out));
}

namespace {

void check_slot(const Sentence& s, std::size_t i) {
  if (i < 1 || i > s.expanded_size()) {
    throw std::out_of_range("slot " + std::to_string(i) + " outside [1, " +
                            std::to_string(s.expanded_size()) + "]");
  }
}

}  // namespace

bool is_identity_edit(const Sentence& s, std::size_t i, char32_t c) {
  check_slot(s, i);
  if (i % 2 == 1) return c == kSpecialChar;
  return s[i / 2 - 1] == c;
}

Sentence single_edit(const Sentence& s, std::size_t i, char32_t c) {
  check_slot(s, i);
  std::u32string out(s.chars());
  if (i % 2 == 1) {
    if (c == kSpecialChar) return s;
    if (s.size() >= kMaxSentenceLength) {
      throw InvalidSentence("insertion would exceed the maximum sentence length");
    }
    out.insert(out.begin() + static_cast<std::ptrdiff_t>((i - 1) / 2), c);
    return make_unchecked_sentence(std::move(out));
  }
  const std::size_t j = i / 2 - 1;
  if (c == kSpecialChar) {
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
  } else {
    out[j] = c;
  }
  return make_unchecked_sentence(std::move(out));
}

std::vector<Neighbor> generate_neighbors(const Sentence& s,
                                         const Alphabet& alphabet) {
  std::vector<Neighbor> out;
  std::unordered_set<std::u32string_view> seen;
  out.reserve(s.expanded_size() * (alphabet.size() + 1));
  const bool can_insert = s.size() < kMaxSentenceLength;

  std::u32string replacements(alphabet.chars());
  replacements.push_back(kSpecialChar);

  // Sentences are stored in `out`; reserve above keeps views into them valid.
  for (std::size_t i = 1; i <= s.expanded_size(); ++i) {
    if (i % 2 == 1 && !can_insert) {
      if (seen.insert(s.chars()).second) out.push_back({s, i, kSpecialChar});
      continue;
    }
    for (char32_t c : replacements) {
      Sentence cand = single_edit(s, i, c);
      if (seen.contains(cand.chars())) continue;
      out.push_back({std::move(cand), i, c});
      seen.insert(out.back().sentence.chars());
    }
  }
  return out;
}

std::vector<Sentence> enumerate_ball(const Sentence& s, const Alphabet& alphabet,
                                     std::size_t k, std::size_t budget) {
  if (k < 1) throw std::invalid_argument("edit budget k must be at least 1");

  std::vector<Sentence> ball{s};
  std::unordered_set<Sentence> members{s};
  std::size_t frontier_begin = 0;
  for (std::size_t level = 1; level <= k; ++level) {
    const std::size_t frontier_end = ball.size();
    // Neighbours of sentences from earlier levels are already present, so
    // only the newest ring needs expanding.
    for (std::size_t f = frontier_begin; f < frontier_end; ++f) {
      const Sentence base = ball[f];
      for (auto& n : generate_neighbors(base, alphabet)) {
        if (members.contains(n.sentence)) continue;
        if (members.size() >= budget) {
          throw BudgetExceeded(budget, "edit ball exceeds candidate budget of " +
                                           std::to_string(budget));
        }
        members.insert(n.sentence);
        ball.push_back(std::move(n.sentence));
      }
    }
    frontier_begin = frontier_end;
  }
  return ball;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw Overflow("ball size bound exceeds 64-bit range");
  }
  return r;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t e = 0; e < exp; ++e) r = checked_mul(r, base);
  return r;
}

}  // namespace

BallBounds ball_size_bounds(std::uint64_t sentence_len,
                            std::uint64_t alphabet_size, std::uint64_t k) {
  if (alphabet_size == 0) {
    throw std::invalid_argument("alphabet must contain at least one character");
  }
  if (alphabet_size == 1) {
    // Only a^m with |m - |S|| <= k remain, and m cannot go below zero.
    const std::uint64_t exact = std::min(sentence_len, k) + k + 1;
    return {exact, exact};
  }
  BallBounds b;
  b.lower = (checked_pow(alphabet_size, k + 1) - 1) / (alphabet_size - 1);
  const std::uint64_t slots = checked_mul(2, sentence_len + k) - 1;
  b.upper = checked_mul(checked_pow(alphabet_size + 1, k), checked_pow(slots, k));
  return b;
}

}  // namespace charmer
