#pragma once

// Sentence algebra: edit distance, the expansion/contraction pair, single
// character edits expressed as slot replacements, and edit balls.
//
// Slots of an expanded sentence are 1-based. For a sentence of length L the
// expansion has 2L + 1 slots: odd slots hold the reserved character (gaps
// where an insertion can happen), even slot 2j holds character j.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "charmer/sentence.hpp"

namespace charmer {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

inline std::size_t levenshtein(const Sentence& a, const Sentence& b) {
  return levenshtein(a.chars(), b.chars());
}

ExpandedSentence expand(const Sentence& s);

/// Drops every reserved character. Throws InvalidSentence only if the result
/// would exceed kMaxSentenceLength.
Sentence contract(const ExpandedSentence& e);

/// contract(expand(s) with slot i replaced by c), computed without
/// materialising the expansion. Throws std::out_of_range for i outside
/// [1, 2|s|+1].
Sentence single_edit(const Sentence& s, std::size_t i, char32_t c);

/// True when the edit leaves the sentence unchanged.
bool is_identity_edit(const Sentence& s, std::size_t i, char32_t c);

/// One single-character edit of a sentence and the parametrisation that
/// produced it (first one in generation order).
struct Neighbor {
  Sentence sentence;
  std::size_t position = 0;  // 1-based slot
  char32_t replacement = kSpecialChar;
};

/// Distance-one neighbourhood including s itself. Generation order is slot
/// ascending, then alphabet order, then the reserved character; duplicates
/// keep their first occurrence. Insertions that would overflow the maximum
/// length are skipped.
std::vector<Neighbor> generate_neighbors(const Sentence& s,
                                         const Alphabet& alphabet);

inline constexpr std::size_t kDefaultBallBudget = 2'000'000;

/// All sentences within distance k, in breadth-first discovery order.
/// Throws BudgetExceeded once more than `budget` distinct sentences appear.
std::vector<Sentence> enumerate_ball(const Sentence& s, const Alphabet& alphabet,
                                     std::size_t k,
                                     std::size_t budget = kDefaultBallBudget);

struct BallBounds {
  std::uint64_t lower = 0;
  std::uint64_t upper = 0;
};

/// Closed-form lower/upper bounds on the ball size. For a one-letter
/// alphabet both bounds are the exact size min(|S|, k) + k + 1, which is
/// 2k+1 once |S| >= k. Throws Overflow when a bound does not fit
/// in 64 bits and std::invalid_argument for an empty alphabet.
BallBounds ball_size_bounds(std::uint64_t sentence_len,
                            std::uint64_t alphabet_size, std::uint64_t k);

}  // namespace charmer
