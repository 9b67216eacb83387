#pragma once

// Greedy character-level attack. Each iteration ranks the slots of the
// current sentence by how much a probe edit raises the margin loss, scores
// every single-character edit at the best slots in one batch, and keeps the
// highest-loss candidate. All argmax and top-n choices break ties toward
// the lowest index.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "charmer/oracle.hpp"
#include "charmer/pjc.hpp"
#include "charmer/sentence.hpp"

namespace charmer {

struct Candidate {
  Sentence sentence;
  std::size_t position = 0;  // 1-based slot
  char32_t replacement = kSpecialChar;
};

/// Called with every candidate batch right before it is scored.
using CandidateObserver = std::function<void(
    const Sentence& current, const EditHistory& history,
    std::span<const Candidate> candidates)>;

struct AttackConfig {
  /// Candidate slots per iteration; 1 gives the fast variant.
  std::size_t n = 20;
  /// Maximum number of accepted edits.
  std::size_t k = 10;
  Alphabet alphabet;
  PjcConstraints constraints;
  /// Restrict slots to the top-m whitespace segments each iteration.
  std::optional<std::size_t> segments;
  /// Maximum sentences sent to the oracle; 0 means unlimited.
  std::size_t budget = 0;
  /// Only the random-position baseline draws from it.
  std::uint64_t seed = 0;
  CandidateObserver observer;
};

struct TraceStep {
  std::size_t position = 0;
  char32_t replacement = kSpecialChar;
  /// Loss of the accepted candidate.
  double loss = 0.0;
  /// Loss of the unchanged sentence within the same batch; NaN when the
  /// identity edit was not among the candidates.
  double previous_loss = std::numeric_limits<double>::quiet_NaN();
  /// False when the best candidate was the sentence itself.
  bool changed = true;
};

struct AttackOutcome {
  Sentence original;
  Sentence adversarial;
  bool success = false;
  std::size_t edits_used = 0;
  /// Loss of `adversarial`; NaN when no candidate was ever scored.
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  std::size_t queries = 0;
  double elapsed_seconds = 0.0;
  bool budget_exhausted = false;
  std::vector<TraceStep> trace;
};

/// Probe-based slot ranking. For each allowed slot i the probe puts the
/// test character t at i, or the reserved character when slot i already
/// holds t, and the resulting loss is recorded. Returns the n slots with the
/// highest probe loss, best first. Scores exactly one probe per allowed slot
/// (all 2|s|+1 slots when `allowed` is empty).
std::vector<std::size_t> select_positions(const ClassifierOracle& oracle,
                                          const Sentence& s, Label y,
                                          std::size_t n, char32_t t,
                                          std::span<const std::size_t> allowed = {});

struct SegmentSelection {
  /// Ascending 1-based slots.
  std::vector<std::size_t> positions;
  std::size_t queries = 0;
};

/// Masks each whitespace-delimited segment with a single t, keeps the m
/// segments whose masking raises the loss most and returns every slot from
/// the gap before to the gap after each kept segment. With at most m
/// segments every slot is allowed and nothing is scored.
SegmentSelection preselect_segments(const ClassifierOracle& oracle,
                                    const Sentence& s, Label y, std::size_t m,
                                    char32_t t);

/// All single edits at `positions` (visited in ascending order) with every
/// alphabet character and the reserved character, minus edits rejected by
/// the enabled constraints. Duplicates keep their first occurrence.
std::vector<Candidate> build_candidates(const Sentence& s,
                                        std::span<const std::size_t> positions,
                                        const Alphabet& alphabet,
                                        PjcConstraints constraints,
                                        const EditHistory& history);

AttackOutcome charmer_attack(const ClassifierOracle& oracle, const Sentence& s,
                             Label y, const AttackConfig& config);

/// charmer_attack with the n slots drawn uniformly at random instead of
/// probed.
AttackOutcome random_position_baseline(const ClassifierOracle& oracle,
                                       const Sentence& s, Label y,
                                       const AttackConfig& config);

struct ExhaustiveResult {
  Sentence sentence;
  double loss = 0.0;
  std::size_t queries = 0;
};

/// Scores the whole distance-one neighbourhood and returns its best member.
ExhaustiveResult exhaustive_k1(const ClassifierOracle& oracle, const Sentence& s,
                               Label y, const Alphabet& alphabet);

/// Index of the first maximum.
std::size_t first_argmax(std::span<const double> values);

}  // namespace charmer
