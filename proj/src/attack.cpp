#include "charmer/attack.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "charmer/random.hpp"
#include "charmer/sentence_space.hpp"

namespace charmer {

std::size_t first_argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

namespace {

std::vector<double> losses_of(const ClassifierOracle& oracle,
                              std::span<const Sentence> batch, Label y) {
  const auto scores = oracle.score_batch(batch);
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& row : scores) out.push_back(cw_loss(row, y));
  return out;
}

std::vector<std::size_t> all_positions(const Sentence& s) {
  std::vector<std::size_t> out(s.expanded_size());
  std::iota(out.begin(), out.end(), std::size_t{1});
  return out;
}

/// Positions sorted by descending loss, stable on the input order.
std::vector<std::size_t> top_n(std::span<const std::size_t> positions,
                               std::span<const double> losses, std::size_t n) {
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return losses[a] > losses[b]; });
  order.resize(std::min(n, order.size()));
  std::vector<std::size_t> out;
  out.reserve(order.size());
  for (auto idx : order) out.push_back(positions[idx]);
  return out;
}

}  // namespace

std::vector<std::size_t> select_positions(const ClassifierOracle& oracle,
                                          const Sentence& s, Label y,
                                          std::size_t n, char32_t t,
                                          std::span<const std::size_t> allowed) {
  if (t == kSpecialChar) {
    throw std::invalid_argument("test character must differ from U+0000");
  }
  std::vector<std::size_t> slots = allowed.empty()
                                       ? all_positions(s)
                                       : std::vector<std::size_t>(allowed.begin(),
                                                                  allowed.end());
  std::sort(slots.begin(), slots.end());

  std::vector<Sentence> probes;
  probes.reserve(slots.size());
  for (std::size_t i : slots) {
    const bool holds_t = i % 2 == 0 && s[i / 2 - 1] == t;
    probes.push_back(single_edit(s, i, holds_t ? kSpecialChar : t));
  }
  const auto losses = losses_of(oracle, probes, y);
  return top_n(slots, losses, n);
}

SegmentSelection preselect_segments(const ClassifierOracle& oracle,
                                    const Sentence& s, Label y, std::size_t m,
                                    char32_t t) {
  if (m < 1) throw std::invalid_argument("segment count must be >= 1");
  const auto segments = split_words(s.chars());
  SegmentSelection out;
  if (segments.size() <= m) {
    out.positions = all_positions(s);
    return out;
  }

  std::vector<Sentence> masked;
  masked.reserve(segments.size());
  for (const auto& seg : segments) {
    std::u32string text(s.chars());
    text.replace(seg.begin, seg.size(), 1, t);
    masked.push_back(Sentence(std::move(text)));
  }
  const auto losses = losses_of(oracle, masked, y);
  out.queries = masked.size();

  std::vector<std::size_t> seg_ids(segments.size());
  std::iota(seg_ids.begin(), seg_ids.end(), std::size_t{0});
  const auto kept = top_n(seg_ids, losses, m);

  std::vector<bool> allowed(s.expanded_size() + 1, false);
  for (std::size_t id : kept) {
    const auto& seg = segments[id];
    for (std::size_t i = 2 * seg.begin + 1; i <= 2 * seg.end + 1; ++i) allowed[i] = true;
  }
  for (std::size_t i = 1; i <= s.expanded_size(); ++i) {
    if (allowed[i]) out.positions.push_back(i);
  }
  return out;
}

std::vector<Candidate> build_candidates(const Sentence& s,
                                        std::span<const std::size_t> positions,
                                        const Alphabet& alphabet,
                                        PjcConstraints constraints,
                                        const EditHistory& history) {
  std::vector<std::size_t> slots(positions.begin(), positions.end());
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());

  std::u32string replacements(alphabet.chars());
  replacements.push_back(kSpecialChar);

  std::vector<Candidate> out;
  std::unordered_set<std::u32string> seen;
  const bool can_insert = s.size() < kMaxSentenceLength;
  for (std::size_t i : slots) {
    for (char32_t c : replacements) {
      if (i % 2 == 1 && c != kSpecialChar && !can_insert) continue;
      if (!edit_allowed(s, i, c, constraints, history)) continue;
      Sentence cand = single_edit(s, i, c);
      if (!seen.insert(cand.str()).second) continue;
      out.push_back({std::move(cand), i, c});
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared greedy loop; `choose` picks the candidate slots for an iteration
// and reports how many probe queries it spent.
template <typename ChoosePositions>
AttackOutcome greedy_attack(const ClassifierOracle& oracle, const Sentence& s,
                            Label y, const AttackConfig& config,
                            ChoosePositions&& choose) {
  if (config.n < 1 || config.k < 1) {
    throw std::invalid_argument("attack needs n >= 1 and k >= 1");
  }
  const auto start = Clock::now();
  AttackOutcome out;
  out.original = s;
  out.adversarial = s;

  Sentence current = s;
  EditHistory history(s);
  auto within_budget = [&](std::size_t extra) {
    return config.budget == 0 || out.queries + extra <= config.budget;
  };

  for (std::size_t iter = 0; iter < config.k; ++iter) {
    std::vector<std::size_t> allowed;
    if (config.segments) {
      const std::size_t segment_count = split_words(current.chars()).size();
      if (segment_count > *config.segments && !within_budget(segment_count)) {
        out.budget_exhausted = true;
        break;
      }
      auto sel = preselect_segments(oracle, current, y, *config.segments,
                                    config.alphabet.test_char());
      out.queries += sel.queries;
      allowed = std::move(sel.positions);
    }
    const std::size_t probe_cost = choose.probe_cost(current, allowed);
    if (!within_budget(probe_cost)) {
      out.budget_exhausted = true;
      break;
    }
    const auto positions = choose(current, allowed);
    out.queries += probe_cost;

    auto candidates = build_candidates(current, positions, config.alphabet,
                                       config.constraints, history);
    if (candidates.empty()) break;
    if (!within_budget(candidates.size())) {
      out.budget_exhausted = true;
      break;
    }
    if (config.observer) config.observer(current, history, candidates);

    std::vector<Sentence> batch;
    batch.reserve(candidates.size());
    for (const auto& c : candidates) batch.push_back(c.sentence);
    const auto scores = oracle.score_batch(batch);
    out.queries += batch.size();

    std::vector<double> losses;
    losses.reserve(scores.size());
    for (const auto& row : scores) losses.push_back(cw_loss(row, y));
    const std::size_t best = first_argmax(losses);
    const auto& chosen = candidates[best];

    TraceStep step;
    step.position = chosen.position;
    step.replacement = chosen.replacement;
    step.loss = losses[best];
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (candidates[j].sentence == current) {
        step.previous_loss = losses[j];
        break;
      }
    }
    step.changed = chosen.sentence != current;
    out.trace.push_back(step);
    out.final_loss = losses[best];

    if (step.changed) {
      history = history.advance(current, chosen.position, chosen.replacement);
      current = chosen.sentence;
      ++out.edits_used;
    }
    out.adversarial = current;
    if (is_adversarial(scores[best], y)) {
      out.success = true;
      break;
    }
    // The same sentence would produce the same batch again.
    if (!step.changed) break;
  }
  out.elapsed_seconds = seconds_since(start);
  return out;
}

struct ProbeSelector {
  const ClassifierOracle& oracle;
  Label y;
  const AttackConfig& config;

  std::size_t probe_cost(const Sentence& s,
                         const std::vector<std::size_t>& allowed) const {
    return allowed.empty() ? s.expanded_size() : allowed.size();
  }
  std::vector<std::size_t> operator()(const Sentence& s,
                                      const std::vector<std::size_t>& allowed) const {
    return select_positions(oracle, s, y, config.n, config.alphabet.test_char(),
                            allowed);
  }
};

struct RandomSelector {
  const AttackConfig& config;
  Rng rng;

  std::size_t probe_cost(const Sentence&, const std::vector<std::size_t>&) const {
    return 0;
  }
  std::vector<std::size_t> operator()(const Sentence& s,
                                      const std::vector<std::size_t>& allowed) {
    const auto pool = allowed.empty() ? all_positions(s) : allowed;
    std::vector<std::size_t> out;
    for (auto idx : sample_without_replacement(rng, pool.size(), config.n)) {
      out.push_back(pool[idx]);
    }
    return out;
  }
};

}  // namespace

AttackOutcome charmer_attack(const ClassifierOracle& oracle, const Sentence& s,
                             Label y, const AttackConfig& config) {
  return greedy_attack(oracle, s, y, config, ProbeSelector{oracle, y, config});
}

AttackOutcome random_position_baseline(const ClassifierOracle& oracle,
                                       const Sentence& s, Label y,
                                       const AttackConfig& config) {
  return greedy_attack(oracle, s, y, config, RandomSelector{config, Rng(config.seed)});
}

ExhaustiveResult exhaustive_k1(const ClassifierOracle& oracle, const Sentence& s,
                               Label y, const Alphabet& alphabet) {
  const auto neighbors = generate_neighbors(s, alphabet);
  std::vector<Sentence> batch;
  batch.reserve(neighbors.size());
  for (const auto& n : neighbors) batch.push_back(n.sentence);
  const auto losses = losses_of(oracle, batch, y);
  const std::size_t best = first_argmax(losses);
  return {batch[best], losses[best], batch.size()};
}

}  // namespace charmer
