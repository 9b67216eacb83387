#include "charmer/pga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_set>

#include "charmer/error.hpp"
#include "charmer/random.hpp"
#include "charmer/sentence_space.hpp"

namespace charmer {

double simplex_threshold(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("cannot project an empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("projection input is not finite");
  }
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  double prefix = 0.0;
  double lambda = sorted[0] - 1.0;  // rho = 1 always qualifies
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    const double candidate = (prefix - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) lambda = candidate;
  }
  return lambda;
}

std::vector<double> project_simplex(std::span<const double> v) {
  const double lambda = simplex_threshold(v);
  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = std::max(v[i] - lambda, 0.0);
  return u;
}

namespace {

std::vector<Sentence> subsample(std::vector<Sentence> pool, std::size_t keep,
                                Rng& rng) {
  if (pool.size() <= keep) return pool;
  std::vector<Sentence> out;
  out.reserve(keep);
  for (auto idx : sample_without_replacement(rng, pool.size(), keep)) {
    out.push_back(std::move(pool[idx]));
  }
  return out;
}

Sentence random_walk(const Sentence& s, const Alphabet& alphabet, std::size_t steps,
                     Rng& rng) {
  Sentence cur = s;
  const std::size_t choices = alphabet.size() + 1;
  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t slot = 1 + uniform_below(rng, cur.expanded_size());
    const std::size_t pick = uniform_below(rng, choices);
    const char32_t c = pick < alphabet.size() ? alphabet.chars()[pick] : kSpecialChar;
    if (slot % 2 == 1 && c != kSpecialChar && cur.size() >= kMaxSentenceLength) continue;
    cur = single_edit(cur, slot, c);
  }
  return cur;
}

}  // namespace

std::vector<Sentence> pga_candidates(const Sentence& s, const Alphabet& alphabet,
                                     const PgaConfig& config) {
  if (config.k < 1) throw std::invalid_argument("PGA needs k >= 1");
  if (config.candidate_cap < 1) throw std::invalid_argument("candidate cap must be >= 1");
  Rng rng(config.seed);

  std::vector<Sentence> ball;
  bool exact = true;
  try {
    ball = enumerate_ball(s, alphabet, config.k, config.enumeration_budget);
  } catch (const BudgetExceeded&) {
    exact = false;
  }

  if (exact) {
    if (ball.size() <= config.candidate_cap) return ball;
    std::vector<Sentence> rest(std::make_move_iterator(ball.begin() + 1),
                               std::make_move_iterator(ball.end()));
    std::vector<Sentence> out{s};
    for (auto& c : subsample(std::move(rest), config.candidate_cap - 1, rng)) {
      out.push_back(std::move(c));
    }
    return out;
  }

  std::vector<Sentence> out{s};
  std::unordered_set<Sentence> seen{s};
  std::vector<Sentence> ring;
  for (auto& n : generate_neighbors(s, alphabet)) {
    if (n.sentence != s) ring.push_back(std::move(n.sentence));
  }
  const std::size_t ring_share = std::max<std::size_t>(1, config.candidate_cap / 2);
  for (auto& c : subsample(std::move(ring), ring_share, rng)) {
    if (out.size() >= config.candidate_cap) break;
    seen.insert(c);
    out.push_back(std::move(c));
  }
  const std::size_t max_attempts = 20 * config.candidate_cap;
  for (std::size_t attempt = 0;
       attempt < max_attempts && out.size() < config.candidate_cap; ++attempt) {
    const std::size_t steps = 2 + uniform_below(rng, config.k - 1);
    Sentence walked = random_walk(s, alphabet, steps, rng);
    if (seen.insert(walked).second) out.push_back(std::move(walked));
  }
  return out;
}

MixtureState make_mixture(const BuiltinClassifier& model,
                          std::vector<Sentence> candidates) {
  if (candidates.empty()) throw std::invalid_argument("mixture needs candidates");
  MixtureState state;
  state.features.dim = model.feature_dim();
  state.features.rows.reserve(candidates.size());
  for (const auto& c : candidates) state.features.rows.push_back(model.features(c));
  state.u.assign(candidates.size(), 1.0 / static_cast<double>(candidates.size()));
  state.candidates = std::move(candidates);
  return state;
}

PgaResult pga_attack(const BuiltinClassifier& model, const Sentence& s, Label y,
                     const Alphabet& alphabet, const PgaConfig& config) {
  if (!(config.step_size > 0.0)) throw std::invalid_argument("step size must be positive");
  if (config.iterations < 1) throw std::invalid_argument("PGA needs iterations >= 1");
  const auto start = std::chrono::steady_clock::now();

  PgaResult result;
  result.state = make_mixture(model, pga_candidates(s, alphabet, config));
  auto& state = result.state;
  const MixtureObjective objective(model, state.features);

  std::vector<double> stepped(state.u.size());
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const auto eval = objective.evaluate(state.u, y);
    for (std::size_t i = 0; i < stepped.size(); ++i) {
      stepped[i] = state.u[i] + config.step_size * eval.grad[i];
    }
    state.u = project_simplex(stepped);
  }
  result.mixture_loss = objective.evaluate(state.u, y).loss;
  result.best_vertex_loss = objective.candidate_loss(0, y);
  for (std::size_t i = 1; i < state.candidates.size(); ++i) {
    result.best_vertex_loss = std::max(result.best_vertex_loss, objective.candidate_loss(i, y));
  }

  const std::size_t pick = first_argmax(state.u);
  auto& out = result.outcome;
  out.original = s;
  out.adversarial = state.candidates[pick];
  const auto scores = model.logits(out.adversarial);
  out.queries = 1;
  out.final_loss = cw_loss(scores, y);
  out.success = is_adversarial(scores, y);
  out.edits_used = levenshtein(s, out.adversarial);
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

PgaResult pga_attack(const ClassifierOracle& oracle, const Sentence& s, Label y,
                     const Alphabet& alphabet, const PgaConfig& config) {
  const BuiltinClassifier* model = oracle.differentiable_model();
  if (model == nullptr) {
    throw GradientUnavailable("PGA needs gradients; the oracle only returns scores");
  }
  return pga_attack(*model, s, y, alphabet, config);
}

}  // namespace charmer
