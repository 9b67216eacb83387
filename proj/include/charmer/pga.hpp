#pragma once

// Relaxed attack: instead of picking one sentence from the edit ball, put
// convex weights on a list of candidates, mix their feature vectors, and run
// projected gradient ascent on the margin loss of the mixture. The final
// sentence is the candidate carrying the largest weight.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "charmer/attack.hpp"
#include "charmer/builtin_classifier.hpp"
#include "charmer/sentence.hpp"

namespace charmer {

/// Euclidean projection onto {u : u >= 0, sum(u) = 1}. Sorts descending and
/// takes the largest prefix whose shifted entries stay positive:
///   rho = max{ j : v_(j) - (sum_{r<=j} v_(r) - 1) / j > 0 },
///   lambda = (sum_{r<=rho} v_(r) - 1) / rho,   u_i = max(v_i - lambda, 0).
/// Throws std::invalid_argument for empty or non-finite input.
std::vector<double> project_simplex(std::span<const double> v);

/// The threshold lambda used by project_simplex, exposed for KKT checks.
double simplex_threshold(std::span<const double> v);

struct PgaConfig {
  double step_size = 0.1;
  std::size_t iterations = 200;
  /// Edit radius of the candidate ball.
  std::size_t k = 2;
  /// Largest candidate list; bigger balls are subsampled with `seed`.
  std::size_t candidate_cap = 4096;
  /// Balls up to this size are enumerated exactly before subsampling.
  std::size_t enumeration_budget = 50'000;
  std::uint64_t seed = 0;
};

/// Candidates, their feature rows and the simplex weights.
struct MixtureState {
  std::vector<Sentence> candidates;
  FeatureMatrix features;
  std::vector<double> u;
};

/// Deduplicated candidate list from the radius-k ball around s, always
/// starting with s itself. When the ball holds more than `candidate_cap`
/// members (or more than `enumeration_budget`, in which case it is never
/// materialised) the list is a seeded sample: the exact distance-one
/// neighbourhood first (itself subsampled if needed), then random walks of
/// 2..k edits. Every member lies within distance k of s.
std::vector<Sentence> pga_candidates(const Sentence& s, const Alphabet& alphabet,
                                     const PgaConfig& config);

/// Uniform weights over the candidates, with their feature rows.
MixtureState make_mixture(const BuiltinClassifier& model,
                          std::vector<Sentence> candidates);

struct PgaResult {
  AttackOutcome outcome;
  MixtureState state;
  /// Mixture loss at the final weights.
  double mixture_loss = 0.0;
  /// Best single-candidate loss over the same list.
  double best_vertex_loss = 0.0;
};

/// Throws GradientUnavailable when the oracle has no differentiable model.
PgaResult pga_attack(const ClassifierOracle& oracle, const Sentence& s, Label y,
                     const Alphabet& alphabet, const PgaConfig& config);

PgaResult pga_attack(const BuiltinClassifier& model, const Sentence& s, Label y,
                     const Alphabet& alphabet, const PgaConfig& config);

}  // namespace charmer
