#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "charmer/dataset.hpp"
#include "charmer/error.hpp"
#include "charmer/pga.hpp"
#include "charmer/random.hpp"
#include "charmer/sentence_space.hpp"
#include "reference/reference.hpp"
#include "scripted_oracle.hpp"

namespace charmer {
namespace {

Sentence S(const char* text) { return Sentence::from_utf8(text); }

void expect_near(const std::vector<double>& got, const std::vector<double>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12) << i;
}

const BuiltinClassifier& keyword_model() {
  static const BuiltinClassifier model = [] {
    const auto corpus = keyword_corpus(300, 5);
    return train_builtin(to_training_examples(corpus), 2);
  }();
  return model;
}

TEST(ProjectSimplex, Examples) {
  expect_near(project_simplex(std::vector<double>{0.5, 0.5}), {0.5, 0.5});
  expect_near(project_simplex(std::vector<double>{2.0, 0.0}), {1.0, 0.0});
  expect_near(project_simplex(std::vector<double>{0.8, 0.6}), {0.6, 0.4});
  expect_near(project_simplex(std::vector<double>{-3.0}), {1.0});
}

TEST(ProjectSimplex, MatchesActiveSetReference) {
  Rng rng(3);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 12);
    for (auto& x : v) x = gauss(rng);
    const auto got = project_simplex(v);
    const auto want = reference::project_simplex_active_set(v);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
    EXPECT_NEAR(std::accumulate(got.begin(), got.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(ProjectSimplex, RejectsBadInput) {
  EXPECT_THROW(project_simplex(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(project_simplex(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
}

TEST(PgaCandidates, StartWithTheSentenceAndStayInsideTheBall) {
  PgaConfig config;
  config.k = 2;
  config.candidate_cap = 300;
  const auto s = S("a good film");
  const Alphabet gamma(U"adfgilmno ");
  const auto cands = pga_candidates(s, gamma, config);
  ASSERT_FALSE(cands.empty());
  EXPECT_EQ(cands.front(), s);
  EXPECT_LE(cands.size(), config.candidate_cap);
  std::set<Sentence> unique(cands.begin(), cands.end());
  EXPECT_EQ(unique.size(), cands.size());
  for (const auto& c : cands) EXPECT_LE(levenshtein(s, c), config.k);
}

TEST(PgaCandidates, SmallBallsAreComplete) {
  PgaConfig config;
  config.k = 2;
  const auto cands = pga_candidates(S("ab"), Alphabet(U"ab"), config);
  const auto ball = reference::ball(U"ab", U"ab", 2);
  std::set<std::u32string> got;
  for (const auto& c : cands) got.insert(c.str());
  EXPECT_EQ(got, ball);
}

TEST(PgaAttack, SingleCandidateKeepsFullWeight) {
  PgaConfig config;
  config.k = 1;
  // The empty sentence over a one-letter alphabet has neighbours "" and "a";
  // cap the list to the sentence alone.
  config.candidate_cap = 1;
  const auto r = pga_attack(keyword_model(), S(""), Label{1}, Alphabet(U"a"), config);
  ASSERT_EQ(r.state.candidates.size(), 1u);
  expect_near(r.state.u, {1.0});
  EXPECT_EQ(r.outcome.adversarial, S(""));
  EXPECT_DOUBLE_EQ(r.mixture_loss, r.best_vertex_loss);
}

TEST(PgaAttack, ConstantClassifierStaysUniform) {
  const BuiltinClassifier flat({1, 2, 3}, 1u << 10, 2);
  PgaConfig config;
  config.k = 1;
  const auto s = S("ab");
  const auto r = pga_attack(flat, s, Label{0}, Alphabet(U"ab"), config);
  const double w = 1.0 / static_cast<double>(r.state.u.size());
  for (double x : r.state.u) EXPECT_NEAR(x, w, 1e-12);
  EXPECT_EQ(r.outcome.adversarial, s);
  EXPECT_TRUE(r.outcome.success);  // all classes tie
}

TEST(PgaAttack, BinaryModelConvergesToTheBestVertex) {
  // With two classes the mixture loss is linear in u, so ascent ends on the
  // best candidate.
  PgaConfig config;
  config.k = 1;
  config.iterations = 400;
  config.step_size = 1.0;
  const auto s = S("so great");
  const auto gamma = Alphabet(U"aegorst ");
  const auto r = pga_attack(keyword_model(), s, Label{1}, gamma, config);
  EXPECT_NEAR(r.mixture_loss, r.best_vertex_loss, 1e-9);
  EXPECT_NEAR(r.outcome.final_loss, r.best_vertex_loss, 1e-9);

  // The candidate list is the whole ball, so the best vertex is the
  // exhaustive optimum.
  const BuiltinOracle oracle(std::make_shared<const BuiltinClassifier>(keyword_model()));
  const auto exhaustive = exhaustive_k1(oracle, s, Label{1}, gamma);
  EXPECT_NEAR(r.best_vertex_loss, exhaustive.loss, 1e-9);
  EXPECT_LE(levenshtein(s, r.outcome.adversarial), 1u);
}

TEST(PgaAttack, MixtureNeverBeatsTheBestVertex) {
  const BuiltinClassifier model(
      {1}, 8, 3, [] {
        std::vector<double> w(24);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(1.7 * static_cast<double>(i));
        return w;
      }(),
      {0.1, -0.2, 0.05});
  PgaConfig config;
  config.k = 2;
  for (const char* text : {"ab", "ba", "abc", "c"}) {
    const auto r = pga_attack(model, S(text), Label{0}, Alphabet(U"abc"), config);
    EXPECT_LE(r.mixture_loss, r.best_vertex_loss + 1e-9) << text;
    EXPECT_LE(r.outcome.edits_used, config.k);
  }
}

TEST(PgaAttack, NeedsAModel) {
  auto oracle = testing::constant_oracle();
  EXPECT_THROW(pga_attack(oracle, S("ab"), Label{1}, Alphabet(U"ab"), PgaConfig{}),
               GradientUnavailable);
}

}  // namespace
}  // namespace charmer
