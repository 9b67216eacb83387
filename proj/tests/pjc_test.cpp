#include <gtest/gtest.h>

#include "charmer/attack.hpp"
#include "charmer/pjc.hpp"
#include "charmer/random.hpp"
#include "charmer/sentence_space.hpp"
#include "reference/reference.hpp"

namespace charmer {
namespace {

Sentence S(const char* text) { return Sentence::from_utf8(text); }

PjcConstraints only(PjcFlag f) { return PjcConstraints().enable(f); }

TEST(PjcConstraints, ParseAndPrint) {
  EXPECT_EQ(PjcConstraints::parse("").to_string(), "none");
  EXPECT_EQ(PjcConstraints::parse("none").to_string(), "none");
  EXPECT_EQ(PjcConstraints::parse("loweng,first").to_string(), "first,loweng");
  EXPECT_EQ(PjcConstraints::parse("repeat,first,last,length,loweng"), PjcConstraints::all());
  EXPECT_THROW(PjcConstraints::parse("first,typo"), std::invalid_argument);
}

TEST(SplitWords, RunsOfNonBlanks) {
  EXPECT_EQ(split_words(U"  ab c  "), (std::vector<WordSpan>{{2, 4}, {5, 6}}));
  EXPECT_TRUE(split_words(U"   ").empty());
}

TEST(EditAllowed, LowEng) {
  const auto s = S("word");
  const auto h = EditHistory(s);
  EXPECT_FALSE(edit_allowed(s, 3, U'É', only(PjcFlag::LowEng), h));
  EXPECT_FALSE(edit_allowed(s, 3, U'Q', only(PjcFlag::LowEng), h));
  EXPECT_TRUE(edit_allowed(s, 3, U'q', only(PjcFlag::LowEng), h));
  EXPECT_TRUE(edit_allowed(s, 4, kSpecialChar, only(PjcFlag::LowEng), h));
  const auto accented = S("café");
  EXPECT_FALSE(edit_allowed(accented, 8, kSpecialChar, only(PjcFlag::LowEng),
                            EditHistory(accented)));
}

TEST(EditAllowed, Length) {
  const auto s = S("hi there");
  const auto h = EditHistory(s);
  const auto c = only(PjcFlag::Length);
  EXPECT_FALSE(edit_allowed(s, 2, U'x', c, h));
  EXPECT_FALSE(edit_allowed(s, 5, U'x', c, h));  // against the end of "hi"
  EXPECT_FALSE(edit_allowed(s, 6, kSpecialChar, c, h));  // merges the words
  EXPECT_TRUE(edit_allowed(s, 10, U'x', c, h));
  EXPECT_TRUE(edit_allowed(s, 2, U'h', c, h));  // identity
}

TEST(EditAllowed, FirstAndLastZones) {
  const auto s = S("hello");
  const auto h = EditHistory(s);
  const auto first = only(PjcFlag::First);
  const auto last = only(PjcFlag::Last);
  EXPECT_FALSE(edit_allowed(s, 1, U'x', first, h));
  EXPECT_FALSE(edit_allowed(s, 2, U'x', first, h));
  EXPECT_TRUE(edit_allowed(s, 3, U'x', first, h));
  EXPECT_TRUE(edit_allowed(s, 1, U'x', last, h));
  EXPECT_FALSE(edit_allowed(s, 10, U'x', last, h));
  EXPECT_FALSE(edit_allowed(s, 11, U'x', last, h));
  EXPECT_TRUE(edit_allowed(s, 9, U'x', last, h));
}

TEST(EditAllowed, Repeat) {
  const auto s = S("alpha beta");
  const auto c = only(PjcFlag::Repeat);
  const auto h0 = EditHistory(s);
  EXPECT_TRUE(edit_allowed(s, 4, U'x', c, h0));
  const auto s1 = single_edit(s, 4, U'x');
  const auto h1 = h0.advance(s, 4, U'x');
  EXPECT_TRUE(h1.word_edited({0, 5}));
  EXPECT_FALSE(h1.word_edited({6, 10}));
  EXPECT_FALSE(edit_allowed(s1, 6, U'y', c, h1));
  EXPECT_TRUE(edit_allowed(s1, 14, U'y', c, h1));
  // Deleting the separating space would reach the edited word.
  EXPECT_FALSE(edit_allowed(s1, 12, kSpecialChar, c, h1));
}

TEST(PjcAuditor, FlagsUnconstrainedCandidates) {
  const auto s = S("hi there");
  reference::PjcAuditor auditor(s, PjcConstraints::all());
  const std::vector<std::size_t> all{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17};
  const auto free = build_candidates(s, all, Alphabet(U"ehirtxÉ "), {}, EditHistory(s));
  std::size_t violations = 0;
  for (const auto& c : free) violations += auditor.audit(c.sentence);
  EXPECT_GT(violations, 0u);
  EXPECT_EQ(auditor.checked(), free.size());
}

TEST(PjcAuditor, AgreesWithTheFilterOverRandomWalks) {
  Rng rng(7);
  const Alphabet gamma(U"abcxyz Éé");
  const char32_t pool[] = {U'a', U'b', U'c', U' ', U' ', U'é', U'x'};
  const PjcConstraints sets[] = {PjcConstraints::all(), only(PjcFlag::Repeat),
                                 only(PjcFlag::First), only(PjcFlag::Last),
                                 only(PjcFlag::Length), only(PjcFlag::LowEng),
                                 PjcConstraints::parse("repeat,length")};
  std::size_t checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    std::u32string text;
    const auto len = 1 + uniform_below(rng, 14);
    for (std::size_t j = 0; j < len; ++j) text.push_back(pool[uniform_below(rng, std::size(pool))]);
    const auto constraints = sets[trial % std::size(sets)];
    Sentence cur(text);
    EditHistory history(cur);
    reference::PjcAuditor auditor(cur, constraints);
    for (int step = 0; step < 4; ++step) {
      std::vector<std::size_t> slots(cur.expanded_size());
      for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i + 1;
      const auto cands = build_candidates(cur, slots, gamma, constraints, history);
      for (const auto& c : cands) {
        ASSERT_FALSE(auditor.audit(c.sentence))
            << "slot " << c.position << " in \"" << cur.to_utf8() << "\" under "
            << constraints.to_string();
      }
      checked += cands.size();
      std::vector<Candidate> changed;
      for (const auto& c : cands) {
        if (c.sentence != cur) changed.push_back(c);
      }
      if (changed.empty()) break;
      const auto& pick = changed[uniform_below(rng, changed.size())];
      history = history.advance(cur, pick.position, pick.replacement);
      cur = pick.sentence;
      auditor.advance_to(cur);
    }
  }
  EXPECT_GT(checked, 1000u);
}

}  // namespace
}  // namespace charmer
