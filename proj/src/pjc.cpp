#include "charmer/pjc.hpp"

#include <optional>
#include <stdexcept>

#include "charmer/sentence_space.hpp"

namespace charmer {

namespace {

constexpr char32_t kBlank = U' ';

bool is_lower_english(char32_t c) { return c >= U'a' && c <= U'z'; }

struct Touch {
  std::size_t word;
  bool first_zone;
  bool last_zone;
};

struct EditFootprint {
  std::vector<Touch> touches;
  bool creates_word = false;
};

// word_of[j] is the index of the word holding character j, npos for blanks.
std::vector<std::size_t> word_index(std::u32string_view text,
                                    const std::vector<WordSpan>& words) {
  std::vector<std::size_t> word_of(text.size(), std::u32string::npos);
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::size_t j = words[w].begin; j < words[w].end; ++j) word_of[j] = w;
  }
  return word_of;
}

EditFootprint footprint(std::u32string_view text, const std::vector<WordSpan>& words,
                        std::size_t i, char32_t c) {
  const auto word_of = word_index(text, words);
  auto word_at = [&](std::ptrdiff_t j) -> std::optional<std::size_t> {
    if (j < 0 || static_cast<std::size_t>(j) >= text.size()) return std::nullopt;
    const auto w = word_of[static_cast<std::size_t>(j)];
    if (w == std::u32string::npos) return std::nullopt;
    return w;
  };

  EditFootprint fp;
  auto touch_left = [&](std::optional<std::size_t> w) {
    if (w) fp.touches.push_back({*w, false, true});
  };
  auto touch_right = [&](std::optional<std::size_t> w) {
    if (w) fp.touches.push_back({*w, true, false});
  };

  if (i % 2 == 0) {
    const auto j = static_cast<std::ptrdiff_t>(i / 2 - 1);
    if (auto w = word_at(j)) {
      const auto& span = words[*w];
      fp.touches.push_back({*w, static_cast<std::size_t>(j) == span.begin,
                            static_cast<std::size_t>(j) + 1 == span.end});
      return fp;
    }
    // Replacing or deleting a blank glues or grows the neighbours.
    const auto left = word_at(j - 1);
    const auto right = word_at(j + 1);
    touch_left(left);
    touch_right(right);
    if (!left && !right && c != kSpecialChar) fp.creates_word = true;
    return fp;
  }

  const auto gap = static_cast<std::ptrdiff_t>((i - 1) / 2);
  const auto left = word_at(gap - 1);
  const auto right = word_at(gap);
  if (left && right) {
    fp.touches.push_back({*left, false, false});
  } else if (c != kBlank) {
    touch_left(left);
    touch_right(right);
    if (!left && !right) fp.creates_word = true;
  }
  return fp;
}

}  // namespace

PjcConstraints PjcConstraints::all() {
  PjcConstraints p;
  p.enable(PjcFlag::Repeat)
      .enable(PjcFlag::First)
      .enable(PjcFlag::Last)
      .enable(PjcFlag::Length)
      .enable(PjcFlag::LowEng);
  return p;
}

PjcConstraints PjcConstraints::parse(std::string_view spec) {
  PjcConstraints p;
  if (spec.empty() || spec == "none") return p;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const auto item =
        spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos);
    if (item == "repeat") p.enable(PjcFlag::Repeat);
    else if (item == "first") p.enable(PjcFlag::First);
    else if (item == "last") p.enable(PjcFlag::Last);
    else if (item == "length") p.enable(PjcFlag::Length);
    else if (item == "loweng") p.enable(PjcFlag::LowEng);
    else if (item == "all") p = all();
    else throw std::invalid_argument("unknown constraint '" + std::string(item) + "'");
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return p;
}

std::string PjcConstraints::to_string() const {
  std::string out;
  auto add = [&](PjcFlag f, const char* name) {
    if (!has(f)) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(PjcFlag::Repeat, "repeat");
  add(PjcFlag::First, "first");
  add(PjcFlag::Last, "last");
  add(PjcFlag::Length, "length");
  add(PjcFlag::LowEng, "loweng");
  return out.empty() ? "none" : out;
}

std::vector<WordSpan> split_words(std::u32string_view text) {
  std::vector<WordSpan> words;
  std::size_t j = 0;
  while (j < text.size()) {
    if (text[j] == kBlank) {
      ++j;
      continue;
    }
    const std::size_t begin = j;
    while (j < text.size() && text[j] != kBlank) ++j;
    words.push_back({begin, j});
  }
  return words;
}

bool EditHistory::word_edited(WordSpan w) const {
  for (std::size_t j = w.begin; j < w.end && j < dirty_.size(); ++j) {
    if (dirty_[j]) return true;
  }
  return false;
}

EditHistory EditHistory::advance(const Sentence& s, std::size_t i, char32_t c) const {
  if (is_identity_edit(s, i, c)) return *this;
  const auto words = split_words(s.chars());
  const auto fp = footprint(s.chars(), words, i, c);

  EditHistory next = *this;
  next.dirty_.resize(s.size(), false);
  for (const auto& t : fp.touches) {
    for (std::size_t j = words[t.word].begin; j < words[t.word].end; ++j) {
      next.dirty_[j] = true;
    }
  }
  if (i % 2 == 1) {
    next.dirty_.insert(next.dirty_.begin() + static_cast<std::ptrdiff_t>((i - 1) / 2),
                       true);
  } else if (c == kSpecialChar) {
    next.dirty_.erase(next.dirty_.begin() + static_cast<std::ptrdiff_t>(i / 2 - 1));
  } else {
    next.dirty_[i / 2 - 1] = true;
  }

  // Words merged or split by the edit inherit the mark as a whole.
  const Sentence edited = single_edit(s, i, c);
  for (const auto& w : split_words(edited.chars())) {
    if (next.word_edited(w)) {
      for (std::size_t j = w.begin; j < w.end; ++j) next.dirty_[j] = true;
    }
  }
  // Blanks never carry a mark.
  for (std::size_t j = 0; j < edited.size(); ++j) {
    if (edited[j] == kBlank) next.dirty_[j] = false;
  }
  return next;
}

bool edit_allowed(const Sentence& s, std::size_t i, char32_t c,
                  PjcConstraints constraints, const EditHistory& history) {
  if (is_identity_edit(s, i, c)) return true;
  if (!constraints.any()) return true;

  if (constraints.has(PjcFlag::LowEng)) {
    if (c != kSpecialChar && !is_lower_english(c)) return false;
    if (i % 2 == 0 && !is_lower_english(s[i / 2 - 1])) return false;
  }

  const auto words = split_words(s.chars());
  const auto fp = footprint(s.chars(), words, i, c);
  if (fp.creates_word &&
      (constraints.has(PjcFlag::Length) || constraints.has(PjcFlag::First) ||
       constraints.has(PjcFlag::Last))) {
    return false;
  }
  for (const auto& t : fp.touches) {
    const auto& w = words[t.word];
    if (constraints.has(PjcFlag::Length) && w.size() < 4) return false;
    if (constraints.has(PjcFlag::First) && t.first_zone) return false;
    if (constraints.has(PjcFlag::Last) && t.last_zone) return false;
    if (constraints.has(PjcFlag::Repeat) && history.word_edited(w)) return false;
  }
  return true;
}

}  // namespace charmer
