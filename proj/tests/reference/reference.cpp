#include "reference.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

namespace charmer::reference {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> memo((a.size() + 1) * (b.size() + 1), kUnset);
  std::function<std::size_t(std::size_t, std::size_t)> lev = [&](std::size_t i,
                                                                 std::size_t j) {
    // Distance between the suffixes a[i..] and b[j..].
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    std::size_t& slot = memo[i * (b.size() + 1) + j];
    if (slot != kUnset) return slot;
    if (a[i] == b[j]) {
      slot = lev(i + 1, j + 1);
    } else {
      slot = 1 + std::min({lev(i + 1, j), lev(i, j + 1), lev(i + 1, j + 1)});
    }
    return slot;
  };
  return lev(0, 0);
}

std::set<std::u32string> ball(std::u32string_view s, std::u32string_view alphabet,
                              std::size_t k) {
  std::set<std::u32string> out;
  const std::size_t min_len = s.size() > k ? s.size() - k : 0;
  const std::size_t max_len = s.size() + k;
  std::u32string word;
  std::function<void()> extend = [&] {
    if (word.size() >= min_len && levenshtein(s, word) <= k) out.insert(word);
    if (word.size() == max_len) return;
    for (char32_t c : alphabet) {
      word.push_back(c);
      extend();
      word.pop_back();
    }
  };
  extend();
  return out;
}

std::vector<double> project_simplex_active_set(const std::vector<double>& v) {
  const std::size_t m = v.size();
  if (m == 0 || m > 20) throw std::invalid_argument("active-set oracle needs 1..20 entries");
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) {
        sum += v[i];
        ++count;
      }
    }
    // Stationary point of the equality-constrained problem on this support.
    const double shift = (sum - 1.0) / static_cast<double>(count);
    std::vector<double> u(m, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(mask >> i & 1)) continue;
      u[i] = v[i] - shift;
      if (u[i] < 0.0) feasible = false;
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < m; ++i) dist += (u[i] - v[i]) * (u[i] - v[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = std::move(u);
    }
  }
  return best;
}

std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& u, double h) {
  std::vector<double> grad(u.size());
  std::vector<double> probe = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    probe[i] = u[i] + h;
    const double up = f(probe);
    probe[i] = u[i] - h;
    const double down = f(probe);
    probe[i] = u[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

namespace {

bool blank(char32_t c) { return c == U' '; }
bool lower_english(char32_t c) { return c >= U'a' && c <= U'z'; }

struct Span {
  std::size_t begin, end;
};

std::vector<Span> words_of(std::u32string_view text) {
  std::vector<Span> out;
  for (std::size_t j = 0; j < text.size();) {
    if (blank(text[j])) {
      ++j;
      continue;
    }
    const std::size_t b = j;
    while (j < text.size() && !blank(text[j])) ++j;
    out.push_back({b, j});
  }
  return out;
}

// One way of turning `before` into `after` with a single edit. `map[j]` is
// the index in `after` of kept character j, or nullopt when it was removed
// or overwritten. `fresh` is the index of the new character, if any.
struct Explanation {
  std::vector<std::optional<std::size_t>> map;
  std::optional<std::size_t> fresh;
  std::optional<char32_t> removed;
};

std::vector<Explanation> explain(std::u32string_view before, std::u32string_view after) {
  const std::size_t n = before.size();
  std::size_t p = 0;
  while (p < n && p < after.size() && before[p] == after[p]) ++p;
  std::size_t q = 0;
  while (q < n && q < after.size() && before[n - 1 - q] == after[after.size() - 1 - q]) ++q;

  std::vector<Explanation> out;
  if (after.size() + 1 == n) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j > p || n - 1 - j > q) continue;
      Explanation e;
      e.removed = before[j];
      for (std::size_t r = 0; r < n; ++r) {
        if (r < j) e.map.emplace_back(r);
        else if (r == j) e.map.emplace_back(std::nullopt);
        else e.map.emplace_back(r - 1);
      }
      out.push_back(std::move(e));
    }
  } else if (after.size() == n + 1) {
    for (std::size_t g = 0; g <= n; ++g) {
      if (g > p || n - g > q) continue;
      Explanation e;
      e.fresh = g;
      for (std::size_t r = 0; r < n; ++r) e.map.emplace_back(r < g ? r : r + 1);
      out.push_back(std::move(e));
    }
  } else if (after.size() == n && p < n && p + q + 1 == n) {
    Explanation e;
    e.fresh = p;
    e.removed = before[p];
    for (std::size_t r = 0; r < n; ++r) {
      if (r == p) e.map.emplace_back(std::nullopt);
      else e.map.emplace_back(r);
    }
    out.push_back(std::move(e));
  }
  return out;
}

bool starts_word(std::u32string_view text, std::size_t j) {
  return j == 0 || blank(text[j - 1]);
}
bool ends_word(std::u32string_view text, std::size_t j) {
  return j + 1 == text.size() || blank(text[j + 1]);
}

struct Judgement {
  std::vector<std::size_t> touched;  // word indices in `before`
  bool creates_word = false;
  bool first_lost = false;
  bool last_lost = false;
  bool short_word = false;
  bool non_lower = false;
};

Judgement judge(std::u32string_view before, std::u32string_view after,
                const Explanation& e) {
  Judgement out;
  const auto words = words_of(before);
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto [b, end] = words[w];
    bool intact = true;
    for (std::size_t j = b; j < end && intact; ++j) {
      if (!e.map[j]) intact = false;
      else if (j > b && *e.map[j] != *e.map[j - 1] + 1) intact = false;
    }
    const bool first_kept = e.map[b] && starts_word(after, *e.map[b]);
    const bool last_kept = e.map[end - 1] && ends_word(after, *e.map[end - 1]);
    if (intact && first_kept && last_kept) continue;
    out.touched.push_back(w);
    if (!first_kept) out.first_lost = true;
    if (!last_kept) out.last_lost = true;
    if (end - b < 4) out.short_word = true;
  }
  if (e.fresh && !blank(after[*e.fresh]) && starts_word(after, *e.fresh) &&
      ends_word(after, *e.fresh)) {
    out.creates_word = true;
  }
  if (e.removed && !lower_english(*e.removed)) out.non_lower = true;
  if (e.fresh && !lower_english(after[*e.fresh])) out.non_lower = true;
  return out;
}

bool violates(const Judgement& j, PjcConstraints c, const std::vector<bool>& dirty,
              std::u32string_view before) {
  if (c.has(PjcFlag::LowEng) && j.non_lower) return true;
  const bool shape = c.has(PjcFlag::Length) || c.has(PjcFlag::First) || c.has(PjcFlag::Last);
  if (shape && j.creates_word) return true;
  if (c.has(PjcFlag::Length) && j.short_word) return true;
  if (c.has(PjcFlag::First) && j.first_lost) return true;
  if (c.has(PjcFlag::Last) && j.last_lost) return true;
  if (c.has(PjcFlag::Repeat)) {
    const auto words = words_of(before);
    for (auto w : j.touched) {
      for (std::size_t k = words[w].begin; k < words[w].end; ++k) {
        if (dirty[k]) return true;
      }
    }
  }
  return false;
}

}  // namespace

PjcAuditor::PjcAuditor(const Sentence& original, PjcConstraints constraints)
    : constraints_(constraints),
      current_(original.chars()),
      dirty_(original.size(), false) {}

bool PjcAuditor::allowed(const Sentence& candidate) const {
  if (candidate.chars() == current_) return true;
  for (const auto& e : explain(current_, candidate.chars())) {
    if (!violates(judge(current_, candidate.chars(), e), constraints_, dirty_, current_)) {
      return true;
    }
  }
  return false;
}

bool PjcAuditor::audit(const Sentence& candidate) {
  ++checked_;
  return !allowed(candidate);
}

void PjcAuditor::advance_to(const Sentence& next) {
  const std::u32string_view after = next.chars();
  if (after == current_) return;
  const auto options = explain(current_, after);
  if (options.empty()) throw std::logic_error("auditor: sentences are not one edit apart");
  // Prefer an explanation that respects the constraints; any will do
  // otherwise, the violation was already reported.
  const Explanation* pick = &options.front();
  for (const auto& e : options) {
    if (!violates(judge(current_, after, e), constraints_, dirty_, current_)) {
      pick = &e;
      break;
    }
  }
  const auto j = judge(current_, after, *pick);
  const auto words = words_of(current_);

  std::vector<bool> next_dirty(after.size(), false);
  for (std::size_t k = 0; k < current_.size(); ++k) {
    if (pick->map[k] && dirty_[k]) next_dirty[*pick->map[k]] = true;
  }
  for (auto w : j.touched) {
    for (std::size_t k = words[w].begin; k < words[w].end; ++k) {
      if (pick->map[k]) next_dirty[*pick->map[k]] = true;
    }
  }
  if (pick->fresh) next_dirty[*pick->fresh] = true;
  for (const auto& w : words_of(after)) {
    bool any = false;
    for (std::size_t k = w.begin; k < w.end; ++k) any = any || next_dirty[k];
    if (any) {
      for (std::size_t k = w.begin; k < w.end; ++k) next_dirty[k] = true;
    }
  }
  for (std::size_t k = 0; k < after.size(); ++k) {
    if (blank(after[k])) next_dirty[k] = false;
  }
  current_ = std::u32string(after);
  dirty_ = std::move(next_dirty);
}

}  // namespace charmer::reference
