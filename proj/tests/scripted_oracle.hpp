#pragma once

#include <functional>
#include <mutex>

#include "charmer/oracle.hpp"

namespace charmer::testing {

/// Scores sentences with a callback and counts every scored sentence.
class ScriptedOracle final : public ClassifierOracle {
 public:
  using Fn = std::function<std::vector<double>(const Sentence&)>;

  explicit ScriptedOracle(Fn fn, std::size_t classes = 2, std::size_t batch_limit = 64)
      : fn_(std::move(fn)), classes_(classes), batch_limit_(batch_limit) {}

  OracleKind kind() const noexcept override { return OracleKind::Builtin; }
  std::size_t num_classes() const noexcept override { return classes_; }
  std::size_t batch_limit() const noexcept override { return batch_limit_; }

  std::size_t scored() const {
    std::lock_guard lock(mutex_);
    return scored_;
  }

 protected:
  std::vector<ClassScores> score_chunk(std::span<const Sentence> sentences) const override {
    std::vector<ClassScores> out;
    for (const auto& s : sentences) out.emplace_back(fn_(s));
    std::lock_guard lock(mutex_);
    scored_ += sentences.size();
    return out;
  }

 private:
  Fn fn_;
  std::size_t classes_;
  std::size_t batch_limit_;
  mutable std::mutex mutex_;
  mutable std::size_t scored_ = 0;
};

/// Every sentence scores [0, 1].
inline ScriptedOracle constant_oracle() {
  return ScriptedOracle([](const Sentence&) { return std::vector<double>{0.0, 1.0}; });
}

/// Class 1 holds while the sentence contains `needle`; the margin shrinks
/// with every character of the needle that is missing from the sentence.
inline ScriptedOracle needle_oracle(std::u32string needle) {
  return ScriptedOracle([needle](const Sentence& s) {
    double present = 0.0;
    for (char32_t c : needle) present += s.chars().find(c) != std::u32string::npos;
    const bool whole = s.chars().find(needle) != std::u32string::npos;
    return std::vector<double>{0.0, whole ? 1.0 + present : present - 100.0};
  });
}

}  // namespace charmer::testing
