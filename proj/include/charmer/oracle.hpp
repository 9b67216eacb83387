#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "charmer/sentence.hpp"

namespace charmer {

class BuiltinClassifier;

/// Per-class scores returned by a classifier: logits or probabilities,
/// whatever the model emits. At least two classes, all finite.
class ClassScores {
 public:
  ClassScores() = default;
  /// Throws std::invalid_argument for fewer than two classes or non-finite
  /// values.
  explicit ClassScores(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t num_classes() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  /// Lowest index among the maxima.
  std::size_t argmax() const noexcept;

  friend bool operator==(const ClassScores&, const ClassScores&) = default;

 private:
  std::vector<double> values_;
};

/// Zero-based class index.
struct Label {
  std::size_t index = 0;
  friend bool operator==(Label, Label) = default;
};

/// Margin loss: best competing score minus the true-class score. Unclipped.
/// Throws std::out_of_range for a label outside the score vector.
double cw_loss(const ClassScores& scores, Label y);

/// True when the loss is non-negative; a tie with the true class counts as
/// a misclassification.
bool is_adversarial(const ClassScores& scores, Label y);

enum class OracleKind { Builtin, Remote };

/// Batched scoring contract. score_batch() splits oversized batches into
/// chunks of at most batch_limit() sentences and preserves order.
class ClassifierOracle {
 public:
  virtual ~ClassifierOracle() = default;

  virtual OracleKind kind() const noexcept = 0;
  virtual std::size_t num_classes() const noexcept = 0;
  virtual std::size_t batch_limit() const noexcept = 0;

  /// Non-null only for oracles that can differentiate through a feature
  /// mixture.
  virtual const BuiltinClassifier* differentiable_model() const noexcept {
    return nullptr;
  }

  std::vector<ClassScores> score_batch(std::span<const Sentence> sentences) const;

  ClassScores score(const Sentence& s) const;

 protected:
  /// Scores at most batch_limit() sentences.
  virtual std::vector<ClassScores> score_chunk(
      std::span<const Sentence> sentences) const = 0;

  /// Scores pre-split chunks; sequential by default.
  virtual std::vector<std::vector<ClassScores>> score_chunks(
      std::span<const std::span<const Sentence>> chunks) const;
};

}  // namespace charmer
