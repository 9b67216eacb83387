#pragma once

// Linear classifier over hashed character n-gram counts. Small enough to
// train in a unit test, differentiable with respect to convex mixtures of
// feature vectors, and persisted in a fixed little-endian binary format:
//
//   "CHNG" | u32 version | u32 order_count | u32 orders[order_count]
//   | u32 feature_dim | u32 num_classes
//   | f64 weights[num_classes * feature_dim] (row-major by class)
//   | f64 bias[num_classes]

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "charmer/oracle.hpp"
#include "charmer/sentence.hpp"

namespace charmer {

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::uint32_t kDefaultFeatureDim = 1u << 16;

/// Sparse non-negative feature vector, sorted by index, unique indices.
struct SparseFeatures {
  std::vector<std::pair<std::uint32_t, double>> entries;
};

/// Candidate feature rows, all living in the same `dim`-wide space.
struct FeatureMatrix {
  std::uint32_t dim = 0;
  std::vector<SparseFeatures> rows;
};

/// Hashed character n-gram counts. The sentence is framed by a begin marker
/// (U+0002) and an end marker (U+0003); each n-gram hashes with FNV-1a over
/// its order followed by its code points as little-endian u32.
SparseFeatures ngram_features(const Sentence& s,
                              std::span<const std::uint32_t> orders,
                              std::uint32_t dim);

struct TrainingExample {
  Sentence text;
  Label label;
};

struct TrainingConfig {
  std::vector<std::uint32_t> ngram_orders{1, 2, 3};
  std::uint32_t feature_dim = kDefaultFeatureDim;
  std::size_t epochs = 30;
  double learning_rate = 0.05;
  double l2 = 1e-5;
  std::uint64_t seed = 0;
};

class BuiltinClassifier {
 public:
  /// Zero weights: every class scores its bias.
  BuiltinClassifier(std::vector<std::uint32_t> ngram_orders,
                    std::uint32_t feature_dim, std::size_t num_classes);

  BuiltinClassifier(std::vector<std::uint32_t> ngram_orders,
                    std::uint32_t feature_dim, std::size_t num_classes,
                    std::vector<double> weights, std::vector<double> bias);

  std::span<const std::uint32_t> ngram_orders() const noexcept { return orders_; }
  std::uint32_t feature_dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return classes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> bias() const noexcept { return bias_; }

  SparseFeatures features(const Sentence& s) const {
    return ngram_features(s, orders_, dim_);
  }

  /// W x + b.
  ClassScores logits(const SparseFeatures& x) const;
  ClassScores logits(const Sentence& s) const { return logits(features(s)); }

  /// W x without the bias, one value per class.
  std::vector<double> project(const SparseFeatures& x) const;

  Label predict(const Sentence& s) const { return {logits(s).argmax()}; }

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static BuiltinClassifier load(std::istream& in);
  static BuiltinClassifier load(const std::filesystem::path& path);

  friend bool operator==(const BuiltinClassifier&,
                         const BuiltinClassifier&) = default;

 private:
  friend BuiltinClassifier train_builtin(std::span<const TrainingExample>,
                                         std::size_t, const TrainingConfig&);

  std::vector<std::uint32_t> orders_;
  std::uint32_t dim_;
  std::size_t classes_;
  std::vector<double> weights_;  // classes_ x dim_, row-major
  std::vector<double> bias_;
};

/// Multinomial logistic regression trained by per-example gradient descent
/// on cross-entropy. The visiting order of each epoch is shuffled with the
/// configured seed, so equal inputs give bitwise-equal weights. Throws
/// std::invalid_argument on an empty dataset, fewer than two classes, or a
/// label outside [0, num_classes).
BuiltinClassifier train_builtin(std::span<const TrainingExample> dataset,
                                std::size_t num_classes,
                                const TrainingConfig& config = {});

/// Fraction of examples whose predicted label matches.
double accuracy(const BuiltinClassifier& model,
                std::span<const TrainingExample> dataset);

struct MixtureEvaluation {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Margin loss of the classifier applied to a convex mixture of feature
/// rows. Because the model is linear, the per-row projections are computed
/// once and every evaluation is O(m * classes).
class MixtureObjective {
 public:
  /// Throws DimensionMismatch when a row does not live in the model's
  /// feature space, std::invalid_argument for an empty matrix.
  MixtureObjective(const BuiltinClassifier& model, const FeatureMatrix& features);

  std::size_t size() const noexcept { return projections_.size(); }

  /// Loss at u and its gradient with respect to u. The gradient follows the
  /// competing class with the highest mixed score (lowest index on ties).
  MixtureEvaluation evaluate(std::span<const double> u, Label y) const;

  /// Loss of candidate i alone (one-hot u).
  double candidate_loss(std::size_t i, Label y) const;

 private:
  std::size_t classes_;
  std::vector<double> bias_;
  std::vector<std::vector<double>> projections_;
};

/// One-shot form of MixtureObjective. Throws DimensionMismatch when u and
/// the matrix disagree, std::invalid_argument when u is off the simplex by
/// more than 1e-8.
MixtureEvaluation mixture_loss_and_grad(const BuiltinClassifier& model,
                                        const FeatureMatrix& features,
                                        std::span<const double> u, Label y);

/// Scores sentences locally with a shared, immutable classifier.
class BuiltinOracle final : public ClassifierOracle {
 public:
  explicit BuiltinOracle(std::shared_ptr<const BuiltinClassifier> model,
                         std::size_t batch_limit = 4096);

  OracleKind kind() const noexcept override { return OracleKind::Builtin; }
  std::size_t num_classes() const noexcept override;
  std::size_t batch_limit() const noexcept override { return batch_limit_; }
  const BuiltinClassifier* differentiable_model() const noexcept override {
    return model_.get();
  }

  const BuiltinClassifier& model() const noexcept { return *model_; }

 protected:
  std::vector<ClassScores> score_chunk(
      std::span<const Sentence> sentences) const override;

 private:
  std::shared_ptr<const BuiltinClassifier> model_;
  std::size_t batch_limit_;
};

}  // namespace charmer
