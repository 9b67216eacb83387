#include "charmer/builtin_classifier.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "charmer/error.hpp"
#include "charmer/random.hpp"

namespace charmer {

namespace {

constexpr char32_t kBeginMarker = U'\x02';
constexpr char32_t kEndMarker = U'\x03';
constexpr std::array<char, 4> kMagic{'C', 'H', 'N', 'G'};

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline void fnv_mix_u32(std::uint64_t& h, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) {
    h ^= (v >> (8 * b)) & 0xFF;
    h *= kFnvPrime;
  }
}

}  // namespace

SparseFeatures ngram_features(const Sentence& s,
                              std::span<const std::uint32_t> orders,
                              std::uint32_t dim) {
  if (dim == 0) throw std::invalid_argument("feature dimension must be positive");
  std::u32string framed;
  framed.reserve(s.size() + 2);
  framed.push_back(kBeginMarker);
  framed.append(s.chars());
  framed.push_back(kEndMarker);

  std::vector<std::uint32_t> buckets;
  for (std::uint32_t n : orders) {
    if (n == 0 || n > framed.size()) continue;
    for (std::size_t start = 0; start + n <= framed.size(); ++start) {
      std::uint64_t h = kFnvOffset;
      fnv_mix_u32(h, n);
      for (std::size_t j = 0; j < n; ++j) fnv_mix_u32(h, framed[start + j]);
      buckets.push_back(static_cast<std::uint32_t>(h % dim));
    }
  }
  std::sort(buckets.begin(), buckets.end());

  SparseFeatures x;
  for (std::size_t i = 0; i < buckets.size();) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    x.entries.emplace_back(buckets[i], static_cast<double>(j - i));
    i = j;
  }
  return x;
}

BuiltinClassifier::BuiltinClassifier(std::vector<std::uint32_t> ngram_orders,
                                     std::uint32_t feature_dim,
                                     std::size_t num_classes)
    : BuiltinClassifier(std::move(ngram_orders), feature_dim, num_classes,
                        std::vector<double>(num_classes * feature_dim, 0.0),
                        std::vector<double>(num_classes, 0.0)) {}

BuiltinClassifier::BuiltinClassifier(std::vector<std::uint32_t> ngram_orders,
                                     std::uint32_t feature_dim,
                                     std::size_t num_classes,
                                     std::vector<double> weights,
                                     std::vector<double> bias)
    : orders_(std::move(ngram_orders)),
      dim_(feature_dim),
      classes_(num_classes),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (dim_ == 0) throw std::invalid_argument("feature dimension must be positive");
  if (classes_ < 2) throw std::invalid_argument("need at least two classes");
  if (weights_.size() != classes_ * dim_ || bias_.size() != classes_) {
    throw DimensionMismatch("weight/bias sizes do not match classes x dim");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(weights_.begin(), weights_.end(), finite) ||
      !std::all_of(bias_.begin(), bias_.end(), finite)) {
    throw std::invalid_argument("classifier parameters must be finite");
  }
}

std::vector<double> BuiltinClassifier::project(const SparseFeatures& x) const {
  std::vector<double> z(classes_, 0.0);
  for (std::size_t c = 0; c < classes_; ++c) {
    const double* row = weights_.data() + c * dim_;
    double acc = 0.0;
    for (const auto& [idx, val] : x.entries) acc += row[idx] * val;
    z[c] = acc;
  }
  return z;
}

ClassScores BuiltinClassifier::logits(const SparseFeatures& x) const {
  auto z = project(x);
  for (std::size_t c = 0; c < classes_; ++c) z[c] += bias_[c];
  return ClassScores(std::move(z));
}

// Serialization -------------------------------------------------------------

namespace {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) {
    throw FormatError("model file truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void BuiltinClassifier::save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, kModelFormatVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(orders_.size()));
  for (auto n : orders_) write_le<std::uint32_t>(out, n);
  write_le<std::uint32_t>(out, dim_);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(classes_));
  for (double w : weights_) write_le<double>(out, w);
  for (double b : bias_) write_le<double>(out, b);
  if (!out) throw Error("failed writing model");
}

void BuiltinClassifier::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save(out);
}

BuiltinClassifier BuiltinClassifier::load(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("not a CHNG model file");
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model version " + std::to_string(version));
  }
  const auto order_count = read_le<std::uint32_t>(in);
  if (order_count > 64) throw FormatError("implausible n-gram order count");
  std::vector<std::uint32_t> orders(order_count);
  for (auto& n : orders) n = read_le<std::uint32_t>(in);
  const auto dim = read_le<std::uint32_t>(in);
  const auto classes = read_le<std::uint32_t>(in);
  if (dim == 0 || classes < 2 || classes > 1u << 16) {
    throw FormatError("invalid model dimensions");
  }
  std::vector<double> weights(static_cast<std::size_t>(classes) * dim);
  for (auto& w : weights) w = read_le<double>(in);
  std::vector<double> bias(classes);
  for (auto& b : bias) b = read_le<double>(in);
  return BuiltinClassifier(std::move(orders), dim, classes, std::move(weights),
                           std::move(bias));
}

BuiltinClassifier BuiltinClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  return load(in);
}

// Training ------------------------------------------------------------------

BuiltinClassifier train_builtin(std::span<const TrainingExample> dataset,
                                std::size_t num_classes,
                                const TrainingConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("training set is empty");
  if (num_classes < 2) throw std::invalid_argument("need at least two classes");
  for (const auto& ex : dataset) {
    if (ex.label.index >= num_classes) {
      throw std::invalid_argument("label " + std::to_string(ex.label.index) +
                                  " outside [0, " + std::to_string(num_classes) +
                                  ")");
    }
  }

  BuiltinClassifier model(config.ngram_orders, config.feature_dim, num_classes);
  std::vector<SparseFeatures> feats;
  feats.reserve(dataset.size());
  for (const auto& ex : dataset) feats.push_back(model.features(ex.text));

  Rng rng(config.seed);
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t dim = model.dim_;
  std::vector<double> probs(num_classes);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t idx : order) {
      const auto& x = feats[idx];
      const std::size_t y = dataset[idx].label.index;
      auto z = model.project(x);
      double zmax = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < num_classes; ++c) {
        z[c] += model.bias_[c];
        zmax = std::max(zmax, z[c]);
      }
      double norm = 0.0;
      for (std::size_t c = 0; c < num_classes; ++c) {
        probs[c] = std::exp(z[c] - zmax);
        norm += probs[c];
      }
      for (std::size_t c = 0; c < num_classes; ++c) {
        const double g = probs[c] / norm - (c == y ? 1.0 : 0.0);
        double* row = model.weights_.data() + c * dim;
        for (const auto& [fi, fv] : x.entries) {
          row[fi] -= config.learning_rate * g * fv;
        }
        model.bias_[c] -= config.learning_rate * g;
      }
    }
    // Weight decay once per epoch keeps the sparse updates cheap.
    if (config.l2 > 0.0) {
      const double decay =
          std::max(0.0, 1.0 - config.learning_rate * config.l2 *
                                  static_cast<double>(dataset.size()));
      for (double& w : model.weights_) w *= decay;
    }
  }
  return model;
}

double accuracy(const BuiltinClassifier& model,
                std::span<const TrainingExample> dataset) {
  if (dataset.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& ex : dataset) {
    if (model.predict(ex.text) == ex.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

// Mixtures ------------------------------------------------------------------

MixtureObjective::MixtureObjective(const BuiltinClassifier& model,
                                   const FeatureMatrix& features)
    : classes_(model.num_classes()),
      bias_(model.bias().begin(), model.bias().end()) {
  if (features.rows.empty()) {
    throw std::invalid_argument("mixture needs at least one candidate");
  }
  if (features.dim != model.feature_dim()) {
    throw DimensionMismatch("feature matrix width " +
                            std::to_string(features.dim) +
                            " differs from model dimension " +
                            std::to_string(model.feature_dim()));
  }
  projections_.reserve(features.rows.size());
  for (const auto& row : features.rows) {
    for (const auto& [idx, val] : row.entries) {
      if (idx >= features.dim) {
        throw DimensionMismatch("feature index outside matrix width");
      }
    }
    projections_.push_back(model.project(row));
  }
}

MixtureEvaluation MixtureObjective::evaluate(std::span<const double> u,
                                             Label y) const {
  if (u.size() != projections_.size()) {
    throw DimensionMismatch("weight vector has " + std::to_string(u.size()) +
                            " entries for " +
                            std::to_string(projections_.size()) + " candidates");
  }
  if (y.index >= classes_) throw std::out_of_range("label outside class range");

  std::vector<double> mixed(bias_);
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t c = 0; c < classes_; ++c) mixed[c] += u[i] * projections_[i][c];
  }
  std::size_t rival = classes_;
  for (std::size_t c = 0; c < classes_; ++c) {
    if (c == y.index) continue;
    if (rival == classes_ || mixed[c] > mixed[rival]) rival = c;
  }

  MixtureEvaluation out;
  out.loss = mixed[rival] - mixed[y.index];
  out.grad.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.grad[i] = projections_[i][rival] - projections_[i][y.index];
  }
  return out;
}

double MixtureObjective::candidate_loss(std::size_t i, Label y) const {
  std::vector<double> z(bias_);
  for (std::size_t c = 0; c < classes_; ++c) z[c] += projections_.at(i)[c];
  return cw_loss(ClassScores(std::move(z)), y);
}

MixtureEvaluation mixture_loss_and_grad(const BuiltinClassifier& model,
                                        const FeatureMatrix& features,
                                        std::span<const double> u, Label y) {
  if (u.size() != features.rows.size()) {
    throw DimensionMismatch("weight vector and feature matrix disagree");
  }
  double sum = 0.0;
  for (double v : u) {
    if (v < -1e-8) throw std::invalid_argument("mixture weight is negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-8) {
    throw std::invalid_argument("mixture weights do not sum to one");
  }
  return MixtureObjective(model, features).evaluate(u, y);
}

// Oracle --------------------------------------------------------------------

BuiltinOracle::BuiltinOracle(std::shared_ptr<const BuiltinClassifier> model,
                             std::size_t batch_limit)
    : model_(std::move(model)), batch_limit_(batch_limit) {
  if (!model_) throw std::invalid_argument("builtin oracle needs a model");
  if (batch_limit_ < 1) throw std::invalid_argument("batch limit must be >= 1");
}

std::size_t BuiltinOracle::num_classes() const noexcept {
  return model_->num_classes();
}

std::vector<ClassScores> BuiltinOracle::score_chunk(
    std::span<const Sentence> sentences) const {
  std::vector<ClassScores> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(model_->logits(s));
  return out;
}

}  // namespace charmer
