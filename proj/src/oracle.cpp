#include "charmer/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "charmer/error.hpp"

namespace charmer {

ClassScores::ClassScores(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw std::invalid_argument("class scores need at least two classes");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("class score is not finite");
  }
}

std::size_t ClassScores::argmax() const noexcept {
  return static_cast<std::size_t>(
      std::max_element(values_.begin(), values_.end()) - values_.begin());
}

double cw_loss(const ClassScores& scores, Label y) {
  if (y.index >= scores.num_classes()) {
    throw std::out_of_range("label " + std::to_string(y.index) +
                            " outside [0, " +
                            std::to_string(scores.num_classes()) + ")");
  }
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < scores.num_classes(); ++c) {
    if (c != y.index) best_other = std::max(best_other, scores[c]);
  }
  return best_other - scores[y.index];
}

bool is_adversarial(const ClassScores& scores, Label y) {
  return cw_loss(scores, y) >= 0.0;
}

std::vector<ClassScores> ClassifierOracle::score_batch(
    std::span<const Sentence> sentences) const {
  const std::size_t limit = std::max<std::size_t>(1, batch_limit());
  std::vector<std::span<const Sentence>> chunks;
  for (std::size_t begin = 0; begin < sentences.size(); begin += limit) {
    chunks.push_back(
        sentences.subspan(begin, std::min(limit, sentences.size() - begin)));
  }
  auto scored = score_chunks(chunks);
  if (scored.size() != chunks.size()) throw Error("oracle lost a chunk");

  std::vector<ClassScores> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (scored[i].size() != chunks[i].size()) {
      throw Error("oracle returned " + std::to_string(scored[i].size()) +
                  " rows for " + std::to_string(chunks[i].size()) +
                  " sentences");
    }
    for (auto& row : scored[i]) out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::vector<ClassScores>> ClassifierOracle::score_chunks(
    std::span<const std::span<const Sentence>> chunks) const {
  std::vector<std::vector<ClassScores>> out;
  out.reserve(chunks.size());
  for (auto chunk : chunks) out.push_back(score_chunk(chunk));
  return out;
}

ClassScores ClassifierOracle::score(const Sentence& s) const {
  return score_batch(std::span<const Sentence>(&s, 1)).front();
}

}  // namespace charmer
