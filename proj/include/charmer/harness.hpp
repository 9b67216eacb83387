#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "charmer/attack.hpp"
#include "charmer/dataset.hpp"
#include "charmer/oracle.hpp"
#include "charmer/pga.hpp"

namespace charmer {

inline constexpr int kTranscriptSchemaVersion = 1;

enum class AttackKind { Charmer, CharmerFast, Random, ExhaustiveK1, Pga };

/// "charmer", "charmer-fast", "random", "exhaustive-k1" or "pga".
AttackKind parse_attack_kind(std::string_view name);
std::string_view attack_name(AttackKind kind);

struct SuiteConfig {
  AttackKind attack = AttackKind::Charmer;
  /// The alphabet is replaced by the one extracted from the dataset unless
  /// `keep_alphabet` is set.
  AttackConfig attack_config;
  bool keep_alphabet = false;
  PgaConfig pga;
  /// Samples attacked concurrently.
  std::size_t workers = 1;
};

/// Short hex digest of every setting that influences attack results.
std::string config_fingerprint(const SuiteConfig& config, const Alphabet& alphabet);

enum class SampleStatus { Attacked, Skipped, Error };

struct SampleResult {
  std::string id;
  Label label;
  SampleStatus status = SampleStatus::Attacked;
  /// Filled for attacked samples. For skipped samples `adversarial` equals
  /// the original and `final_loss` is the clean loss.
  AttackOutcome outcome;
  std::size_t levenshtein = 0;
  double edit_sim = 1.0;
  std::string error;
};

struct RunReport {
  std::string attack;
  std::string config_fingerprint;
  std::string alphabet_fingerprint;
  std::size_t total = 0;
  /// Correctly classified clean samples that were attacked without error.
  std::size_t attackable = 0;
  std::size_t successes = 0;
  std::size_t skipped = 0;
  std::size_t errors = 0;
  /// Percent of attackable samples turned adversarial; 0 when none.
  double asr = 0.0;
  bool no_attackable_samples = false;
  /// Levenshtein distance and edit_sim over successful attacks only.
  double mean_dlev = 0.0;
  double std_dlev = 0.0;
  double mean_edit_sim = 0.0;
  std::size_t total_queries = 0;
  /// Wall-clock seconds per attacked sample.
  double mean_time = 0.0;
  double std_time = 0.0;
  std::vector<SampleResult> samples;

  /// Everything except timings; identical across identical seeded runs.
  nlohmann::ordered_json body_json() const;
  nlohmann::ordered_json timing_json() const;
  /// {"body": ..., "timing": ...}
  nlohmann::ordered_json to_json() const;
};

/// One JSON object per record, appended and flushed as soon as the record is
/// done. Safe to share between workers.
class TranscriptWriter {
 public:
  explicit TranscriptWriter(const std::filesystem::path& path);
  void append(const nlohmann::ordered_json& line);

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

nlohmann::ordered_json transcript_line(const SampleResult& sample,
                                       const std::string& config_fingerprint,
                                       const std::string& alphabet_fingerprint);

/// Feeds "premise hypothesis" to the wrapped oracle so that only the
/// hypothesis is edited.
class PairedInputOracle final : public ClassifierOracle {
 public:
  PairedInputOracle(const ClassifierOracle& inner, Sentence premise);

  OracleKind kind() const noexcept override { return inner_.kind(); }
  std::size_t num_classes() const noexcept override { return inner_.num_classes(); }
  std::size_t batch_limit() const noexcept override { return inner_.batch_limit(); }

  Sentence join(const Sentence& hypothesis) const;

 protected:
  std::vector<ClassScores> score_chunk(
      std::span<const Sentence> sentences) const override;

 private:
  const ClassifierOracle& inner_;
  Sentence premise_;
};

/// Attacks one record with the chosen method; the oracle must already
/// account for any paired text.
AttackOutcome run_single_attack(const ClassifierOracle& oracle, const Sentence& s,
                                Label y, const SuiteConfig& config,
                                const Alphabet& alphabet);

/// Scores each clean text, skips misclassified ones, attacks the rest and
/// aggregates. Transport failures are recorded on the sample and the run
/// continues. Throws std::invalid_argument when a label is outside the
/// oracle's class range.
RunReport run_attack_suite(const std::vector<DatasetRecord>& records,
                           const ClassifierOracle& oracle, const SuiteConfig& config,
                           TranscriptWriter* transcript = nullptr);

/// Recomputes the aggregate fields from `samples`.
void aggregate(RunReport& report);

}  // namespace charmer
