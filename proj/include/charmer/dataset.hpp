#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charmer/builtin_classifier.hpp"
#include "charmer/oracle.hpp"
#include "charmer/sentence.hpp"

namespace charmer {

/// One labelled sample. For sentence pairs `paired_text` holds the premise
/// and only `text` (the hypothesis) is attacked.
struct DatasetRecord {
  std::string id;
  Sentence text;
  Label label;
  std::optional<Sentence> paired_text;
};

enum class DatasetFormat { Jsonl, Csv };

/// "jsonl" or "csv"; throws std::invalid_argument otherwise.
DatasetFormat parse_dataset_format(std::string_view name);

struct LoadOptions {
  /// Keep at most this many records; 0 keeps everything.
  std::size_t limit = 1000;
};

struct LoadedDataset {
  std::vector<DatasetRecord> records;
  /// Texts cut down to kMaxSentenceLength.
  std::size_t truncated = 0;
};

/// Reads records in file order.
///
/// JSON Lines: one object per line with "text" (or "hypothesis"), integer
/// "label" >= 0, optional "id" and optional "premise". Blank lines are
/// skipped.
/// CSV: a header row naming at least the "text" and "label" columns, plus
/// optional "id" and "premise"; fields follow RFC 4180 quoting.
///
/// Missing ids become the zero-based row index. Throws FormatError naming
/// the offending line or column, including for text holding U+0000.
LoadedDataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                           const LoadOptions& options = {});

/// Every character found in the attacked texts, sorted ascending.
Alphabet extract_alphabet(const std::vector<DatasetRecord>& records,
                          char32_t test_char = kDefaultTestChar);

/// 1 - levenshtein(a, b) / max(|a|, |b|, 1). Reported as `edit_sim`.
double similarity(const Sentence& a, const Sentence& b);

/// Largest label + 1 (at least 2).
std::size_t infer_num_classes(const std::vector<DatasetRecord>& records);

std::vector<TrainingExample> to_training_examples(
    const std::vector<DatasetRecord>& records);

/// Two-class sentiment-style corpus: filler words around one class keyword.
/// Label 1 carries a positive keyword, label 0 a negative one. Lowercase
/// ASCII letters and spaces only.
std::vector<DatasetRecord> keyword_corpus(std::size_t count, std::uint64_t seed);

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<DatasetRecord>& records);

}  // namespace charmer
