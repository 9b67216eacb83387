#include "charmer/dataset.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "charmer/error.hpp"
#include "charmer/random.hpp"
#include "charmer/sentence_space.hpp"
#include "charmer/utf8.hpp"

namespace charmer {

namespace {

using Json = nlohmann::json;

DatasetFormat format_or_throw(std::string_view name) {
  if (name == "jsonl") return DatasetFormat::Jsonl;
  if (name == "csv") return DatasetFormat::Csv;
  throw std::invalid_argument("unknown dataset format '" + std::string(name) + "'");
}

struct Ingest {
  LoadedDataset& out;

  Sentence text(std::string_view raw, std::size_t line, const char* field) {
    std::u32string chars;
    try {
      chars = utf8::decode(raw);
    } catch (const InvalidSentence& e) {
      throw FormatError(std::string(field) + ": " + e.what(), line);
    }
    if (chars.find(kSpecialChar) != std::u32string::npos) {
      throw FormatError(std::string(field) + " contains U+0000", line);
    }
    if (chars.size() > kMaxSentenceLength) {
      chars.resize(kMaxSentenceLength);
      ++out.truncated;
    }
    return Sentence(std::move(chars));
  }

  static Label label(long long value, std::size_t line) {
    if (value < 0) throw FormatError("label must be a non-negative integer", line);
    return {static_cast<std::size_t>(value)};
  }
};

LoadedDataset load_jsonl(std::istream& in, const LoadOptions& options) {
  LoadedDataset out;
  Ingest ingest{out};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (options.limit && out.records.size() >= options.limit) break;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json row;
    try {
      row = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!row.is_object()) throw FormatError("row is not a JSON object", line_no);

    const char* text_key = row.contains("text") ? "text" : "hypothesis";
    if (!row.contains(text_key) || !row[text_key].is_string()) {
      throw FormatError("missing string field \"text\"", line_no);
    }
    if (!row.contains("label") || !row["label"].is_number_integer()) {
      throw FormatError("missing integer field \"label\"", line_no);
    }
    DatasetRecord rec;
    rec.text = ingest.text(row[text_key].get<std::string>(), line_no, text_key);
    rec.label = Ingest::label(row["label"].get<long long>(), line_no);
    if (row.contains("id")) {
      rec.id = row["id"].is_string() ? row["id"].get<std::string>() : row["id"].dump();
    } else {
      rec.id = std::to_string(out.records.size());
    }
    if (row.contains("premise")) {
      if (!row["premise"].is_string()) throw FormatError("premise must be a string", line_no);
      rec.paired_text = ingest.text(row["premise"].get<std::string>(), line_no, "premise");
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

// RFC 4180 reader. Returns false at end of input; `line` tracks the
// physical line where the record started.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                     std::size_t& line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  ++line;
  const std::size_t start_line = line;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  char ch;
  while (in.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (quoted) throw FormatError("unterminated quoted field", start_line);
  fields.push_back(std::move(field));
  return true;
}

LoadedDataset load_csv(std::istream& in, const LoadOptions& options) {
  LoadedDataset out;
  Ingest ingest{out};
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_csv_record(in, fields, line)) throw FormatError("empty CSV file", 1);

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < fields.size(); ++i) column[fields[i]] = i;
  auto require = [&](const char* name) {
    auto it = column.find(name);
    if (it == column.end()) {
      throw FormatError(std::string("missing column \"") + name + "\"", 1);
    }
    return it->second;
  };
  const std::size_t text_col = column.contains("text") ? require("text") : require("hypothesis");
  const std::size_t label_col = require("label");
  const auto id_col = column.find("id");
  const auto premise_col = column.find("premise");

  while (!(options.limit && out.records.size() >= options.limit) &&
         read_csv_record(in, fields, line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != column.size()) {
      throw FormatError("expected " + std::to_string(column.size()) + " fields, got " +
                            std::to_string(fields.size()),
                        line);
    }
    DatasetRecord rec;
    rec.text = ingest.text(fields[text_col], line, "text");
    long long value = 0;
    try {
      std::size_t used = 0;
      value = std::stoll(fields[label_col], &used);
      if (used != fields[label_col].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError("label \"" + fields[label_col] + "\" is not an integer", line);
    }
    rec.label = Ingest::label(value, line);
    rec.id = id_col != column.end() ? fields[id_col->second]
                                    : std::to_string(out.records.size());
    if (premise_col != column.end()) {
      rec.paired_text = ingest.text(fields[premise_col->second], line, "premise");
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

DatasetFormat parse_dataset_format(std::string_view name) { return format_or_throw(name); }

LoadedDataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                           const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path.string());
  return format == DatasetFormat::Jsonl ? load_jsonl(in, options) : load_csv(in, options);
}

Alphabet extract_alphabet(const std::vector<DatasetRecord>& records, char32_t test_char) {
  std::u32string chars;
  for (const auto& r : records) chars.append(r.text.chars());
  return Alphabet(std::move(chars), test_char);
}

double similarity(const Sentence& a, const Sentence& b) {
  const double denom =
      static_cast<double>(std::max<std::size_t>({a.size(), b.size(), 1}));
  return 1.0 - static_cast<double>(levenshtein(a, b)) / denom;
}

std::size_t infer_num_classes(const std::vector<DatasetRecord>& records) {
  std::size_t max_label = 1;
  for (const auto& r : records) max_label = std::max(max_label, r.label.index);
  return max_label + 1;
}

std::vector<TrainingExample> to_training_examples(
    const std::vector<DatasetRecord>& records) {
  std::vector<TrainingExample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.text, r.label});
  return out;
}

std::vector<DatasetRecord> keyword_corpus(std::size_t count, std::uint64_t seed) {
  static constexpr std::array<const char*, 6> kPositive{
      "good", "great", "superb", "lovely", "brilliant", "charming"};
  static constexpr std::array<const char*, 6> kNegative{
      "bad", "awful", "poor", "dreadful", "terrible", "boring"};
  static constexpr std::array<const char*, 14> kFiller{
      "the", "movie", "plot", "was", "really", "acting", "and",
      "cast", "story", "film", "quite", "truly", "overall", "this"};

  Rng rng(seed);
  auto pick = [&rng](const auto& words) {
    return std::string(words[uniform_below(rng, words.size())]);
  };

  std::vector<DatasetRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t label = uniform_below(rng, 2);
    const std::size_t before = 1 + uniform_below(rng, 4);
    const std::size_t after = 1 + uniform_below(rng, 3);
    std::string text;
    for (std::size_t w = 0; w < before; ++w) text += pick(kFiller) + " ";
    text += label == 1 ? pick(kPositive) : pick(kNegative);
    for (std::size_t w = 0; w < after; ++w) text += " " + pick(kFiller);
    out.push_back({std::to_string(i), Sentence::from_utf8(text), {label}, std::nullopt});
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records) {
    Json row{{"id", r.id}, {"text", r.text.to_utf8()}, {"label", r.label.index}};
    if (r.paired_text) row["premise"] = r.paired_text->to_utf8();
    out << row.dump() << '\n';
  }
}

}  // namespace charmer
