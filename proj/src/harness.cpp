#include "charmer/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "charmer/error.hpp"
#include "charmer/sentence_space.hpp"
#include "charmer/utf8.hpp"

namespace charmer {

using nlohmann::ordered_json;

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "charmer") return AttackKind::Charmer;
  if (name == "charmer-fast") return AttackKind::CharmerFast;
  if (name == "random") return AttackKind::Random;
  if (name == "exhaustive-k1") return AttackKind::ExhaustiveK1;
  if (name == "pga") return AttackKind::Pga;
  throw std::invalid_argument("unknown attack '" + std::string(name) + "'");
}

std::string_view attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::Charmer: return "charmer";
    case AttackKind::CharmerFast: return "charmer-fast";
    case AttackKind::Random: return "random";
    case AttackKind::ExhaustiveK1: return "exhaustive-k1";
    case AttackKind::Pga: return "pga";
  }
  return "unknown";
}

namespace {

std::string fnv_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ordered_json finite_or_null(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

std::string_view status_name(SampleStatus s) {
  switch (s) {
    case SampleStatus::Attacked: return "attacked";
    case SampleStatus::Skipped: return "skipped";
    case SampleStatus::Error: return "error";
  }
  return "unknown";
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(xs.size()))};
}

}  // namespace

std::string config_fingerprint(const SuiteConfig& config, const Alphabet& alphabet) {
  const auto& a = config.attack_config;
  const auto& p = config.pga;
  ordered_json j{
      {"attack", attack_name(config.attack)},
      {"n", a.n},
      {"k", a.k},
      {"constraints", a.constraints.to_string()},
      {"segments", a.segments ? ordered_json(*a.segments) : ordered_json(nullptr)},
      {"budget", a.budget},
      {"seed", a.seed},
      {"alphabet", alphabet.fingerprint()},
  };
  if (config.attack == AttackKind::Pga) {
    j["pga"] = {{"step_size", p.step_size}, {"iterations", p.iterations},
                {"k", p.k},  {"candidate_cap", p.candidate_cap},
                {"enumeration_budget", p.enumeration_budget}, {"seed", p.seed}};
  }
  return fnv_hex(j.dump());
}

ordered_json RunReport::body_json() const {
  ordered_json rows = ordered_json::array();
  for (const auto& s : samples) {
    rows.push_back({
        {"id", s.id},
        {"status", status_name(s.status)},
        {"label", s.label.index},
        {"success", s.outcome.success},
        {"adversarial", s.outcome.adversarial.to_utf8()},
        {"levenshtein", s.levenshtein},
        {"edit_sim", s.edit_sim},
        {"edits_used", s.outcome.edits_used},
        {"final_loss", finite_or_null(s.outcome.final_loss)},
        {"queries", s.outcome.queries},
    });
  }
  return {
      {"attack", attack},
      {"config_fingerprint", config_fingerprint},
      {"alphabet_fingerprint", alphabet_fingerprint},
      {"total", total},
      {"attackable", attackable},
      {"successes", successes},
      {"skipped", skipped},
      {"errors", errors},
      {"asr", asr},
      {"no_attackable_samples", no_attackable_samples},
      {"mean_dlev", mean_dlev},
      {"std_dlev", std_dlev},
      {"mean_edit_sim", mean_edit_sim},
      {"total_queries", total_queries},
      {"samples", std::move(rows)},
  };
}

ordered_json RunReport::timing_json() const {
  ordered_json per_sample = ordered_json::array();
  for (const auto& s : samples) {
    per_sample.push_back({{"id", s.id}, {"elapsed_seconds", s.outcome.elapsed_seconds}});
  }
  return {{"mean_time", mean_time}, {"std_time", std_time}, {"samples", std::move(per_sample)}};
}

ordered_json RunReport::to_json() const {
  return {{"body", body_json()}, {"timing", timing_json()}};
}

void aggregate(RunReport& report) {
  report.total = report.samples.size();
  report.attackable = report.successes = report.skipped = report.errors = 0;
  report.total_queries = 0;
  std::vector<double> dlev, sim, times;
  for (const auto& s : report.samples) {
    report.total_queries += s.outcome.queries;
    switch (s.status) {
      case SampleStatus::Skipped: ++report.skipped; continue;
      case SampleStatus::Error: ++report.errors; continue;
      case SampleStatus::Attacked: break;
    }
    ++report.attackable;
    times.push_back(s.outcome.elapsed_seconds);
    if (s.outcome.success) {
      ++report.successes;
      dlev.push_back(static_cast<double>(s.levenshtein));
      sim.push_back(s.edit_sim);
    }
  }
  report.no_attackable_samples = report.attackable == 0;
  report.asr = report.attackable == 0
                   ? 0.0
                   : 100.0 * static_cast<double>(report.successes) /
                         static_cast<double>(report.attackable);
  std::tie(report.mean_dlev, report.std_dlev) = mean_std(dlev);
  report.mean_edit_sim = mean_std(sim).first;
  std::tie(report.mean_time, report.std_time) = mean_std(times);
}

TranscriptWriter::TranscriptWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error("cannot write transcript " + path.string());
}

void TranscriptWriter::append(const ordered_json& line) {
  const std::string text = line.dump();
  std::lock_guard lock(mutex_);
  out_ << text << '\n';
  out_.flush();
}

ordered_json transcript_line(const SampleResult& sample,
                             const std::string& config_fingerprint,
                             const std::string& alphabet_fingerprint) {
  const auto& o = sample.outcome;
  ordered_json trace = ordered_json::array();
  for (const auto& step : o.trace) {
    trace.push_back({{"position", step.position},
                     {"replacement", static_cast<std::uint32_t>(step.replacement)},
                     {"loss", finite_or_null(step.loss)},
                     {"previous_loss", finite_or_null(step.previous_loss)},
                     {"changed", step.changed}});
  }
  return {
      {"schema_version", kTranscriptSchemaVersion},
      {"id", sample.id},
      {"status", status_name(sample.status)},
      {"label", sample.label.index},
      {"original", o.original.to_utf8()},
      {"adversarial", o.adversarial.to_utf8()},
      {"success", o.success},
      {"edits_used", o.edits_used},
      {"levenshtein", sample.levenshtein},
      {"edit_sim", sample.edit_sim},
      {"final_loss", finite_or_null(o.final_loss)},
      {"queries", o.queries},
      {"elapsed_seconds", o.elapsed_seconds},
      {"budget_exhausted", o.budget_exhausted},
      {"trace", std::move(trace)},
      {"config_fingerprint", config_fingerprint},
      {"alphabet_fingerprint", alphabet_fingerprint},
      {"error", sample.error.empty() ? ordered_json(nullptr) : ordered_json(sample.error)},
  };
}

PairedInputOracle::PairedInputOracle(const ClassifierOracle& inner, Sentence premise)
    : inner_(inner), premise_(std::move(premise)) {}

Sentence PairedInputOracle::join(const Sentence& hypothesis) const {
  std::u32string text(premise_.chars());
  text.push_back(U' ');
  text.append(hypothesis.chars());
  if (text.size() > kMaxSentenceLength) text.resize(kMaxSentenceLength);
  return Sentence(std::move(text));
}

std::vector<ClassScores> PairedInputOracle::score_chunk(
    std::span<const Sentence> sentences) const {
  std::vector<Sentence> joined;
  joined.reserve(sentences.size());
  for (const auto& s : sentences) joined.push_back(join(s));
  return inner_.score_batch(joined);
}

AttackOutcome run_single_attack(const ClassifierOracle& oracle, const Sentence& s,
                                Label y, const SuiteConfig& config,
                                const Alphabet& alphabet) {
  AttackConfig ac = config.attack_config;
  ac.alphabet = alphabet;
  switch (config.attack) {
    case AttackKind::Charmer:
      return charmer_attack(oracle, s, y, ac);
    case AttackKind::CharmerFast:
      ac.n = 1;
      return charmer_attack(oracle, s, y, ac);
    case AttackKind::Random:
      return random_position_baseline(oracle, s, y, ac);
    case AttackKind::ExhaustiveK1: {
      const auto start = std::chrono::steady_clock::now();
      auto best = exhaustive_k1(oracle, s, y, alphabet);
      AttackOutcome out;
      out.original = s;
      out.adversarial = std::move(best.sentence);
      out.final_loss = best.loss;
      out.success = best.loss >= 0.0;
      out.queries = best.queries;
      out.edits_used = levenshtein(s, out.adversarial);
      out.elapsed_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return out;
    }
    case AttackKind::Pga:
      return pga_attack(oracle, s, y, alphabet, config.pga).outcome;
  }
  throw std::logic_error("unhandled attack kind");
}

namespace {

SampleResult attack_record(const DatasetRecord& record, std::size_t index,
                           const ClassifierOracle& base, const SuiteConfig& config,
                           const Alphabet& alphabet) {
  SampleResult out;
  out.id = record.id;
  out.label = record.label;
  out.outcome.original = record.text;
  out.outcome.adversarial = record.text;

  std::optional<PairedInputOracle> paired;
  if (record.paired_text) paired.emplace(base, *record.paired_text);
  const ClassifierOracle& oracle = paired ? static_cast<const ClassifierOracle&>(*paired) : base;

  // Per-sample seeds keep results independent of worker scheduling.
  SuiteConfig local = config;
  local.attack_config.seed = config.attack_config.seed + index;
  local.pga.seed = config.pga.seed + index;

  try {
    const auto clean = oracle.score(record.text);
    const double clean_loss = cw_loss(clean, record.label);
    if (is_adversarial(clean, record.label)) {
      out.status = SampleStatus::Skipped;
      out.outcome.final_loss = clean_loss;
      return out;
    }
    out.outcome = run_single_attack(oracle, record.text, record.label, local, alphabet);
    if (std::isnan(out.outcome.final_loss)) out.outcome.final_loss = clean_loss;
    out.levenshtein = levenshtein(record.text, out.outcome.adversarial);
    out.edit_sim = similarity(record.text, out.outcome.adversarial);
  } catch (const Error& e) {
    out.status = SampleStatus::Error;
    out.error = e.what();
  }
  return out;
}

}  // namespace

RunReport run_attack_suite(const std::vector<DatasetRecord>& records,
                           const ClassifierOracle& oracle, const SuiteConfig& config,
                           TranscriptWriter* transcript) {
  for (const auto& r : records) {
    if (r.label.index >= oracle.num_classes()) {
      throw std::invalid_argument("record " + r.id + " has label " +
                                  std::to_string(r.label.index) + " but the oracle has " +
                                  std::to_string(oracle.num_classes()) + " classes");
    }
  }
  const Alphabet alphabet =
      config.keep_alphabet || records.empty()
          ? config.attack_config.alphabet
          : extract_alphabet(records, config.attack_config.alphabet.test_char());

  RunReport report;
  report.attack = std::string(attack_name(config.attack));
  report.alphabet_fingerprint = alphabet.fingerprint();
  report.config_fingerprint = config_fingerprint(config, alphabet);
  report.samples.resize(records.size());

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      try {
        report.samples[i] = attack_record(records[i], i, oracle, config, alphabet);
        if (transcript) {
          transcript->append(transcript_line(report.samples[i], report.config_fingerprint,
                                             report.alphabet_fingerprint));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = records.size();
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, records.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  aggregate(report);
  return report;
}

}  // namespace charmer
