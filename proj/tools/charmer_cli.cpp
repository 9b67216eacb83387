// charmer: attack runner, builtin model trainer and property-suite driver.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "charmer/builtin_classifier.hpp"
#include "charmer/dataset.hpp"
#include "charmer/error.hpp"
#include "charmer/harness.hpp"
#include "charmer/remote_oracle.hpp"
#include "verify.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Bad option values found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("charmer");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("CHARMER_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
}

struct AttackOptions {
  std::string dataset;
  std::string format = "jsonl";
  std::string oracle;
  std::string attack = "charmer";
  std::size_t n = 20;
  std::size_t k = 10;
  std::string constraints = "none";
  std::optional<std::size_t> segments;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string report;
  std::size_t limit = 1000;
  std::size_t workers = 1;
  std::optional<std::size_t> classes;
  std::size_t batch_limit = 256;
  std::size_t retries = 0;
  std::size_t concurrency = 1;
  double pga_step = 0.1;
  std::size_t pga_iterations = 200;
  std::size_t pga_candidates = 4096;
};

struct TrainOptions {
  std::string dataset;
  std::string format = "jsonl";
  std::string out;
  std::uint64_t seed = 0;
  std::size_t epochs = 30;
  std::size_t limit = 0;
};

struct VerifyOptions {
  std::string suite;
  std::uint64_t seed = 0;
};

charmer::DatasetFormat format_or_usage(const std::string& name) {
  try {
    return charmer::parse_dataset_format(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::unique_ptr<charmer::ClassifierOracle> make_oracle(const AttackOptions& opt,
                                                       std::size_t dataset_classes) {
  const auto colon = opt.oracle.find(':');
  if (colon == std::string::npos) {
    throw UsageError("--oracle must be builtin:<model-file> or http:<url>");
  }
  const std::string kind = opt.oracle.substr(0, colon);
  const std::string target = opt.oracle.substr(colon + 1);
  if (kind == "builtin") {
    auto model = std::make_shared<const charmer::BuiltinClassifier>(
        charmer::BuiltinClassifier::load(std::filesystem::path(target)));
    spdlog::info("loaded builtin model {} ({} classes)", target, model->num_classes());
    return std::make_unique<charmer::BuiltinOracle>(std::move(model));
  }
  if (kind == "http") {
    charmer::RemoteOracleConfig config;
    config.endpoint = target;
    config.num_classes = opt.classes.value_or(dataset_classes);
    config.batch_limit = opt.batch_limit;
    config.retries = opt.retries;
    config.concurrency = opt.concurrency;
    return std::make_unique<charmer::RemoteOracle>(config);
  }
  throw UsageError("unknown oracle kind '" + kind + "'");
}

int run_attack(const AttackOptions& opt) {
  const auto format = format_or_usage(opt.format);
  charmer::SuiteConfig config;
  try {
    config.attack = charmer::parse_attack_kind(opt.attack);
    config.attack_config.constraints = charmer::PjcConstraints::parse(opt.constraints);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (opt.n < 1 || opt.k < 1) throw UsageError("--n and --k must be at least 1");
  if (opt.segments && *opt.segments < 1) throw UsageError("--segments must be at least 1");
  config.attack_config.n = opt.n;
  config.attack_config.k = opt.k;
  config.attack_config.segments = opt.segments;
  config.attack_config.budget = opt.budget;
  config.attack_config.seed = opt.seed;
  config.workers = opt.workers;
  config.pga.k = opt.k;
  config.pga.seed = opt.seed;
  config.pga.step_size = opt.pga_step;
  config.pga.iterations = opt.pga_iterations;
  config.pga.candidate_cap = opt.pga_candidates;

  charmer::LoadOptions load;
  load.limit = opt.limit;
  const auto data = charmer::load_dataset(opt.dataset, format, load);
  if (data.truncated > 0) {
    spdlog::warn("{} texts truncated to {} characters", data.truncated,
                 charmer::kMaxSentenceLength);
  }
  if (data.records.empty()) throw UsageError("dataset " + opt.dataset + " has no records");
  spdlog::info("{} records from {}", data.records.size(), opt.dataset);

  const auto oracle = make_oracle(opt, charmer::infer_num_classes(data.records));
  std::unique_ptr<charmer::TranscriptWriter> transcript;
  if (!opt.out.empty()) transcript = std::make_unique<charmer::TranscriptWriter>(opt.out);

  const auto report =
      charmer::run_attack_suite(data.records, *oracle, config, transcript.get());
  if (!opt.report.empty()) {
    std::ofstream out(opt.report, std::ios::binary | std::ios::trunc);
    if (!out) throw charmer::Error("cannot write report " + opt.report);
    out << report.to_json().dump(2) << '\n';
  }
  std::cout << fmt::format(
      "attack={} attackable={} successes={} skipped={} errors={} asr={:.2f}% "
      "mean_dlev={:.3f} mean_edit_sim={:.4f} queries={} mean_time={:.4f}s\n",
      report.attack, report.attackable, report.successes, report.skipped, report.errors,
      report.asr, report.mean_dlev, report.mean_edit_sim, report.total_queries,
      report.mean_time);
  if (report.no_attackable_samples) spdlog::warn("no attackable samples");
  if (report.errors > 0) {
    spdlog::error("{} samples failed", report.errors);
    return kExitFailure;
  }
  return 0;
}

int run_train(const TrainOptions& opt) {
  const auto format = format_or_usage(opt.format);
  charmer::LoadOptions load;
  load.limit = opt.limit;
  const auto data = charmer::load_dataset(opt.dataset, format, load);
  if (data.records.empty()) throw UsageError("dataset " + opt.dataset + " has no records");
  for (const auto& r : data.records) {
    if (r.paired_text) throw UsageError("train-builtin does not take premise/hypothesis pairs");
  }
  charmer::TrainingConfig config;
  config.seed = opt.seed;
  config.epochs = opt.epochs;
  const auto examples = charmer::to_training_examples(data.records);
  const auto model =
      charmer::train_builtin(examples, charmer::infer_num_classes(data.records), config);
  model.save(std::filesystem::path(opt.out));
  std::cout << fmt::format("trained on {} records, {} classes, accuracy {:.4f} -> {}\n",
                           examples.size(), model.num_classes(),
                           charmer::accuracy(model, examples), opt.out);
  return 0;
}

int run_verify(const VerifyOptions& opt) {
  std::vector<charmer::verify::CheckResult> results;
  try {
    results = charmer::verify::run_suite(opt.suite, opt.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  bool ok = true;
  for (const auto& r : results) {
    std::cout << fmt::format("{} {} ({} checks, {} failures, {:.2f}s): {}\n",
                             r.passed ? "PASS" : "FAIL", r.name, r.checks, r.failures,
                             r.seconds, r.detail);
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Character-level adversarial attacks on text classifiers"};
  app.require_subcommand(1);

  AttackOptions attack;
  auto* attack_cmd = app.add_subcommand("attack", "Run attacks over a dataset");
  attack_cmd->require_subcommand(1);
  auto* run_cmd = attack_cmd->add_subcommand("run", "Attack every record and report");
  run_cmd->add_option("--dataset", attack.dataset, "Dataset file")->required();
  run_cmd->add_option("--format", attack.format, "jsonl or csv")->capture_default_str();
  run_cmd->add_option("--oracle", attack.oracle, "builtin:<model-file> or http:<url>")
      ->required();
  run_cmd->add_option("--attack", attack.attack,
                      "charmer, charmer-fast, random, exhaustive-k1 or pga")
      ->capture_default_str();
  run_cmd->add_option("--n", attack.n, "Candidate positions per iteration")
      ->capture_default_str();
  run_cmd->add_option("--k", attack.k, "Maximum number of edits")->capture_default_str();
  run_cmd->add_option("--constraints", attack.constraints,
                      "Subset of repeat,first,last,length,loweng, or none")
      ->capture_default_str();
  run_cmd->add_option("--segments", attack.segments, "Keep the top-m whitespace segments");
  run_cmd->add_option("--budget", attack.budget, "Oracle queries per sample, 0 = unlimited")
      ->capture_default_str();
  run_cmd->add_option("--seed", attack.seed, "Seed for the random baseline and PGA")
      ->capture_default_str();
  run_cmd->add_option("--out", attack.out, "Transcript file (JSON Lines)");
  run_cmd->add_option("--report", attack.report, "Report file (JSON)");
  run_cmd->add_option("--limit", attack.limit, "Records to read, 0 = all")
      ->capture_default_str();
  run_cmd->add_option("--workers", attack.workers, "Samples attacked in parallel")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--classes", attack.classes,
                      "Class count of an http oracle (default: from the labels)");
  run_cmd->add_option("--batch-limit", attack.batch_limit, "Sentences per http request")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--retries", attack.retries, "Extra http attempts per request")
      ->capture_default_str();
  run_cmd->add_option("--concurrency", attack.concurrency, "Parallel http requests")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--pga-step", attack.pga_step, "PGA step size")->capture_default_str();
  run_cmd->add_option("--pga-iterations", attack.pga_iterations, "PGA iterations")
      ->capture_default_str();
  run_cmd->add_option("--pga-candidates", attack.pga_candidates, "PGA candidate cap")
      ->capture_default_str();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train-builtin", "Train the builtin n-gram classifier");
  train_cmd->add_option("--dataset", train.dataset, "Dataset file")->required();
  train_cmd->add_option("--format", train.format, "jsonl or csv")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Model file")->required();
  train_cmd->add_option("--seed", train.seed, "Shuffling seed")->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--limit", train.limit, "Records to read, 0 = all")
      ->capture_default_str();

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite");
  verify_cmd->add_option("--suite", verify.suite, "sentence-space, projection or equivalence")
      ->required();
  verify_cmd->add_option("--seed", verify.seed, "Seed for random instances")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) return run_attack(attack);
    if (*train_cmd) return run_train(train);
    if (*verify_cmd) return run_verify(verify);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
