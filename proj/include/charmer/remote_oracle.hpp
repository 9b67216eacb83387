#pragma once

// HTTP client for external model servers.
//
// Request:  POST <base>/score  {"sentences": ["...", ...]}
// Response: 200 {"scores": [[...], ...]}, one row of num_classes numbers per
//           sentence, in request order.

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>

#include "charmer/oracle.hpp"

namespace charmer {

struct RemoteOracleConfig {
  /// e.g. "http://127.0.0.1:8080" or "http://host:port/prefix".
  std::string endpoint;
  std::size_t num_classes = 2;
  std::size_t batch_limit = 256;
  /// Extra attempts after a transport failure. Zero keeps query counts exact.
  std::size_t retries = 0;
  /// Chunks of one score_batch call sent in parallel.
  std::size_t concurrency = 1;
  double timeout_seconds = 30.0;
};

class RemoteOracle final : public ClassifierOracle {
 public:
  explicit RemoteOracle(RemoteOracleConfig config);
  ~RemoteOracle() override;

  OracleKind kind() const noexcept override { return OracleKind::Remote; }
  std::size_t num_classes() const noexcept override { return config_.num_classes; }
  std::size_t batch_limit() const noexcept override { return config_.batch_limit; }

  const RemoteOracleConfig& config() const noexcept { return config_; }

  /// Parses a response body; exposed for tests. Throws RemoteError(Schema).
  static std::vector<ClassScores> parse_response(const std::string& body,
                                                 std::size_t expected_rows,
                                                 std::size_t num_classes);

  static std::string encode_request(std::span<const Sentence> sentences);

 protected:
  std::vector<ClassScores> score_chunk(
      std::span<const Sentence> sentences) const override;
  std::vector<std::vector<ClassScores>> score_chunks(
      std::span<const std::span<const Sentence>> chunks) const override;

 private:
  std::vector<ClassScores> post(std::span<const Sentence> sentences) const;

  RemoteOracleConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  mutable std::mutex serial_;
};

/// Convenience wrapper: one POST of `sentences` to `endpoint`.
std::vector<ClassScores> remote_score(const std::string& endpoint,
                                      std::span<const Sentence> sentences,
                                      std::size_t num_classes);

}  // namespace charmer
