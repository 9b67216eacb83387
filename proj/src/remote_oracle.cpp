#include "charmer/remote_oracle.hpp"

#include <future>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "charmer/error.hpp"

namespace charmer {

namespace {

using Json = nlohmann::json;

// Splits "http://host:port/prefix" into the client base and the POST path.
std::pair<std::string, std::string> split_endpoint(std::string endpoint) {
  if (endpoint.find("://") == std::string::npos) endpoint = "http://" + endpoint;
  const auto scheme_end = endpoint.find("://") + 3;
  const auto path_begin = endpoint.find('/', scheme_end);
  std::string base = endpoint.substr(0, path_begin);
  std::string prefix =
      path_begin == std::string::npos ? "" : endpoint.substr(path_begin);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base, prefix + "/score"};
}

}  // namespace

RemoteOracle::RemoteOracle(RemoteOracleConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw std::invalid_argument("empty endpoint");
  if (config_.batch_limit < 1) throw std::invalid_argument("batch limit must be >= 1");
  if (config_.num_classes < 2) throw std::invalid_argument("need at least two classes");
  if (config_.concurrency < 1) config_.concurrency = 1;
  std::tie(scheme_host_port_, path_) = split_endpoint(config_.endpoint);
}

RemoteOracle::~RemoteOracle() = default;

std::string RemoteOracle::encode_request(std::span<const Sentence> sentences) {
  Json body;
  body["sentences"] = Json::array();
  for (const auto& s : sentences) body["sentences"].push_back(s.to_utf8());
  return body.dump();
}

std::vector<ClassScores> RemoteOracle::parse_response(const std::string& body,
                                                      std::size_t expected_rows,
                                                      std::size_t num_classes) {
  auto schema_error = [&](const std::string& what) {
    return RemoteError(RemoteError::Kind::Schema, "malformed score response: " + what,
                       body);
  };
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw schema_error(e.what());
  }
  if (!doc.is_object() || !doc.contains("scores") || !doc["scores"].is_array()) {
    throw schema_error("missing \"scores\" array");
  }
  const auto& rows = doc["scores"];
  if (rows.size() != expected_rows) {
    throw schema_error("expected " + std::to_string(expected_rows) + " rows, got " +
                       std::to_string(rows.size()));
  }
  std::vector<ClassScores> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != num_classes) {
      throw schema_error("row does not hold " + std::to_string(num_classes) +
                         " scores");
    }
    std::vector<double> values;
    for (const auto& v : row) {
      if (!v.is_number()) throw schema_error("non-numeric score");
      values.push_back(v.get<double>());
    }
    try {
      out.emplace_back(std::move(values));
    } catch (const std::invalid_argument& e) {
      throw schema_error(e.what());
    }
  }
  return out;
}

std::vector<ClassScores> RemoteOracle::post(
    std::span<const Sentence> sentences) const {
  const std::string request = encode_request(sentences);
  httplib::Client client(scheme_host_port_);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);

  for (std::size_t attempt = 0;; ++attempt) {
    auto res = client.Post(path_, request, "application/json");
    if (!res) {
      if (attempt < config_.retries) continue;
      throw RemoteError(RemoteError::Kind::Transport,
                        "request to " + scheme_host_port_ + path_ + " failed: " +
                            httplib::to_string(res.error()),
                        httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
      throw RemoteError(RemoteError::Kind::HttpStatus,
                        "scoring server returned HTTP " + std::to_string(res->status),
                        res->body, res->status);
    }
    return parse_response(res->body, sentences.size(), config_.num_classes);
  }
}

std::vector<ClassScores> RemoteOracle::score_chunk(
    std::span<const Sentence> sentences) const {
  std::lock_guard lock(serial_);
  return post(sentences);
}

std::vector<std::vector<ClassScores>> RemoteOracle::score_chunks(
    std::span<const std::span<const Sentence>> chunks) const {
  if (config_.concurrency <= 1 || chunks.size() <= 1) {
    return ClassifierOracle::score_chunks(chunks);
  }
  std::vector<std::vector<ClassScores>> out(chunks.size());
  for (std::size_t begin = 0; begin < chunks.size(); begin += config_.concurrency) {
    const std::size_t end = std::min(chunks.size(), begin + config_.concurrency);
    std::vector<std::future<std::vector<ClassScores>>> inflight;
    for (std::size_t i = begin; i < end; ++i) {
      inflight.push_back(
          std::async(std::launch::async, [this, c = chunks[i]] { return post(c); }));
    }
    for (std::size_t i = begin; i < end; ++i) out[i] = inflight[i - begin].get();
  }
  return out;
}

std::vector<ClassScores> remote_score(const std::string& endpoint,
                                      std::span<const Sentence> sentences,
                                      std::size_t num_classes) {
  RemoteOracleConfig config;
  config.endpoint = endpoint;
  config.num_classes = num_classes;
  config.batch_limit = std::max<std::size_t>(1, sentences.size());
  return RemoteOracle(config).score_batch(sentences);
}

}  // namespace charmer
