#pragma once

// Loopback scoring server for remote-oracle tests.

#include <httplib.h>

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include <json.hpp>

namespace charmer::testing {

class StubServer {
 public:
  /// Receives the request body, returns (status, response body).
  using Handler = std::function<std::pair<int, std::string>(const std::string&)>;

  explicit StubServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      auto [status, body] = handler_(req.body);
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_; }

  /// Scores each sentence as [length, 10 - length] (two classes).
  static std::pair<int, std::string> length_scores(const std::string& body) {
    const auto req = nlohmann::json::parse(body);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : req["sentences"]) {
      const double len = static_cast<double>(s.get<std::string>().size());
      rows.push_back({len, 10.0 - len});
    }
    return {200, nlohmann::json{{"scores", rows}}.dump()};
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
};

}  // namespace charmer::testing
