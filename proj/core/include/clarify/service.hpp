#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "clarify/game.hpp"
#include "clarify/grammar.hpp"
#include "clarify/scene.hpp"

namespace clarify {

struct ServiceOptions {
  // Allows posterior, entropy and candidate scores in state responses.
  bool debug = false;
  std::chrono::seconds idle_timeout{30 * 60};
  // Appends each finished game's transcript when non-empty.
  std::string transcript_log;
  std::uint64_t id_seed = 0;
  std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

/// Reads CLARIFY_DEBUG, CLARIFY_IDLE_TIMEOUT_S and CLARIFY_TRANSCRIPT_LOG.
ServiceOptions service_options_from_env();

// "host:port" from CLARIFY_BIND, default 127.0.0.1:8080.
std::pair<std::string, int> bind_address_from_env();

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
  std::string idempotency_key;  // Idempotency-Key header
  bool debug = false;           // ?debug=1
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";

  friend bool operator==(const HttpResponse&, const HttpResponse&) = default;
};

/// Game sessions behind the /v1/ API.
///
///   POST /v1/games                       create
///   GET  /v1/games/{id}                  state
///   POST /v1/games/{id}/answers          {"answer": "yes"}
///   POST /v1/games/{id}/description      {"text": "a red square"}
///   GET  /v1/games/{id}/transcript       finished games only
///
/// Errors are {"error": {"code": ..., "message": ...}} with 400 (bad
/// request), 404 (unknown or expired game) or 409 (wrong game state).
/// Mutations carrying an idempotency key (header or "idempotency_key" body
/// field) return the stored response when retried.
class GameService {
 public:
  GameService(const Vocabulary& vocab, const Parser& parser, LearnedModels learned, ServiceOptions options);

  HttpResponse handle(const HttpRequest& request);

  // Drops sessions idle for longer than the timeout; returns how many.
  std::size_t expire_idle();
  std::size_t session_count() const;

 private:
  struct Session {
    std::mutex mu;
    std::unique_ptr<GameSession> game;
    std::chrono::steady_clock::time_point last_used;
    std::map<std::string, HttpResponse, std::less<>> replies;
    bool logged = false;
  };

  HttpResponse create(const HttpRequest& request);
  HttpResponse state(const std::string& id, bool debug);
  HttpResponse answer(const std::string& id, const HttpRequest& request);
  HttpResponse describe(const std::string& id, const HttpRequest& request);
  HttpResponse transcript(const std::string& id);

  std::shared_ptr<Session> find(const std::string& id);
  nlohmann::ordered_json state_json(const std::string& id, const GameSession& game, bool debug) const;
  void log_if_finished(Session& s);
  template <class Fn>
  HttpResponse mutate(const std::string& id, const HttpRequest& request, Fn fn);

  const Vocabulary* vocab_;
  const Parser* parser_;
  LearnedModels learned_;
  ServiceOptions options_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::set<std::string> expired_;
  std::map<std::string, HttpResponse> create_replies_;
  std::uint64_t counter_ = 0;
  std::mutex log_mu_;
};

/// Serves a GameService over HTTP on a background thread.
class HttpServer {
 public:
  explicit HttpServer(GameService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port.
  int start(const std::string& host, int port);
  // Blocks until stop() is called from elsewhere.
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace clarify
