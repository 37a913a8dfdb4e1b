#include "clarify/service.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include <httplib.h>

#include "clarify/errors.hpp"
#include "clarify/serialize.hpp"

namespace clarify {

namespace {

class NotFound : public Error {
 public:
  NotFound(const std::string& what, std::string code) : Error(what), code(std::move(code)) {}
  std::string code;
};

HttpResponse error_response(int status, std::string_view code, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  return {status, j.dump()};
}

HttpResponse json_response(const nlohmann::ordered_json& j) { return {200, j.dump()}; }

HttpResponse current_error() {
  try {
    throw;
  } catch (const NotFound& e) {
    return error_response(404, e.code, e.what());
  } catch (const DuplicateSubmissionError& e) {
    return error_response(409, "duplicate_submission", e.what());
  } catch (const InvalidAnswerError& e) {
    return error_response(400, "invalid_answer", e.what());
  } catch (const ProtocolError& e) {
    return error_response(409, "wrong_state", e.what());
  } catch (const ContradictionError& e) {
    return error_response(409, "contradiction", e.what());
  } catch (const ConfigError& e) {
    return error_response(400, "invalid_config", e.what());
  } catch (const CapacityError& e) {
    return error_response(400, "invalid_config", e.what());
  } catch (const Error& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

nlohmann::json parse_body(const std::string& body) {
  if (body.empty()) return nlohmann::json::object();
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw PreconditionError("request body must be a JSON object");
  return j;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    const auto j = path.find('/', i);
    const auto end = j == std::string_view::npos ? path.size() : j;
    if (end > i) parts.emplace_back(path.substr(i, end - i));
    i = end + 1;
  }
  return parts;
}

std::int64_t ticks(std::chrono::steady_clock::time_point t) { return t.time_since_epoch().count(); }

std::string key_of(const HttpRequest& request, const nlohmann::json& body) {
  if (!request.idempotency_key.empty()) return request.idempotency_key;
  if (auto it = body.find("idempotency_key"); it != body.end()) return it->get<std::string>();
  return {};
}

}  // namespace

ServiceOptions service_options_from_env() {
  ServiceOptions o;
  if (const char* d = std::getenv("CLARIFY_DEBUG")) o.debug = std::string_view(d) == "1" || std::string_view(d) == "true";
  if (const char* t = std::getenv("CLARIFY_IDLE_TIMEOUT_S")) o.idle_timeout = std::chrono::seconds(std::atoll(t));
  if (const char* l = std::getenv("CLARIFY_TRANSCRIPT_LOG")) o.transcript_log = l;
  o.id_seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
  return o;
}

std::pair<std::string, int> bind_address_from_env() {
  std::string bind = "127.0.0.1:8080";
  if (const char* b = std::getenv("CLARIFY_BIND")) bind = b;
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw ConfigError("CLARIFY_BIND must be host:port");
  return {bind.substr(0, colon), std::atoi(bind.c_str() + colon + 1)};
}

GameService::GameService(const Vocabulary& vocab, const Parser& parser, LearnedModels learned,
                         ServiceOptions options)
    : vocab_(&vocab), parser_(&parser), learned_(std::move(learned)), options_(std::move(options)) {}

std::size_t GameService::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::size_t GameService::expire_idle() {
  const auto now = ticks(options_.clock());
  const auto limit = std::chrono::duration_cast<std::chrono::steady_clock::duration>(options_.idle_timeout).count();
  std::lock_guard lock(mu_);
  std::size_t removed = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock s(it->second->mu, std::try_to_lock);
    if (s.owns_lock() && now - ticks(it->second->last_used) > limit) {
      s.unlock();
      expired_.insert(it->first);
      it = sessions_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

std::shared_ptr<GameService::Session> GameService::find(const std::string& id) {
  std::lock_guard lock(mu_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  if (expired_.contains(id)) throw NotFound("game '" + id + "' expired", "expired");
  throw NotFound("no game '" + id + "'", "not_found");
}

HttpResponse GameService::handle(const HttpRequest& request) {
  try {
    expire_idle();
    std::string path = request.path;
    bool debug = request.debug;
    if (const auto q = path.find('?'); q != std::string::npos) {
      const auto query = path.substr(q + 1);
      debug = debug || query.find("debug=1") != std::string::npos || query.find("debug=true") != std::string::npos;
      path.resize(q);
    }
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "v1" || parts[1] != "games")
      return error_response(404, "not_found", "no route for " + request.method + " " + path);
    const bool get = request.method == "GET", post = request.method == "POST";
    if (parts.size() == 2 && post) return create(request);
    if (parts.size() == 3 && get) return state(parts[2], debug);
    if (parts.size() == 4 && post && parts[3] == "answers") return answer(parts[2], request);
    if (parts.size() == 4 && post && parts[3] == "description") return describe(parts[2], request);
    if (parts.size() == 4 && get && parts[3] == "transcript") return transcript(parts[2]);
    return error_response(404, "not_found", "no route for " + request.method + " " + path);
  } catch (...) {
    return current_error();
  }
}

HttpResponse GameService::create(const HttpRequest& request) {
  nlohmann::json body;
  std::string key;
  try {
    body = parse_body(request.body);
    key = key_of(request, body);
  } catch (...) {
    return current_error();
  }
  std::lock_guard lock(mu_);
  if (!key.empty())
    if (auto it = create_replies_.find(key); it != create_replies_.end()) return it->second;

  HttpResponse reply;
  try {
    const std::uint64_t n = ++counter_;
    nlohmann::json config_json = nlohmann::json::object();
    config_json["answerer"] = "external";
    config_json["record_scores"] = options_.debug;
    config_json["k"] = 10;
    ContextMode mode = ContextMode::distinct;
    WorldConfig world = WorldConfig::shapes_only();
    std::uint64_t context_seed = derive_seed(options_.id_seed, {n, 1});
    std::optional<std::size_t> target;
    config_json["seed"] = derive_seed(options_.id_seed, {n, 3});
    for (const auto& [field, v] : body.items()) {
      if (field == "mode") {
        mode = context_mode_from_string(v.get<std::string>());
      } else if (field == "world") {
        const auto w = v.get<std::string>();
        if (w == "shapes_only") world = WorldConfig::shapes_only();
        else if (w == "relational") world = WorldConfig::relational();
        else throw ConfigError("unknown world '" + w + "'");
      } else if (field == "context_seed") {
        context_seed = v.get<std::uint64_t>();
      } else if (field == "target") {
        target = v.get<std::size_t>();
      } else if (field == "description_mode") {
        const auto m = v.get<std::string>();
        if (m != "none" && m != "provided") throw ConfigError("description_mode must be none or provided");
        config_json["with_description"] = m == "provided";
      } else if (field == "answerer") {
        throw ConfigError("service games are answered by the client");
      } else if (field != "idempotency_key") {
        config_json[field] = v;
      }
    }
    auto config = GameConfig::from_json(config_json);
    if (config.strategy == Strategy::binary_search_oracle)
      throw ConfigError("binary search asks membership queries that need the target, not a human answerer");
    if (config.belief_model == ModelKind::learned && !learned_.polar)
      throw ConfigError("the service was started without a trained answer model");
    const auto t = target.value_or(static_cast<std::size_t>(derive_seed(options_.id_seed, {n, 2}) % config.k));
    if (t >= config.k) throw ConfigError("target index out of range");

    auto context = gen_context(*vocab_, world, context_seed, config.k, mode);
    auto model = make_answer_model(config.belief_model, config.belief_epsilon, *vocab_, learned_);
    auto session = std::make_shared<Session>();
    session->game = std::make_unique<GameSession>(config, *vocab_, *parser_, std::move(context), t, std::move(model));
    session->last_used = options_.clock();

    char id[17];
    std::snprintf(id, sizeof id, "%016" PRIx64, derive_seed(options_.id_seed, {n, 0x6964}));
    sessions_[id] = session;
    log_if_finished(*session);
    reply = json_response(state_json(id, *session->game, false));
    reply.status = 201;
  } catch (...) {
    reply = current_error();
  }
  if (!key.empty()) create_replies_[key] = reply;
  return reply;
}

nlohmann::ordered_json GameService::state_json(const std::string& id, const GameSession& game, bool debug) const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["status"] = std::string(to_string(game.status()));
  j["turn"] = game.questions_asked();
  j["k"] = game.context().size();
  j["target"] = game.transcript().target;
  if (const auto* p = game.pending()) {
    auto& q = j["question"];
    q["text"] = p->text;
    q["kind"] = p->kind;
    q["answers"] = nlohmann::ordered_json::array();
    for (AnswerId a : p->answers) q["answers"].push_back(answer_to_string(a, *vocab_));
  } else {
    j["question"] = nullptr;
  }
  if (game.status() == SessionStatus::finished) {
    const auto& t = game.transcript();
    j["guess"] = t.guess;
    j["win"] = t.win;
    j["stop_reason"] = std::string(to_string(t.stop_reason));
  }
  j["scenes"] = nlohmann::ordered_json::array();
  for (const auto& scene : game.context().scenes) j["scenes"].push_back(nlohmann::ordered_json(render_spec(scene, *vocab_)));
  if (debug && options_.debug) {
    auto& d = j["debug"];
    d["posterior"] = game.belief().probs;
    const double h = entropy(game.belief(), EntropyUnit::nats);
    d["entropy_bits"] = h / std::numbers::ln2;
    d["scores"] = nlohmann::ordered_json::array();
    if (const auto* p = game.pending())
      for (const auto& s : p->scores)
        d["scores"].push_back({{"question", question_text(game.pool().at(s.index))},
                               {"eig_bits", (h - s.expected_surprisal) / std::numbers::ln2}});
  }
  return j;
}

HttpResponse GameService::state(const std::string& id, bool debug) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->last_used = options_.clock();
  return json_response(state_json(id, *s->game, debug));
}

template <class Fn>
HttpResponse GameService::mutate(const std::string& id, const HttpRequest& request, Fn fn) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->last_used = options_.clock();
  nlohmann::json body;
  std::string key;
  try {
    body = parse_body(request.body);
    key = key_of(request, body);
  } catch (...) {
    return current_error();
  }
  if (!key.empty())
    if (auto it = s->replies.find(key); it != s->replies.end()) return it->second;
  HttpResponse reply;
  try {
    fn(*s->game, body, key);
    reply = json_response(state_json(id, *s->game, false));
  } catch (...) {
    reply = current_error();
  }
  if (!key.empty()) s->replies.emplace(key, reply);
  log_if_finished(*s);
  return reply;
}

HttpResponse GameService::answer(const std::string& id, const HttpRequest& request) {
  return mutate(id, request, [](GameSession& game, const nlohmann::json& body, const std::string& key) {
    if (!body.contains("answer") || !body["answer"].is_string())
      throw InvalidAnswerError("body needs a string field \"answer\"");
    game.submit_answer(body["answer"].get<std::string>(), key);
  });
}

HttpResponse GameService::describe(const std::string& id, const HttpRequest& request) {
  return mutate(id, request, [](GameSession& game, const nlohmann::json& body, const std::string&) {
    if (!body.contains("text") || !body["text"].is_string())
      throw PreconditionError("body needs a string field \"text\"");
    game.provide_description(body["text"].get<std::string>());
  });
}

HttpResponse GameService::transcript(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->last_used = options_.clock();
  if (s->game->status() != SessionStatus::finished)
    return error_response(409, "wrong_state", "transcript is available once the game has finished");
  return {200, s->game->transcript().serialize(*vocab_), "application/x-ndjson"};
}

void GameService::log_if_finished(Session& s) {
  if (s.logged || options_.transcript_log.empty() || s.game->status() != SessionStatus::finished) return;
  s.logged = true;
  std::lock_guard lock(log_mu_);
  std::ofstream out(options_.transcript_log, std::ios::app);
  out << s.game->transcript().serialize(*vocab_);
}

struct HttpServer::Impl {
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(GameService& service) : impl_(std::make_unique<Impl>()) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    r.idempotency_key = req.get_header_value("Idempotency-Key");
    const auto debug = req.get_param_value("debug");
    r.debug = debug == "1" || debug == "true";
    const auto out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw ConfigError("cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace clarify
