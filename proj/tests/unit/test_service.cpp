#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "clarify/game.hpp"
#include "clarify/service.hpp"
#include "helpers.hpp"

using namespace clarify;

namespace {

struct Fixture {
  std::chrono::steady_clock::time_point now{};
  ServiceOptions options() {
    ServiceOptions o;
    o.debug = true;
    o.id_seed = 42;
    o.clock = [this] { return now; };
    return o;
  }
};

HttpResponse post(GameService& svc, const std::string& path, const nlohmann::json& body, std::string key = {}) {
  return svc.handle({"POST", path, body.dump(), std::move(key), false});
}

HttpResponse get(GameService& svc, const std::string& path, bool debug = false) {
  return svc.handle({"GET", path, "", "", debug});
}

nlohmann::json js(const HttpResponse& r) { return nlohmann::json::parse(r.body); }

}  // namespace

TEST_CASE("create and inspect a game") {
  Fixture f;
  GameService svc(testing::vocab(), testing::parser(), {}, f.options());
  const auto r = post(svc, "/v1/games", {{"k", 10}, {"context_seed", 3}});
  REQUIRE(r.status == 201);
  const auto j = js(r);
  CHECK(j["scenes"].size() == 10);
  CHECK(j["target"].get<int>() < 10);
  CHECK(j["status"] == "awaiting_answer");
  CHECK(j["turn"] == 0);
  CHECK(j["question"]["answers"] == nlohmann::json::array({"yes", "no", "N/A"}));
  CHECK_FALSE(j.contains("debug"));

  const auto id = j["id"].get<std::string>();
  const auto state = js(get(svc, "/v1/games/" + id));
  CHECK(state["question"]["text"] == j["question"]["text"]);
  const auto dbg = js(get(svc, "/v1/games/" + id, true));
  CHECK(dbg["debug"]["posterior"].size() == 10);
  CHECK(dbg["debug"]["entropy_bits"].get<double>() == doctest::Approx(std::log2(10.0)));
  CHECK_FALSE(dbg["debug"]["scores"].empty());
  CHECK(js(get(svc, "/v1/games/" + id + "?debug=1")).contains("debug"));
}

TEST_CASE("debug fields stay hidden unless the service allows them") {
  Fixture f;
  auto o = f.options();
  o.debug = false;
  GameService svc(testing::vocab(), testing::parser(), {}, o);
  const auto id = js(post(svc, "/v1/games", nlohmann::json::object()))["id"].get<std::string>();
  CHECK_FALSE(js(get(svc, "/v1/games/" + id, true)).contains("debug"));
}

TEST_CASE("invalid requests are structured errors") {
  Fixture f;
  GameService svc(testing::vocab(), testing::parser(), {}, f.options());
  auto r = post(svc, "/v1/games", {{"k", 1}});
  CHECK(r.status == 400);
  CHECK(js(r)["error"]["code"] == "invalid_config");
  CHECK(post(svc, "/v1/games", {{"strategy", "binary"}}).status == 400);
  CHECK(post(svc, "/v1/games", {{"belief_model", "learned"}}).status == 400);
  CHECK(post(svc, "/v1/games", {{"k", 100}, {"mode", "distinct"}}).status == 400);
  CHECK(svc.handle({"POST", "/v1/games", "{not json", "", false}).status == 400);
  CHECK(get(svc, "/v1/games/nope").status == 404);
  CHECK(js(get(svc, "/v1/games/nope"))["error"]["code"] == "not_found");
  CHECK(get(svc, "/v2/things").status == 404);
  CHECK(svc.session_count() == 0);
}

TEST_CASE("answers, idempotency and wrong-state errors") {
  Fixture f;
  GameService svc(testing::vocab(), testing::parser(), {}, f.options());
  const auto id = js(post(svc, "/v1/games", {{"context_seed", 9}}))["id"].get<std::string>();
  const auto path = "/v1/games/" + id;

  const auto bad = post(svc, path + "/answers", {{"answer", "maybe"}}, "k0");
  CHECK(bad.status == 400);
  CHECK(js(get(svc, path))["turn"] == 0);

  const double h0 = js(get(svc, path, true))["debug"]["entropy_bits"].get<double>();
  const auto first = post(svc, path + "/answers", {{"answer", "N/A"}}, "k1");
  REQUIRE(first.status == 200);
  CHECK(js(first)["turn"] == 1);
  CHECK(js(get(svc, path, true))["debug"]["entropy_bits"].get<double>() == h0);
  // Retrying with the same key returns the stored reply and changes nothing.
  CHECK(post(svc, path + "/answers", {{"answer", "yes"}}, "k1") == first);
  CHECK(js(get(svc, path))["turn"] == 1);
  CHECK(post(svc, path + "/answers", {{"answer", "yes"}, {"idempotency_key", "k1"}}) == first);

  CHECK(post(svc, path + "/description", {{"text", "a red square"}}).status == 409);
  CHECK(get(svc, path + "/transcript").status == 409);

  int turn = 1;
  while (js(get(svc, path))["status"] == "awaiting_answer") {
    const auto r = post(svc, path + "/answers", {{"answer", turn % 2 ? "no" : "yes"}}, "a" + std::to_string(turn));
    REQUIRE(r.status == 200);
    ++turn;
  }
  const auto done = js(get(svc, path));
  CHECK(done["status"] == "finished");
  CHECK(done.contains("guess"));
  CHECK(done.contains("win"));
  CHECK(post(svc, path + "/answers", {{"answer", "yes"}}, "late").status == 409);

  const auto t = get(svc, path + "/transcript");
  REQUIRE(t.status == 200);
  const auto parsed = Transcript::parse(t.body, testing::vocab());
  CHECK(parsed.serialize(testing::vocab()) == t.body);
  CHECK(static_cast<int>(parsed.turns.size()) == done["turn"].get<int>());
  CHECK(parsed.turns[0].answer == "N/A");
}

TEST_CASE("create is idempotent under a key") {
  Fixture f;
  GameService svc(testing::vocab(), testing::parser(), {}, f.options());
  const auto a = post(svc, "/v1/games", {{"k", 6}}, "c1");
  const auto b = post(svc, "/v1/games", {{"k", 6}}, "c1");
  CHECK(a == b);
  CHECK(svc.session_count() == 1);
}

TEST_CASE("description flow") {
  Fixture f;
  GameService svc(testing::vocab(), testing::parser(), {}, f.options());
  const auto j = js(post(svc, "/v1/games", {{"description_mode", "provided"}, {"context_seed", 4}}));
  CHECK(j["status"] == "awaiting_description");
  CHECK(j["question"].is_null());
  const auto path = "/v1/games/" + j["id"].get<std::string>();
  CHECK(post(svc, path + "/answers", {{"answer", "yes"}}).status == 409);
  CHECK(post(svc, path + "/description", {{"text", ""}}).status == 400);
  const auto r = post(svc, path + "/description", {{"text", "a square"}}, "d1");
  CHECK(r.status == 200);
  CHECK(js(r)["status"] != "awaiting_description");
  CHECK(post(svc, path + "/description", {{"text", "a square"}}, "d1") == r);
}

TEST_CASE("idle sessions expire") {
  Fixture f;
  auto o = f.options();
  o.idle_timeout = std::chrono::seconds(60);
  GameService svc(testing::vocab(), testing::parser(), {}, o);
  const auto id = js(post(svc, "/v1/games", nlohmann::json::object()))["id"].get<std::string>();
  f.now += std::chrono::seconds(30);
  CHECK(get(svc, "/v1/games/" + id).status == 200);
  f.now += std::chrono::seconds(59);
  CHECK(get(svc, "/v1/games/" + id).status == 200);
  f.now += std::chrono::seconds(61);
  const auto r = get(svc, "/v1/games/" + id);
  CHECK(r.status == 404);
  CHECK(js(r)["error"]["code"] == "expired");
  CHECK(svc.session_count() == 0);
}

TEST_CASE("concurrent sessions stay isolated") {
  Fixture f;
  GameService svc(testing::vocab(), testing::parser(), {}, f.options());
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i)
    ids.push_back(js(post(svc, "/v1/games", {{"context_seed", 100 + i}, {"seed", 7}}))["id"].get<std::string>());

  // Play each game alone first to get its reference transcript.
  GameService ref(testing::vocab(), testing::parser(), {}, f.options());
  std::vector<std::string> expected;
  for (int i = 0; i < 4; ++i) {
    const auto id = js(post(ref, "/v1/games", {{"context_seed", 100 + i}, {"seed", 7}}))["id"].get<std::string>();
    int turn = 0;
    while (js(get(ref, "/v1/games/" + id))["status"] == "awaiting_answer")
      post(ref, "/v1/games/" + id + "/answers", {{"answer", (turn++ + i) % 3 ? "no" : "yes"}});
    expected.push_back(get(ref, "/v1/games/" + id + "/transcript").body);
  }

  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&, i] {
      const auto path = "/v1/games/" + ids[static_cast<std::size_t>(i)];
      int turn = 0;
      while (js(get(svc, path))["status"] == "awaiting_answer") {
        const auto key = "t" + std::to_string(turn);
        const char* answer = (turn + i) % 3 ? "no" : "yes";
        post(svc, path + "/answers", {{"answer", answer}}, key);
        post(svc, path + "/answers", {{"answer", answer}}, key);  // retry
        ++turn;
      }
    });
  for (auto& t : threads) t.join();
  for (int i = 0; i < 4; ++i)
    CHECK(get(svc, "/v1/games/" + ids[static_cast<std::size_t>(i)] + "/transcript").body ==
          expected[static_cast<std::size_t>(i)]);
}

TEST_CASE("http round trip") {
  Fixture f;
  GameService svc(testing::vocab(), testing::parser(), {}, f.options());
  HttpServer server(svc);
  const int port = server.start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/v1/games", R"({"k": 8})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto id = nlohmann::json::parse(created->body)["id"].get<std::string>();
  httplib::Headers headers = {{"Idempotency-Key", "h1"}};
  auto a = client.Post("/v1/games/" + id + "/answers", headers, R"({"answer": "yes"})", "application/json");
  auto b = client.Post("/v1/games/" + id + "/answers", headers, R"({"answer": "no"})", "application/json");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->status == 200);
  CHECK(a->body == b->body);
  auto s = client.Get("/v1/games/" + id + "?debug=1");
  REQUIRE(s);
  CHECK(nlohmann::json::parse(s->body).contains("debug"));
  server.stop();
}
