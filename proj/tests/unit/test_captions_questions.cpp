#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "clarify/captioner.hpp"
#include "clarify/errors.hpp"
#include "clarify/questions.hpp"
#include "clarify/semantics.hpp"
#include "helpers.hpp"

using namespace clarify;

namespace {

// Caption probabilities worked out by hand from the template weights.
std::map<std::string, double> expected_distribution(const Scene& s) {
  const auto& v = testing::vocab();
  std::map<std::string, double> out;
  double rest = 1.0;
  if (!s.relations.empty()) {
    rest = 0.5;
    for (const auto& r : s.relations) {
      const auto& a = s.objects[static_cast<std::size_t>(r.subject_id)];
      const auto& b = s.objects[static_cast<std::size_t>(r.object_id)];
      out["a " + v.colors[a.color] + " " + v.shapes[a.shape] + " " + v.verbs[r.verb] + " a " + v.colors[b.color] +
          " " + v.shapes[b.shape]] += 0.5 / static_cast<double>(s.relations.size());
    }
  }
  const double each = rest / (2.0 * static_cast<double>(s.objects.size()));
  for (const auto& o : s.objects) {
    out["a " + v.colors[o.color] + " " + v.shapes[o.shape]] += each;
    out[std::string(indefinite_article(v.shapes[o.shape])) + " " + v.shapes[o.shape]] += each;
  }
  return out;
}

}  // namespace

TEST_CASE("caption distribution matches the template weights") {
  const std::vector<Scene> scenes = {
      testing::scene({{"red", "square"}}),
      testing::scene({{"red", "square"}, {"blue", "ellipse"}}),
      testing::scene({{"red", "square"}, {"red", "square"}}),
      testing::scene({{"red", "square"}, {"blue", "circle"}}, {{0, "touching", 1}}),
  };
  for (const auto& s : scenes) {
    const auto want = expected_distribution(s);
    const auto got = caption_distribution(s, testing::vocab());
    double total = 0.0;
    REQUIRE(got.size() == want.size());
    for (const auto& u : got) {
      const auto text = join_tokens(u.tokens);
      REQUIRE(want.count(text) == 1);
      CHECK(u.probability == doctest::Approx(want.at(text)).epsilon(1e-12));
      CHECK(caption_likelihood(u.tokens, s, testing::vocab()) == doctest::Approx(want.at(text)).epsilon(1e-12));
      total += u.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("caption likelihood of false or ungrammatical text is zero") {
  const auto s = testing::scene({{"red", "square"}});
  CHECK(caption_likelihood(tokenize("a red square"), s, testing::vocab()) == doctest::Approx(0.5));
  CHECK(caption_likelihood(tokenize("a blue square"), s, testing::vocab()) == 0.0);
  CHECK(caption_likelihood(tokenize("square red a"), s, testing::vocab()) == 0.0);
  CHECK(caption_likelihood(tokenize("a red shape"), s, testing::vocab()) == 0.0);
}

TEST_CASE("sampled captions are grammatical, true, and distinct") {
  const auto ctx = gen_context(testing::vocab(), WorldConfig::relational(), 4, 30, ContextMode::random);
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto caps = sample_captions(ctx.scenes[i], testing::vocab(), 3, 100 + i, static_cast<int>(i));
    CHECK(caps.size() == 3);
    std::set<std::string> seen;
    for (const auto& c : caps) {
      CHECK(c.scene_id == static_cast<int>(i));
      CHECK(seen.insert(c.text()).second);
      const auto tree = testing::parser().parse(c.tokens);
      const auto q = polar_from_np(np_subtrees(tree).front(), testing::vocab());
      CHECK(eval_polar(ctx.scenes[i], q, testing::vocab()));
    }
  }
  const auto single = testing::scene({{"red", "square"}});
  CHECK(sample_captions(single, testing::vocab(), 5, 1).size() == 2);
  CHECK(caption(single, testing::vocab(), 3).text() == caption(single, testing::vocab(), 3).text());
  CHECK_THROWS_AS(caption_context(testing::context({single, single}), testing::vocab(), 0, 1), ConfigError);
}

TEST_CASE("scenes without relations never produce a verb") {
  const auto s = testing::scene({{"red", "square"}, {"blue", "circle"}});
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (const auto& t : caption(s, testing::vocab(), seed).tokens) CHECK_FALSE(testing::vocab().verb_index(t));
}

TEST_CASE("polar questions from NP subtrees") {
  const auto tree = testing::parser().parse(tokenize("a red square touching a blue ellipse"));
  const auto nps = np_subtrees(tree);
  std::vector<std::string> texts;
  for (const auto& np : nps) texts.push_back(polar_from_np(np, testing::vocab()).text);
  CHECK(texts == std::vector<std::string>{"Is there a red square touching a blue ellipse?", "Is there a blue ellipse?",
                                          "Is there a red square?"});
  CHECK(polar_from_np(nps[2], testing::vocab()).from_stripped_np);
  CHECK(polar_from_np(testing::parser().parse(tokenize("an ellipse"), "NP"), testing::vocab()).text ==
        "Is there an ellipse?");
  CHECK(polar_from_np(testing::parser().parse(tokenize("some squares"), "NP"), testing::vocab()).text ==
        "Are there squares?");
}

TEST_CASE("question text parses back to the same predicate") {
  for (const char* text : {"Is there a red square?", "Is there an ellipse?", "Are there squares?",
                           "Is there a red shape?", "Is there a red square touching a blue ellipse?"}) {
    const auto q = parse_polar_question(text, testing::parser(), testing::vocab());
    CHECK(q.text == text);
    CHECK(polar_from_phrase(q.predicate, testing::vocab()).text == text);
  }
  CHECK_THROWS_AS(parse_polar_question("What is the square touching?", testing::parser(), testing::vocab()),
                  ParseError);
  try {
    parse_polar_question("Is there a red banana?", testing::parser(), testing::vocab());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.token_index() == 4);
  }
}

TEST_CASE("what questions come from participle phrases only") {
  const auto rel = testing::parser().parse(tokenize("a red square holding a blue circle"));
  const auto qs = what_from_caption(rel, testing::vocab());
  REQUIRE(qs.size() == 1);
  CHECK(qs[0].text == "What is the square holding?");
  CHECK(qs[0].nn == "square");
  CHECK(qs[0].vbg == "holding");
  CHECK(what_from_caption(testing::parser().parse(tokenize("a red square")), testing::vocab()).empty());
}

TEST_CASE("pool merges duplicate questions and keeps provenance") {
  std::vector<std::vector<Caption>> caps(2);
  caps[0] = {{tokenize("a red square"), 0, 0}, {tokenize("a square"), 0, 1}};
  caps[1] = {{tokenize("a red square touching a blue circle"), 1, 0}};
  const auto pool = build_pool(caps, testing::parser(), testing::vocab(), {true, false});
  std::vector<std::string> texts;
  for (const auto& q : pool.questions()) texts.push_back(question_text(q));
  CHECK(texts == std::vector<std::string>{"Is there a red square?", "Is there a square?",
                                          "Is there a red square touching a blue circle?", "Is there a blue circle?",
                                          "What is the square touching?"});
  const auto& red = question_provenance(pool.at(0));
  CHECK(red == std::vector<Provenance>{{0, 0}, {1, 0}});
  CHECK(derived_from_scene(pool.at(0), 1));
  CHECK_FALSE(derived_from_scene(pool.at(1), 1));
  CHECK(question_kind(pool.at(4)) == QuestionKind::what);
  CHECK(pool.find("Is there a square?") == 1u);
  CHECK_FALSE(pool.find("Is there a cross?"));

  const auto polar_only = build_pool(caps, testing::parser(), testing::vocab(), {false, false});
  CHECK(polar_only.size() == 4);
  const auto full = build_pool(caps, testing::parser(), testing::vocab(), {false, true});
  CHECK(full.full_caption());
  CHECK(full.size() == 3);
  CHECK(question_text(full.at(2)) == "Is there a red square touching a blue circle?");

  CHECK(pool.dump().find("Is there a red square?\tpolar\t0:0,1:0\n") == 0);
}

TEST_CASE("marking questions asked") {
  std::vector<std::vector<Caption>> caps = {{{tokenize("a red square"), 0, 0}}, {{tokenize("a circle"), 1, 0}}};
  auto pool = build_pool(caps, testing::parser(), testing::vocab(), {});
  CHECK(pool.unasked_count() == 2);
  pool.mark_asked(1);
  CHECK(pool.is_asked(1));
  CHECK(pool.unasked_count() == 1);
  CHECK_THROWS(build_pool({{}, {}}, testing::parser(), testing::vocab(), {}));
}
