#include <doctest.h>

#include <cmath>

#include "clarify/answers.hpp"
#include "clarify/errors.hpp"
#include "clarify/semantics.hpp"
#include "helpers.hpp"

using namespace clarify;

namespace {

PolarQuestion ask(const char* text) { return parse_polar_question(text, testing::parser(), testing::vocab()); }

WhatQuestion what(const char* nn, const char* vbg) {
  WhatQuestion q;
  q.nn = nn;
  q.vbg = vbg;
  q.text = what_text(nn, vbg);
  return q;
}

}  // namespace

TEST_CASE("polar ground truth") {
  const auto& v = testing::vocab();
  const auto red_square = testing::scene({{"red", "square"}});
  CHECK(eval_polar(red_square, ask("Is there a red square?"), v));
  CHECK_FALSE(eval_polar(red_square, ask("Is there a blue circle?"), v));
  CHECK(eval_polar(red_square, ask("Is there a square?"), v));
  CHECK(eval_polar(red_square, ask("Is there a red shape?"), v));
  CHECK_FALSE(eval_polar(red_square, ask("Is there a blue shape?"), v));
  CHECK(eval_polar(red_square, ask("Are there squares?"), v));

  const auto related = testing::scene({{"red", "square"}, {"blue", "circle"}}, {{0, "touching", 1}});
  const auto unrelated = testing::scene({{"red", "square"}, {"blue", "circle"}});
  const auto q = ask("Is there a red square touching a blue circle?");
  CHECK(eval_polar(related, q, v));
  CHECK_FALSE(eval_polar(unrelated, q, v));
  CHECK_FALSE(eval_polar(related, ask("Is there a blue circle touching a red square?"), v));
  CHECK_FALSE(eval_polar(related, ask("Is there a red square holding a blue circle?"), v));
}

TEST_CASE("relational truth agrees with enumerating relation bindings") {
  const auto& v = testing::vocab();
  const auto ctx = gen_context(v, WorldConfig{2, 3, 0.8}, 21, 60, ContextMode::random);
  for (const auto& s : ctx.scenes)
    for (const auto& c : v.colors)
      for (const auto& verb : v.verbs) {
        const auto q = ask(("Is there a " + c + " square " + verb + " a circle?").c_str());
        bool expected = false;
        for (const auto& r : s.relations) {
          const auto& a = s.objects[static_cast<std::size_t>(r.subject_id)];
          const auto& b = s.objects[static_cast<std::size_t>(r.object_id)];
          expected = expected || (v.colors[a.color] == c && v.shapes[a.shape] == "square" && v.verbs[r.verb] == verb &&
                                  v.shapes[b.shape] == "circle");
        }
        CHECK(eval_polar(s, q, v) == expected);
      }
}

TEST_CASE("out-of-vocabulary predicates are semantic gaps") {
  PolarQuestion q = ask("Is there a red square?");
  q.predicate.color = "mauve";
  CHECK_THROWS_AS(eval_polar(testing::scene({{"red", "square"}}), q, testing::vocab()), SemanticGapError);
}

TEST_CASE("what ground truth") {
  const auto& v = testing::vocab();
  const auto s = testing::scene({{"red", "square"}, {"blue", "circle"}}, {{0, "holding", 1}});
  CHECK(eval_what(s, what("square", "holding"), v) == "circle");
  CHECK_FALSE(eval_what(s, what("square", "touching"), v));
  CHECK_FALSE(eval_what(s, what("circle", "holding"), v));
}

TEST_CASE("answer tokens") {
  const auto& v = testing::vocab();
  CHECK(answer_from_string("yes", v) == kYes);
  CHECK(answer_from_string("N/A", v) == kNotApplicable);
  CHECK(answer_from_string("na", v) == kNotApplicable);
  CHECK_FALSE(answer_from_string("maybe", v));
  CHECK(answer_to_string(*answer_from_string("circle", v), v) == "circle");
  CHECK(answer_space(QuestionKind::polar, v).size() == 3);
  CHECK(answer_space(QuestionKind::what, v).size() == v.answer_words().size() + 1);
}

TEST_CASE("oracle distributions") {
  const auto& v = testing::vocab();
  const auto s = testing::scene({{"red", "square"}});
  const auto d = oracle_predict(ask("Is there a red square?"), s, 0.1, v);
  CHECK_NOTHROW(d.validate());
  CHECK(d.prob(kYes) == doctest::Approx(0.9));
  CHECK(d.prob(kNo) == doctest::Approx(0.1));
  CHECK(d.prob(kNotApplicable) == 0.0);
  CHECK(oracle_predict(ask("Is there a cross?"), s, 0.0, v).prob(kNo) == 1.0);
  CHECK_THROWS_AS(OracleAnswerModel(v, 0.5), PreconditionError);
  CHECK_THROWS_AS(OracleAnswerModel(v, -0.1), PreconditionError);
}

TEST_CASE("what oracle spreads epsilon over the remaining answers") {
  const auto& v = testing::vocab();
  const auto s = testing::scene({{"red", "square"}, {"blue", "circle"}}, {{0, "holding", 1}});
  const auto d = what_oracle_predict(what("square", "holding"), s, 0.2, v);
  CHECK_NOTHROW(d.validate());
  CHECK(d.prob(*answer_from_string("circle", v)) == doctest::Approx(0.8));
  const double rest = 0.2 / static_cast<double>(d.support.size() - 1);
  CHECK(d.prob(kNotApplicable) == doctest::Approx(rest));
  const auto none = what_oracle_predict(what("circle", "holding"), s, 0.0, v);
  CHECK(none.prob(kNotApplicable) == 1.0);
}

TEST_CASE("heuristic answers by provenance") {
  const auto& v = testing::vocab();
  auto q = ask("Is there a red square?");
  q.provenance = {{2, 0}};
  CHECK(heuristic_predict(q, 2, 0.0).prob(kYes) == 1.0);
  CHECK(heuristic_predict(q, 1, 0.0).prob(kNo) == 1.0);
  const HeuristicAnswerModel model(v, 0.05);
  const auto ctx = testing::context({testing::scene({{"red", "square"}}), testing::scene({{"red", "square"}}),
                                     testing::scene({{"red", "square"}})});
  CHECK(model.predict(q, ctx, 2).prob(kYes) == doctest::Approx(0.95));
  // Scene 0 is identical but the question was not derived from it.
  CHECK(model.predict(q, ctx, 0).prob(kYes) == doctest::Approx(0.05));
}
