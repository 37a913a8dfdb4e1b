#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "clarify/errors.hpp"
#include "clarify/features.hpp"
#include "clarify/logistic.hpp"
#include "clarify/selfsup.hpp"
#include "clarify/semantics.hpp"
#include "helpers.hpp"

using namespace clarify;

namespace {

std::vector<SparseExample> toy_examples(std::uint64_t seed, std::size_t n, std::size_t dim) {
  Rng rng(seed);
  std::vector<SparseExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    SparseExample e;
    for (std::uint32_t j = 0; j < dim; ++j)
      if (rng.bernoulli(0.4)) e.active.push_back(j);
    const bool first = !e.active.empty() && e.active.front() == 0;
    e.label = (first != rng.bernoulli(0.1)) ? 1.0 : 0.0;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

TEST_CASE("feature dimension and blocks") {
  const Featurizer f(testing::vocab());
  CHECK(f.dimension() == f.question_dims() * (1 + f.scene_dims()) + f.scene_dims());
  CHECK(f.feature_names().size() == f.dimension());
  const auto s = testing::scene({{"red", "square"}});
  const auto active = f.active("Is there a red square?", s);
  CHECK(std::is_sorted(active.begin(), active.end()));
  const auto dense = f.featurize("Is there a red square?", s);
  std::size_t ones = 0;
  for (double x : dense) ones += x == 1.0;
  CHECK(ones == active.size());
  // question words x scene features, plus both blocks on their own
  const auto qb = f.question_block("Is there a red square?");
  const auto sb = f.scene_block(s);
  CHECK(active.size() == qb.size() + sb.size() + qb.size() * sb.size());
  CHECK(f.question_block("Are there squares?") == f.question_block("are there square"));
  CHECK_THROWS_AS(f.active("Is there a red banana?", s), SemanticGapError);
}

TEST_CASE("cross-entropy gradient matches central differences") {
  const auto examples = toy_examples(4, 60, 12);
  Rng rng(8);
  std::vector<double> w(13);
  for (auto& x : w) x = rng.uniform01() - 0.5;
  const auto g = cross_entropy_gradient(w, examples);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto up = w, down = w;
    up[i] += h;
    down[i] -= h;
    const double fd = (mean_cross_entropy(up, examples) - mean_cross_entropy(down, examples)) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[i]));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("training lowers the loss monotonically and learns the rule") {
  const auto examples = toy_examples(5, 400, 10);
  const auto m = train_logistic(examples, 10, {0.5, 30, 16, 1});
  REQUIRE(m.epoch_losses.size() == 30);
  for (std::size_t i = 1; i < m.epoch_losses.size(); ++i) CHECK(m.epoch_losses[i] <= m.epoch_losses[i - 1] + 1e-12);
  std::size_t correct = 0;
  for (const auto& e : examples) correct += (m.probability(e.active) > 0.5) == (e.label > 0.5);
  CHECK(static_cast<double>(correct) / examples.size() > 0.85);
  const auto again = train_logistic(examples, 10, {0.5, 30, 16, 1});
  CHECK(again.weights == m.weights);
}

TEST_CASE("training rejects degenerate data") {
  CHECK_THROWS_AS(train_logistic({}, 3, {}), PreconditionError);
  std::vector<SparseExample> same = {{{0}, 1.0}, {{1}, 1.0}};
  CHECK_THROWS_AS(train_logistic(same, 3, {}), PreconditionError);
  std::vector<SparseExample> blowup = {{{0}, 1.0}, {{0}, 0.0}};
  CHECK_THROWS_AS(train_logistic(blowup, 1, {1e308, 2, 1, 0}), TrainingError);
}

TEST_CASE("model persistence round-trips") {
  const auto examples = toy_examples(6, 100, 5);
  auto m = train_logistic(examples, 5, {0.5, 5, 8, 2});
  std::stringstream buf;
  m.save(buf);
  const auto back = LogisticModel::load(buf);
  CHECK(back.weights == m.weights);
  CHECK(back.epochs == m.epochs);
  std::vector<double> x = {1, 0, 1, 0, 0};
  CHECK_THROWS_AS(m.logit_dense(std::vector<double>(4)), PreconditionError);
  CHECK(m.logit_dense(x) == doctest::Approx(m.logit(std::vector<std::uint32_t>{0, 2})));
  std::stringstream junk("not a model");
  CHECK_THROWS_AS(LogisticModel::load(junk), FormatError);
}

TEST_CASE("self-supervised labels come from provenance") {
  const auto& v = testing::vocab();
  const auto data = sample_captioned_scenes(v, WorldConfig::shapes_only(), 80, 2, 12);
  const auto set = gen_selfsup_data(data.scenes, data.captions, testing::parser(), v, 1, 3);
  CHECK(set.positives == set.negatives);
  CHECK(set.pairs.size() == set.positives + set.negatives);
  std::size_t fn = 0;
  for (const auto& p : set.pairs) {
    if (p.label) CHECK(eval_polar(p.scene, p.question, v));
    else fn += eval_polar(p.scene, p.question, v);
  }
  CHECK(fn == set.false_negatives);
  CHECK(set.false_negative_rate() < 0.5);

  std::stringstream buf;
  write_pairs(buf, set.pairs, v);
  const auto back = read_pairs(buf, testing::parser(), v);
  REQUIRE(back.size() == set.pairs.size());
  CHECK(back[3].question.text == set.pairs[3].question.text);
  CHECK(back[3].label == set.pairs[3].label);
  CHECK(back[3].scene == set.pairs[3].scene);
}

TEST_CASE("learned answerer beats chance on held-out scenes") {
  const auto& v = testing::vocab();
  const Featurizer f(v);
  const auto train = sample_captioned_scenes(v, WorldConfig::shapes_only(), 400, 2, 1);
  const auto test = sample_captioned_scenes(v, WorldConfig::shapes_only(), 100, 2, 2);
  const auto tr = gen_selfsup_data(train.scenes, train.captions, testing::parser(), v, 1, 1);
  const auto te = gen_selfsup_data(test.scenes, test.captions, testing::parser(), v, 1, 2);
  const auto model = train_answerer(tr.pairs, f, {});
  const auto ev = evaluate_answerer(model, f, te.pairs, v);
  CHECK(ev.count == te.pairs.size());
  CHECK(ev.accuracy_vs_ground_truth > 0.85);
}

TEST_CASE("what model predicts the object noun") {
  const auto& v = testing::vocab();
  const Featurizer f(v);
  const auto data = sample_captioned_scenes(v, WorldConfig::relational(), 600, 3, 4);
  const auto triples = gen_what_data(data.scenes, data.captions, testing::parser(), v, 1, 4);
  REQUIRE_FALSE(triples.empty());
  const auto model = train_what_model(triples, f, v, {0.5, 20, 32, 0});
  std::size_t correct = 0, total = 0;
  for (const auto& t : triples) {
    if (t.answer == kNotApplicable) continue;
    const auto d = model.predict(f, t.question, t.scene, v);
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.probs.size(); ++i)
      if (d.probs[i] > d.probs[best]) best = i;
    correct += d.support[best] == t.answer;
    ++total;
    CHECK_NOTHROW(d.validate());
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(total) > 0.5);
}
