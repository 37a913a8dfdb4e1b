#include "clarify/selfsup.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "clarify/errors.hpp"
#include "clarify/rng.hpp"
#include "clarify/semantics.hpp"
#include "clarify/serialize.hpp"

namespace clarify {

namespace {

// Decomposed polar questions of one scene, unique by text, in caption order.
std::vector<PolarQuestion> scene_questions(const std::vector<Caption>& caps, const Parser& parser,
                                           const Vocabulary& vocab) {
  std::vector<PolarQuestion> out;
  std::map<std::string, bool> seen;
  for (const auto& cap : caps)
    for (const auto& np : np_subtrees(parser.parse(cap.tokens))) {
      auto q = polar_from_np(np, vocab);
      if (seen.emplace(q.text, true).second) out.push_back(std::move(q));
    }
  return out;
}

std::size_t other_index(Rng& rng, std::size_t n, std::size_t self) {
  std::size_t j = rng.uniform_index(n - 1);
  return j >= self ? j + 1 : j;
}

}  // namespace

SelfSupDataset gen_selfsup_data(const std::vector<Scene>& scenes, const std::vector<std::vector<Caption>>& captions,
                                const Parser& parser, const Vocabulary& vocab, std::size_t negatives_per_positive,
                                std::uint64_t seed) {
  if (scenes.size() < 2) throw PreconditionError("self-supervised data needs at least 2 scenes");
  if (captions.size() != scenes.size()) throw PreconditionError("one caption list per scene is required");
  std::vector<std::vector<PolarQuestion>> questions;
  questions.reserve(scenes.size());
  for (const auto& caps : captions) {
    questions.push_back(scene_questions(caps, parser, vocab));
    if (questions.back().empty()) throw ConfigError("scene without caption-derived questions");
  }

  Rng rng(derive_seed(seed, {0x73656c66ULL}));
  SelfSupDataset data;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    for (const auto& q : questions[i]) {
      data.pairs.push_back({q, scenes[i], true});
      ++data.positives;
      for (std::size_t r = 0; r < negatives_per_positive; ++r) {
        const std::size_t j = other_index(rng, scenes.size(), i);
        const auto& pick = questions[j][rng.uniform_index(questions[j].size())];
        data.pairs.push_back({pick, scenes[i], false});
        ++data.negatives;
        if (eval_polar(scenes[i], pick, vocab)) ++data.false_negatives;
      }
    }
  }
  return data;
}

CaptionedScenes sample_captioned_scenes(const Vocabulary& vocab, const WorldConfig& world, std::size_t n,
                                        std::size_t per_scene, std::uint64_t seed) {
  world.validate();
  Rng rng(derive_seed(seed, {0x7363656eULL}));
  CaptionedScenes out;
  for (std::size_t i = 0; i < n; ++i) {
    out.scenes.push_back(random_scene(vocab, world, rng));
    out.captions.push_back(sample_captions(out.scenes.back(), vocab, per_scene, derive_seed(seed, {i, 1}),
                                           static_cast<int>(i)));
  }
  return out;
}

std::vector<SparseExample> to_examples(const std::vector<LabeledPair>& pairs, const Featurizer& featurizer) {
  std::vector<SparseExample> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({featurizer.active(p.question.text, p.scene), p.label ? 1.0 : 0.0});
  return out;
}

LogisticModel train_answerer(const std::vector<LabeledPair>& pairs, const Featurizer& featurizer,
                             const TrainingOptions& options) {
  const auto examples = to_examples(pairs, featurizer);
  auto model = train_logistic(examples, featurizer.dimension(), options);
  model.feature_names = featurizer.feature_names();
  return model;
}

AnswererEvaluation evaluate_answerer(const LogisticModel& model, const Featurizer& featurizer,
                                     const std::vector<LabeledPair>& pairs, const Vocabulary& vocab) {
  AnswererEvaluation ev;
  ev.count = pairs.size();
  if (pairs.empty()) return ev;
  std::size_t agree_label = 0, agree_truth = 0;
  for (const auto& p : pairs) {
    const bool predicted = learned_predict(model, featurizer, p.question, p.scene).prob(kYes) > 0.5;
    agree_label += predicted == p.label;
    agree_truth += predicted == eval_polar(p.scene, p.question, vocab);
  }
  ev.accuracy_vs_labels = static_cast<double>(agree_label) / static_cast<double>(pairs.size());
  ev.accuracy_vs_ground_truth = static_cast<double>(agree_truth) / static_cast<double>(pairs.size());
  return ev;
}

std::vector<WhatTriple> gen_what_data(const std::vector<Scene>& scenes, const std::vector<std::vector<Caption>>& captions,
                                      const Parser& parser, const Vocabulary& vocab,
                                      std::size_t negatives_per_positive, std::uint64_t seed) {
  if (scenes.size() < 2) throw PreconditionError("what data needs at least 2 scenes");
  if (captions.size() != scenes.size()) throw PreconditionError("one caption list per scene is required");
  // Per scene: (question, answer word read off the caption).
  std::vector<std::vector<std::pair<WhatQuestion, AnswerId>>> own(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    std::map<std::string, bool> seen;
    for (const auto& cap : captions[i]) {
      const auto tree = parser.parse(cap.tokens);
      // The first NP carrying a participle pairs with its embedded object.
      std::vector<const ParseTree*> stack{&tree};
      while (!stack.empty()) {
        const ParseTree* t = stack.back();
        stack.pop_back();
        if (t->label == "NP" && t->child("PARTP")) {
          const auto np = noun_phrase_from_tree(*t, vocab);
          WhatQuestion q;
          q.nn = np.noun;
          q.vbg = np.participle->verb;
          q.text = what_text(q.nn, q.vbg);
          q.provenance = {{static_cast<int>(i), cap.caption_id}};
          const auto answer = answer_from_string(np.participle->object.front().noun, vocab);
          if (answer && seen.emplace(q.text, true).second) own[i].emplace_back(std::move(q), *answer);
        }
        for (auto it = t->children.rbegin(); it != t->children.rend(); ++it) stack.push_back(&*it);
      }
    }
  }
  std::vector<std::size_t> donors;
  for (std::size_t i = 0; i < scenes.size(); ++i)
    if (!own[i].empty()) donors.push_back(i);

  Rng rng(derive_seed(seed, {0x77686174ULL}));
  std::vector<WhatTriple> out;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    for (const auto& [q, answer] : own[i]) {
      out.push_back({q, scenes[i], answer});
      for (std::size_t r = 0; r < negatives_per_positive; ++r) {
        if (donors.size() < 2) break;
        std::size_t j = i;
        while (j == i) j = donors[rng.uniform_index(donors.size())];
        const auto& pick = own[j][rng.uniform_index(own[j].size())];
        out.push_back({pick.first, scenes[i], kNotApplicable});
      }
    }
  }
  return out;
}

WhatModel train_what_model(const std::vector<WhatTriple>& triples, const Featurizer& featurizer,
                           const Vocabulary& vocab, const TrainingOptions& options) {
  if (triples.empty()) throw PreconditionError("no what-question training data");
  std::vector<std::vector<std::uint32_t>> features;
  features.reserve(triples.size());
  for (const auto& t : triples) features.push_back(featurizer.active(t.question.text, t.scene));

  WhatModel model;
  for (AnswerId cls : answer_space(QuestionKind::what, vocab)) {
    std::vector<SparseExample> examples;
    examples.reserve(triples.size());
    bool any = false;
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const bool pos = triples[i].answer == cls;
      any = any || pos;
      examples.push_back({features[i], pos ? 1.0 : 0.0});
    }
    if (!any) continue;  // class never observed; it keeps zero probability
    if (std::all_of(examples.begin(), examples.end(), [](const auto& e) { return e.label > 0.5; })) continue;
    model.classes.push_back(cls);
    model.heads.push_back(train_logistic(examples, featurizer.dimension(), options));
  }
  if (model.heads.empty()) throw TrainingError("what-question data has a single class", 0);
  return model;
}

void write_pairs(std::ostream& out, const std::vector<LabeledPair>& pairs, const Vocabulary& vocab) {
  for (const auto& p : pairs) {
    nlohmann::json j = {{"question", p.question.text},
                        {"scene", scene_to_json(p.scene, vocab)},
                        {"label", p.label ? "yes" : "no"}};
    out << j.dump() << '\n';
  }
}

std::vector<LabeledPair> read_pairs(std::istream& in, const Parser& parser, const Vocabulary& vocab) {
  std::vector<LabeledPair> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      LabeledPair p;
      p.question = parse_polar_question(j.at("question").get<std::string>(), parser, vocab);
      p.scene = scene_from_json(j.at("scene"), vocab);
      const auto label = j.at("label").get<std::string>();
      if (label != "yes" && label != "no") throw FormatError("label must be yes or no");
      p.label = label == "yes";
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad labelled pair: ") + e.what());
    }
  }
  return out;
}

}  // namespace clarify
