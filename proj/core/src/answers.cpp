#include "clarify/answers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "clarify/errors.hpp"
#include "clarify/semantics.hpp"

namespace clarify {

std::string answer_to_string(AnswerId answer, const Vocabulary& vocab) {
  switch (answer) {
    case kYes: return "yes";
    case kNo: return "no";
    case kNotApplicable: return "N/A";
    default: break;
  }
  const auto words = vocab.answer_words();
  const auto idx = static_cast<std::size_t>(answer - word_answer(0));
  if (answer < word_answer(0) || idx >= words.size()) throw PreconditionError("unknown answer id");
  return words[idx];
}

std::optional<AnswerId> answer_from_string(std::string_view token, const Vocabulary& vocab) {
  std::string t;
  for (char c : token) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "yes") return kYes;
  if (t == "no") return kNo;
  if (t == "n/a" || t == "na") return kNotApplicable;
  const auto words = vocab.answer_words();
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i] == t) return word_answer(i);
  return std::nullopt;
}

std::vector<AnswerId> answer_space(QuestionKind kind, const Vocabulary& vocab) {
  if (kind == QuestionKind::polar) return {kYes, kNo, kNotApplicable};
  std::vector<AnswerId> out;
  const std::size_t n = vocab.answer_words().size();
  for (std::size_t i = 0; i < n; ++i) out.push_back(word_answer(i));
  out.push_back(kNotApplicable);
  return out;
}

double AnswerDistribution::prob(AnswerId answer) const {
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] == answer) return probs[i];
  return 0.0;
}

void AnswerDistribution::validate() const {
  if (support.size() != probs.size()) throw PreconditionError("support and probabilities differ in length");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw PreconditionError("negative or NaN answer probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("answer probabilities do not sum to 1");
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw PreconditionError("answer noise must lie in [0, 0.5)");
}

AnswerDistribution oracle_predict(const PolarQuestion& q, const Scene& scene, double epsilon,
                                  const Vocabulary& vocab) {
  check_epsilon(epsilon);
  const bool yes = eval_polar(scene, q, vocab);
  return {{kYes, kNo, kNotApplicable}, {yes ? 1.0 - epsilon : epsilon, yes ? epsilon : 1.0 - epsilon, 0.0}};
}

AnswerDistribution heuristic_predict(const Question& q, int scene_id, double epsilon) {
  check_epsilon(epsilon);
  const bool yes = derived_from_scene(q, scene_id);
  return {{kYes, kNo, kNotApplicable}, {yes ? 1.0 - epsilon : epsilon, yes ? epsilon : 1.0 - epsilon, 0.0}};
}

namespace {

AnswerDistribution peaked(std::vector<AnswerId> support, AnswerId truth, double epsilon) {
  AnswerDistribution d;
  const double rest = support.size() > 1 ? epsilon / static_cast<double>(support.size() - 1) : 0.0;
  d.probs.reserve(support.size());
  for (auto a : support) d.probs.push_back(a == truth ? 1.0 - epsilon : rest);
  d.support = std::move(support);
  return d;
}

AnswerId what_truth(const WhatQuestion& q, const Scene& scene, const Vocabulary& vocab) {
  const auto word = eval_what(scene, q, vocab);
  if (!word) return kNotApplicable;
  auto id = answer_from_string(*word, vocab);
  return id ? *id : kNotApplicable;
}

}  // namespace

AnswerDistribution what_oracle_predict(const WhatQuestion& q, const Scene& scene, double epsilon,
                                       const Vocabulary& vocab) {
  check_epsilon(epsilon);
  return peaked(answer_space(QuestionKind::what, vocab), what_truth(q, scene, vocab), epsilon);
}

AnswerDistribution learned_predict(const LogisticModel& model, const Featurizer& featurizer,
                                   const PolarQuestion& q, const Scene& scene) {
  if (model.dimension() != featurizer.dimension())
    throw PreconditionError("model dimension " + std::to_string(model.dimension()) + " does not match features " +
                            std::to_string(featurizer.dimension()));
  const double p = model.probability(featurizer.active(q.text, scene));
  return {{kYes, kNo, kNotApplicable}, {p, 1.0 - p, 0.0}};
}

AnswerDistribution WhatModel::predict(const Featurizer& featurizer, const WhatQuestion& q, const Scene& scene,
                                      const Vocabulary& vocab) const {
  const auto active = featurizer.active(q.text, scene);
  std::vector<double> logits(heads.size());
  for (std::size_t i = 0; i < heads.size(); ++i) logits[i] = heads[i].logit(active);
  const double top = logits.empty() ? 0.0 : *std::max_element(logits.begin(), logits.end());

  AnswerDistribution d;
  d.support = answer_space(QuestionKind::what, vocab);
  d.probs.assign(d.support.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    const auto pos = std::find(d.support.begin(), d.support.end(), classes[i]);
    if (pos == d.support.end()) continue;
    const double e = std::exp(logits[i] - top);
    d.probs[static_cast<std::size_t>(pos - d.support.begin())] = e;
    total += e;
  }
  if (total <= 0.0) return peaked(d.support, kNotApplicable, 0.0);
  for (double& p : d.probs) p /= total;
  return d;
}

OracleAnswerModel::OracleAnswerModel(const Vocabulary& vocab, double epsilon) : vocab_(&vocab), epsilon_(epsilon) {
  check_epsilon(epsilon);
}

AnswerDistribution OracleAnswerModel::predict(const Question& q, const Context& context,
                                              std::size_t scene_index) const {
  const Scene& scene = context.scenes.at(scene_index);
  if (const auto* polar = std::get_if<PolarQuestion>(&q)) return oracle_predict(*polar, scene, epsilon_, *vocab_);
  return what_oracle_predict(std::get<WhatQuestion>(q), scene, epsilon_, *vocab_);
}

HeuristicAnswerModel::HeuristicAnswerModel(const Vocabulary& vocab, double epsilon)
    : vocab_(&vocab), epsilon_(epsilon) {
  check_epsilon(epsilon);
}

AnswerDistribution HeuristicAnswerModel::predict(const Question& q, const Context& context,
                                                 std::size_t scene_index) const {
  const int id = static_cast<int>(scene_index);
  if (std::holds_alternative<PolarQuestion>(q)) return heuristic_predict(q, id, epsilon_);
  const auto& what = std::get<WhatQuestion>(q);
  const AnswerId truth =
      derived_from_scene(q, id) ? what_truth(what, context.scenes.at(scene_index), *vocab_) : kNotApplicable;
  return peaked(answer_space(QuestionKind::what, *vocab_), truth, epsilon_);
}

LearnedAnswerModel::LearnedAnswerModel(const Vocabulary& vocab, std::shared_ptr<const LogisticModel> polar,
                                       std::shared_ptr<const WhatModel> what, double epsilon)
    : vocab_(&vocab), featurizer_(vocab), polar_(std::move(polar)), what_(std::move(what)), epsilon_(epsilon) {
  check_epsilon(epsilon);
  if (!polar_) throw ConfigError("learned answer model needs a polar classifier");
  if (polar_->dimension() != featurizer_.dimension())
    throw ConfigError("classifier dimension does not match the feature map");
}

AnswerDistribution LearnedAnswerModel::predict(const Question& q, const Context& context,
                                               std::size_t scene_index) const {
  const Scene& scene = context.scenes.at(scene_index);
  AnswerDistribution d;
  if (const auto* polar = std::get_if<PolarQuestion>(&q)) {
    d = learned_predict(*polar_, featurizer_, *polar, scene);
  } else {
    if (!what_) throw ConfigError("learned answer model has no `what` classifier");
    d = what_->predict(featurizer_, std::get<WhatQuestion>(q), scene, *vocab_);
  }
  if (epsilon_ > 0.0) {
    // Mix towards uniform over the answers the question type can produce.
    const double live = d.support.size() == 3 ? 2.0 : static_cast<double>(d.support.size());
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
      if (d.support.size() == 3 && d.support[i] == kNotApplicable) continue;
      d.probs[i] = epsilon_ * 2.0 / live + (1.0 - 2.0 * epsilon_) * d.probs[i];
    }
  }
  return d;
}

}  // namespace clarify
