#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clarify/features.hpp"
#include "clarify/logistic.hpp"
#include "clarify/questions.hpp"
#include "clarify/scene.hpp"

namespace clarify {

/// Answers are small integers: yes, no, N/A, then one id per answer word
/// (Vocabulary::answer_words order).
using AnswerId = int;
inline constexpr AnswerId kYes = 0;
inline constexpr AnswerId kNo = 1;
inline constexpr AnswerId kNotApplicable = 2;
inline constexpr AnswerId word_answer(std::size_t word_index) { return 3 + static_cast<AnswerId>(word_index); }

std::string answer_to_string(AnswerId answer, const Vocabulary& vocab);
// Accepts "yes", "no", "N/A" (also "n/a", "na"), or an answer word.
std::optional<AnswerId> answer_from_string(std::string_view token, const Vocabulary& vocab);

/// A(q): {yes, no, N/A} for polar questions; answer words plus N/A for `what`.
std::vector<AnswerId> answer_space(QuestionKind kind, const Vocabulary& vocab);
inline std::vector<AnswerId> answer_space(const Question& q, const Vocabulary& vocab) {
  return answer_space(question_kind(q), vocab);
}

struct AnswerDistribution {
  std::vector<AnswerId> support;
  std::vector<double> probs;

  double prob(AnswerId answer) const;
  // Throws PreconditionError unless probabilities are >= 0 and sum to 1 +- 1e-9.
  void validate() const;
};

/// p(a | q, y) for the scene at `scene_index` of the context.
class AnswerModel {
 public:
  virtual ~AnswerModel() = default;
  virtual AnswerDistribution predict(const Question& q, const Context& context, std::size_t scene_index) const = 0;
  virtual std::string name() const = 0;
};

// Polar ground truth: 1 - eps on the true answer, eps on the other, 0 on N/A.
AnswerDistribution oracle_predict(const PolarQuestion& q, const Scene& scene, double epsilon,
                                  const Vocabulary& vocab);

// "yes" with 1 - eps iff the question was derived from this scene.
AnswerDistribution heuristic_predict(const Question& q, int scene_id, double epsilon);

// 1 - eps on the true word (N/A when there is none), eps spread evenly
// over the rest of the support.
AnswerDistribution what_oracle_predict(const WhatQuestion& q, const Scene& scene, double epsilon,
                                       const Vocabulary& vocab);

// sigmoid(w . x) on yes, the complement on no, 0 on N/A.
AnswerDistribution learned_predict(const LogisticModel& model, const Featurizer& featurizer,
                                   const PolarQuestion& q, const Scene& scene);

/// One-vs-all stack of logistic heads, normalised with a softmax over their
/// logits. Classes are answer ids (words and N/A).
struct WhatModel {
  std::vector<AnswerId> classes;
  std::vector<LogisticModel> heads;

  AnswerDistribution predict(const Featurizer& featurizer, const WhatQuestion& q, const Scene& scene,
                             const Vocabulary& vocab) const;
};

class OracleAnswerModel final : public AnswerModel {
 public:
  OracleAnswerModel(const Vocabulary& vocab, double epsilon);
  AnswerDistribution predict(const Question& q, const Context& context, std::size_t scene_index) const override;
  std::string name() const override { return "oracle"; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  const Vocabulary* vocab_;
  double epsilon_;
};

/// Provenance heuristic. `what` questions derived from the scene get the
/// ground-truth word (the caption they came from states it); others get N/A.
class HeuristicAnswerModel final : public AnswerModel {
 public:
  HeuristicAnswerModel(const Vocabulary& vocab, double epsilon);
  AnswerDistribution predict(const Question& q, const Context& context, std::size_t scene_index) const override;
  std::string name() const override { return "heuristic"; }

 private:
  const Vocabulary* vocab_;
  double epsilon_;
};

/// Learned classifier. With epsilon > 0 the output is mixed with the
/// uniform answer, p' = eps + (1 - 2 eps) p, so that no answer is impossible.
class LearnedAnswerModel final : public AnswerModel {
 public:
  LearnedAnswerModel(const Vocabulary& vocab, std::shared_ptr<const LogisticModel> polar,
                     std::shared_ptr<const WhatModel> what, double epsilon);
  AnswerDistribution predict(const Question& q, const Context& context, std::size_t scene_index) const override;
  std::string name() const override { return "learned"; }

 private:
  const Vocabulary* vocab_;
  Featurizer featurizer_;
  std::shared_ptr<const LogisticModel> polar_;
  std::shared_ptr<const WhatModel> what_;
  double epsilon_;
};

void check_epsilon(double epsilon);

}  // namespace clarify
