#include "clarify/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clarify/captioner.hpp"
#include "clarify/errors.hpp"

namespace clarify {

std::size_t Belief::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

Belief init_uniform(std::size_t k) {
  if (k < 2) throw PreconditionError("a belief needs at least 2 scenes");
  return Belief{std::vector<double>(k, 1.0 / static_cast<double>(k)), 0};
}

Belief init_from_description(const std::vector<std::string>& description, const Context& context,
                             const Vocabulary& vocab) {
  Belief b = init_uniform(context.size());
  std::vector<double> lik(context.size());
  double total = 0.0;
  for (std::size_t i = 0; i < context.size(); ++i) {
    lik[i] = caption_likelihood(description, context.scenes[i], vocab);
    total += lik[i];
  }
  if (total <= 0.0) return b;
  for (std::size_t i = 0; i < lik.size(); ++i) b.probs[i] = lik[i] / total;
  return b;
}

Belief update_with_likelihood(const Belief& belief, std::span<const double> likelihood,
                              const std::string& what_for_errors) {
  if (likelihood.size() != belief.size()) throw PreconditionError("likelihood length does not match belief");
  Belief out{std::vector<double>(belief.size()), belief.step + 1};
  double total = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    out.probs[i] = belief.probs[i] * likelihood[i];
    total += out.probs[i];
  }
  if (!(total > 0.0)) throw ContradictionError("no scene is consistent with " + what_for_errors);
  for (double& p : out.probs) p /= total;
  return out;
}

Belief update(const Belief& belief, const Question& q, AnswerId answer, const AnswerModel& model,
              const Context& context, const Vocabulary& vocab) {
  validate_belief(belief, context.size());
  const auto space = answer_space(q, vocab);
  if (std::find(space.begin(), space.end(), answer) == space.end())
    throw PreconditionError("answer '" + answer_to_string(answer, vocab) + "' is not in the answer space of '" +
                            question_text(q) + "'");
  if (answer == kNotApplicable && question_kind(q) == QuestionKind::polar)
    return Belief{belief.probs, belief.step + 1};
  std::vector<double> lik(context.size());
  for (std::size_t i = 0; i < context.size(); ++i) lik[i] = model.predict(q, context, i).prob(answer);
  return update_with_likelihood(belief, lik,
                                "question '" + question_text(q) + "' answered '" + answer_to_string(answer, vocab) + "'");
}

double entropy(std::span<const double> probs, EntropyUnit unit) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return unit == EntropyUnit::bits ? h / std::numbers::ln2 : h;
}

void validate_belief(const Belief& belief, std::size_t k) {
  if (belief.size() != k) throw PreconditionError("belief size does not match the context");
  double total = 0.0;
  for (double p : belief.probs) {
    if (!(p >= 0.0)) throw PreconditionError("negative or NaN belief entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("belief does not sum to 1");
}

}  // namespace clarify
