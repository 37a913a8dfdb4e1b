#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clarify/answers.hpp"
#include "clarify/questions.hpp"
#include "clarify/scene.hpp"

namespace clarify {

enum class EntropyUnit { nats, bits };

/// Posterior over the scenes of a context; `step` counts applied updates.
struct Belief {
  std::vector<double> probs;
  int step = 0;

  std::size_t size() const noexcept { return probs.size(); }
  // Index of the largest probability; ties go to the lowest index.
  std::size_t argmax() const;
};

Belief init_uniform(std::size_t k);

/// p(y) proportional to caption_likelihood(description, y). Falls back to
/// uniform when no scene can have produced the description.
Belief init_from_description(const std::vector<std::string>& description, const Context& context,
                             const Vocabulary& vocab);

/// Bayes update with likelihoods p(a | q, y) from the model. A polar N/A
/// carries no information and leaves the probabilities unchanged. Throws
/// ContradictionError when every scene gets zero mass.
Belief update(const Belief& belief, const Question& q, AnswerId answer, const AnswerModel& model,
              const Context& context, const Vocabulary& vocab);

/// Same rule with the likelihood column already computed, one entry per scene.
Belief update_with_likelihood(const Belief& belief, std::span<const double> likelihood,
                              const std::string& what_for_errors);

double entropy(std::span<const double> probs, EntropyUnit unit);
inline double entropy(const Belief& belief, EntropyUnit unit) { return entropy(belief.probs, unit); }

void validate_belief(const Belief& belief, std::size_t k);

}  // namespace clarify
