#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clarify/answers.hpp"
#include "clarify/belief.hpp"
#include "clarify/questions.hpp"
#include "clarify/scene.hpp"

namespace clarify {

enum class Strategy {
  eig,                   // minimise expected posterior surprisal over the pool
  random,                // uniform over unasked questions
  full_caption_eig,      // eig over a pool of undecomposed captions
  binary_search_oracle,  // asks about a random half of the possible scenes
};

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

/// p(a | q, y) for one question: one row per answer, one column per scene.
struct LikelihoodTable {
  std::vector<AnswerId> answers;
  std::vector<double> values;  // row-major, answers.size() x scenes
  std::size_t scenes = 0;

  double at(std::size_t answer_row, std::size_t scene) const { return values[answer_row * scenes + scene]; }
  std::span<const double> row(std::size_t answer_row) const {
    return {values.data() + answer_row * scenes, scenes};
  }
  // Row of `answer`, or nullopt when the answer is outside the support.
  std::optional<std::size_t> row_of(AnswerId answer) const;
};

LikelihoodTable likelihood_table(const Question& q, const AnswerModel& model, const Context& context,
                                 const Vocabulary& vocab);

/// sum_y p(y) sum_a p(a|q,y) (-ln p(y|q,a)), in nats. Answers with zero
/// marginal contribute nothing. Lower is better; H(p) minus this value is the
/// expected information gain.
double expected_surprisal(const LikelihoodTable& table, std::span<const double> belief);
double expected_surprisal(const Question& q, const Belief& belief, const AnswerModel& model, const Context& context,
                          const Vocabulary& vocab);

struct ScoredQuestion {
  std::size_t index = 0;
  double expected_surprisal = 0.0;  // nats
};

struct Selection {
  // Pool index of the chosen question; empty for a binary-search partition.
  std::optional<std::size_t> question;
  // Scene indices the partition question asks about, sorted.
  std::vector<std::size_t> partition;
  // Every unasked candidate with its score (eig strategies, when requested).
  std::vector<ScoredQuestion> scores;
};

/// Picks the next question for one game and remembers the likelihood tables
/// it has computed, so repeated selections over the same pool stay cheap.
class QuestionSelector {
 public:
  QuestionSelector(const Context& context, const AnswerModel& model, const Vocabulary& vocab);

  /// Marks the returned question as asked. Returns nullopt when no candidate
  /// remains (or, for binary search, fewer than two scenes are possible).
  /// Ties in expected surprisal go to the lexicographically smallest text.
  std::optional<Selection> select(QuestionPool& pool, const Belief& belief, Strategy strategy, std::uint64_t seed,
                                  bool keep_scores = false);

  const LikelihoodTable& table(const QuestionPool& pool, std::size_t index);

 private:
  const Context* context_;
  const AnswerModel* model_;
  const Vocabulary* vocab_;
  std::vector<std::optional<LikelihoodTable>> tables_;
};

/// Likelihood column for a partition question: 1 for member scenes under
/// "yes", 1 for the others under "no".
std::vector<double> partition_likelihood(std::span<const std::size_t> partition, std::size_t k, AnswerId answer);

std::string partition_text(std::span<const std::size_t> partition);

}  // namespace clarify
