#include "clarify/selector.hpp"

#include <algorithm>
#include <cmath>

#include "clarify/errors.hpp"
#include "clarify/rng.hpp"

namespace clarify {

namespace {

constexpr double kTieTolerance = 1e-12;

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::eig: return "eig";
    case Strategy::random: return "random";
    case Strategy::full_caption_eig: return "full_caption";
    case Strategy::binary_search_oracle: return "binary";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "eig") return Strategy::eig;
  if (name == "random") return Strategy::random;
  if (name == "full_caption" || name == "full_caption_eig" || name == "full-caption") return Strategy::full_caption_eig;
  if (name == "binary" || name == "binary_search" || name == "binary_search_oracle") return Strategy::binary_search_oracle;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::optional<std::size_t> LikelihoodTable::row_of(AnswerId answer) const {
  const auto it = std::find(answers.begin(), answers.end(), answer);
  if (it == answers.end()) return std::nullopt;
  return static_cast<std::size_t>(it - answers.begin());
}

LikelihoodTable likelihood_table(const Question& q, const AnswerModel& model, const Context& context,
                                 const Vocabulary& vocab) {
  LikelihoodTable t;
  t.answers = answer_space(q, vocab);
  t.scenes = context.size();
  t.values.assign(t.answers.size() * t.scenes, 0.0);
  for (std::size_t y = 0; y < t.scenes; ++y) {
    const auto dist = model.predict(q, context, y);
    for (std::size_t a = 0; a < t.answers.size(); ++a) t.values[a * t.scenes + y] = dist.prob(t.answers[a]);
  }
  return t;
}

double expected_surprisal(const LikelihoodTable& table, std::span<const double> belief) {
  if (belief.size() != table.scenes) throw PreconditionError("belief length does not match likelihood table");
  double total = 0.0;
  for (std::size_t a = 0; a < table.answers.size(); ++a) {
    const auto row = table.row(a);
    double marginal = 0.0;
    for (std::size_t y = 0; y < belief.size(); ++y) marginal += belief[y] * row[y];
    if (!(marginal > 0.0)) continue;
    // sum_y p(y) p(a|y) (-ln (p(y) p(a|y) / marginal))
    for (std::size_t y = 0; y < belief.size(); ++y) {
      const double joint = belief[y] * row[y];
      if (joint > 0.0) total -= joint * std::log(joint / marginal);
    }
  }
  return total;
}

double expected_surprisal(const Question& q, const Belief& belief, const AnswerModel& model, const Context& context,
                          const Vocabulary& vocab) {
  return expected_surprisal(likelihood_table(q, model, context, vocab), belief.probs);
}

QuestionSelector::QuestionSelector(const Context& context, const AnswerModel& model, const Vocabulary& vocab)
    : context_(&context), model_(&model), vocab_(&vocab) {}

const LikelihoodTable& QuestionSelector::table(const QuestionPool& pool, std::size_t index) {
  if (tables_.size() < pool.size()) tables_.resize(pool.size());
  auto& slot = tables_.at(index);
  if (!slot) slot = likelihood_table(pool.at(index), *model_, *context_, *vocab_);
  return *slot;
}

std::optional<Selection> QuestionSelector::select(QuestionPool& pool, const Belief& belief, Strategy strategy,
                                                  std::uint64_t seed, bool keep_scores) {
  validate_belief(belief, context_->size());
  Selection sel;

  if (strategy == Strategy::binary_search_oracle) {
    std::vector<std::size_t> possible;
    for (std::size_t i = 0; i < belief.size(); ++i)
      if (belief.probs[i] > 0.0) possible.push_back(i);
    if (possible.size() < 2) return std::nullopt;
    Rng rng(seed);
    rng.shuffle(possible);
    possible.resize(possible.size() / 2);
    std::sort(possible.begin(), possible.end());
    sel.partition = std::move(possible);
    return sel;
  }

  if (strategy == Strategy::full_caption_eig && !pool.full_caption())
    throw ConfigError("full-caption strategy needs a pool built from whole captions");
  if (strategy == Strategy::eig && pool.full_caption())
    throw ConfigError("eig strategy expects a decomposed question pool");

  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (!pool.is_asked(i)) open.push_back(i);
  if (open.empty()) return std::nullopt;

  if (strategy == Strategy::random) {
    Rng rng(seed);
    sel.question = open[rng.uniform_index(open.size())];
    pool.mark_asked(*sel.question);
    return sel;
  }

  std::size_t best = open.front();
  double best_score = 0.0;
  bool first = true;
  for (std::size_t i : open) {
    const double s = expected_surprisal(table(pool, i), belief.probs);
    if (keep_scores) sel.scores.push_back({i, s});
    if (first || s < best_score - kTieTolerance ||
        (std::abs(s - best_score) <= kTieTolerance && question_text(pool.at(i)) < question_text(pool.at(best)))) {
      best_score = s;
      best = i;
      first = false;
    }
  }
  sel.question = best;
  pool.mark_asked(best);
  return sel;
}

std::vector<double> partition_likelihood(std::span<const std::size_t> partition, std::size_t k, AnswerId answer) {
  if (answer != kYes && answer != kNo) throw PreconditionError("partition questions take yes or no");
  std::vector<double> lik(k, answer == kYes ? 0.0 : 1.0);
  for (std::size_t i : partition) {
    if (i >= k) throw PreconditionError("partition index out of range");
    lik[i] = answer == kYes ? 1.0 : 0.0;
  }
  return lik;
}

std::string partition_text(std::span<const std::size_t> partition) {
  std::string out = "<partition";
  for (std::size_t i = 0; i < partition.size(); ++i) {
    out += i == 0 ? " " : ",";
    out += std::to_string(partition[i]);
  }
  return out + ">";
}

}  // namespace clarify
