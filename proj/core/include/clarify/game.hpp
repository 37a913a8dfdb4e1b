#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/answers.hpp"
#include "clarify/belief.hpp"
#include "clarify/grammar.hpp"
#include "clarify/questions.hpp"
#include "clarify/rng.hpp"
#include "clarify/scene.hpp"
#include "clarify/selector.hpp"

namespace clarify {

enum class ModelKind { oracle, heuristic, learned };
// Who answers the questions of a game; `external` means injected answers.
enum class AnswererKind { oracle, heuristic, learned, external };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);
std::string_view to_string(AnswererKind kind);
AnswererKind answerer_kind_from_string(std::string_view name);

/// Trained classifiers shared by every game that needs a learned model.
struct LearnedModels {
  std::shared_ptr<const LogisticModel> polar;
  std::shared_ptr<const WhatModel> what;
};

std::shared_ptr<const AnswerModel> make_answer_model(ModelKind kind, double epsilon, const Vocabulary& vocab,
                                                     const LearnedModels& learned = {});

struct GameConfig {
  std::size_t k = 10;
  int max_questions = 20;
  double entropy_threshold_bits = 1.0;
  Strategy strategy = Strategy::eig;
  // The synthetic answerer and its noise level.
  AnswererKind answerer = AnswererKind::oracle;
  double epsilon = 0.0;
  // The questioner's own p(a | q, y), used for scoring and belief updates.
  ModelKind belief_model = ModelKind::oracle;
  double belief_epsilon = 0.01;
  bool include_what = false;
  // Game opens by waiting for a description of the target.
  bool with_description = false;
  std::size_t captions_per_scene = 2;
  std::uint64_t seed = 0;
  // Record every candidate's score in each turn.
  bool record_scores = false;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  // Missing keys keep their defaults; unknown keys are a ConfigError.
  static GameConfig from_json(const nlohmann::json& j);
};

enum class StopReason { threshold, max_questions, pool_exhausted };
std::string_view to_string(StopReason reason);
StopReason stop_reason_from_string(std::string_view name);

struct Turn {
  int turn = 0;
  std::string question;
  std::string kind;  // "polar", "what" or "partition"
  std::string answer;
  std::vector<double> posterior;
  double entropy_bits = 0.0;
  // (question text, expected information gain in bits) when recorded.
  std::vector<std::pair<std::string, double>> scores;
};

struct Transcript {
  static constexpr int kSchema = 1;

  GameConfig config;
  Context context;
  std::size_t target = 0;
  std::optional<std::string> description;
  std::vector<double> initial_posterior;
  double initial_entropy_bits = 0.0;
  std::vector<Turn> turns;
  std::size_t guess = 0;
  bool win = false;
  StopReason stop_reason = StopReason::max_questions;

  // Posterior after t questions (t = 0 is the initial belief).
  const std::vector<double>& posterior_at(std::size_t t) const;

  /// Line-delimited records: one "game" header, one "turn" per question and
  /// a closing "result". Field order is fixed and doubles round-trip.
  std::string serialize(const Vocabulary& vocab) const;
  static Transcript parse(std::string_view text, const Vocabulary& vocab);
};

/// The question awaiting an answer.
struct PendingQuestion {
  int turn = 0;  // 1-based number this question will have
  std::optional<std::size_t> pool_index;
  std::vector<std::size_t> partition;
  std::string text;
  std::string kind;
  std::vector<AnswerId> answers;
  std::vector<ScoredQuestion> scores;
};

enum class SessionStatus { awaiting_description, awaiting_answer, finished };
std::string_view to_string(SessionStatus status);

/// In-flight state of one game. Answers and descriptions come from outside;
/// every rejected call leaves the session unchanged. Not thread-safe: callers
/// serialise access.
class GameSession {
 public:
  GameSession(GameConfig config, const Vocabulary& vocab, const Parser& parser, Context context, std::size_t target,
              std::shared_ptr<const AnswerModel> belief_model);
  GameSession(const GameSession&) = delete;
  GameSession& operator=(const GameSession&) = delete;

  SessionStatus status() const noexcept { return status_; }
  const PendingQuestion* pending() const noexcept { return pending_ ? &*pending_ : nullptr; }
  // The pool question behind the pending one; null for partitions.
  const Question* pending_question() const;
  const Belief& belief() const noexcept { return belief_; }
  const Transcript& transcript() const noexcept { return transcript_; }
  const Context& context() const noexcept { return context_; }
  const QuestionPool& pool() const noexcept { return pool_; }
  const GameConfig& config() const noexcept { return config_; }
  int questions_asked() const noexcept { return static_cast<int>(transcript_.turns.size()); }

  /// Empty or whitespace-only text is rejected; unparseable text gives a
  /// uniform start.
  void provide_description(std::string_view text);

  /// A non-empty token may be used once per session.
  void submit_answer(AnswerId answer, std::string_view token = {});
  void submit_answer(std::string_view answer, std::string_view token = {});

 private:
  void start(Belief initial);
  void advance();
  void finish(StopReason reason);

  GameConfig config_;
  const Vocabulary* vocab_;
  Context context_;
  std::size_t target_;
  std::shared_ptr<const AnswerModel> model_;
  QuestionPool pool_;
  QuestionSelector selector_;
  Belief belief_;
  SessionStatus status_ = SessionStatus::awaiting_answer;
  std::optional<PendingQuestion> pending_;
  std::set<std::string, std::less<>> tokens_;
  Transcript transcript_;
};

/// Supplies answers (and optionally the opening description) to run_game.
class AnswerSource {
 public:
  virtual ~AnswerSource() = default;
  virtual AnswerId answer(const PendingQuestion& pending, const Question* question) = 0;
  virtual std::string description() = 0;
};

/// Samples p(a | q, target) from an answer model, one uniform draw per turn.
/// Partition questions are answered truthfully.
class SyntheticAnswerer final : public AnswerSource {
 public:
  SyntheticAnswerer(const Context& context, std::size_t target, std::shared_ptr<const AnswerModel> model,
                    const Vocabulary& vocab, std::uint64_t seed);
  AnswerId answer(const PendingQuestion& pending, const Question* question) override;
  // A caption sampled from the target scene.
  std::string description() override;

 private:
  const Context* context_;
  std::size_t target_;
  std::shared_ptr<const AnswerModel> model_;
  const Vocabulary* vocab_;
  std::uint64_t seed_;
  Rng rng_;
};

/// Plays back recorded answers. Running out is a ProtocolError.
class ScriptedAnswerer final : public AnswerSource {
 public:
  ScriptedAnswerer(std::vector<std::string> answers, std::optional<std::string> description, const Vocabulary& vocab);
  AnswerId answer(const PendingQuestion& pending, const Question* question) override;
  std::string description() override;

 private:
  std::vector<std::string> answers_;
  std::size_t next_ = 0;
  std::optional<std::string> description_;
  const Vocabulary* vocab_;
};

Transcript run_game(const GameConfig& config, const Vocabulary& vocab, const Parser& parser, const Context& context,
                    std::size_t target, std::shared_ptr<const AnswerModel> belief_model, AnswerSource& source);

/// Convenience: synthetic answerer and belief model built from the config.
Transcript run_game(const GameConfig& config, const Vocabulary& vocab, const Parser& parser, const Context& context,
                    std::size_t target, const LearnedModels& learned = {});

/// Feeds a transcript's recorded answers through a fresh engine.
Transcript replay(const Transcript& transcript, const Vocabulary& vocab, const Parser& parser,
                  const LearnedModels& learned = {});

}  // namespace clarify
