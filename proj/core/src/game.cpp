#include "clarify/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "clarify/captioner.hpp"
#include "clarify/errors.hpp"
#include "clarify/serialize.hpp"

namespace clarify {

namespace {

constexpr std::uint64_t kCaptionTag = 0x63617074;
constexpr std::uint64_t kSelectTag = 0x73656c65;
constexpr std::uint64_t kAnswerTag = 0x616e7377;
constexpr std::uint64_t kDescribeTag = 0x64657363;

std::shared_ptr<const AnswerModel> require(std::shared_ptr<const AnswerModel> model) {
  if (!model) throw PreconditionError("game session needs a belief model");
  return model;
}

const char* kind_name(QuestionKind kind) { return kind == QuestionKind::polar ? "polar" : "what"; }

nlohmann::json threshold_to_json(double t) {
  if (std::isinf(t)) return "inf";
  return t;
}

double threshold_from_json(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::oracle: return "oracle";
    case ModelKind::heuristic: return "heuristic";
    case ModelKind::learned: return "learned";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "oracle") return ModelKind::oracle;
  if (name == "heuristic") return ModelKind::heuristic;
  if (name == "learned") return ModelKind::learned;
  throw ConfigError("unknown answer model '" + std::string(name) + "'");
}

std::string_view to_string(AnswererKind kind) {
  switch (kind) {
    case AnswererKind::oracle: return "oracle";
    case AnswererKind::heuristic: return "heuristic";
    case AnswererKind::learned: return "learned";
    case AnswererKind::external: return "external";
  }
  return "?";
}

AnswererKind answerer_kind_from_string(std::string_view name) {
  if (name == "external") return AnswererKind::external;
  switch (model_kind_from_string(name)) {
    case ModelKind::oracle: return AnswererKind::oracle;
    case ModelKind::heuristic: return AnswererKind::heuristic;
    case ModelKind::learned: return AnswererKind::learned;
  }
  return AnswererKind::oracle;
}

std::shared_ptr<const AnswerModel> make_answer_model(ModelKind kind, double epsilon, const Vocabulary& vocab,
                                                     const LearnedModels& learned) {
  switch (kind) {
    case ModelKind::oracle: return std::make_shared<OracleAnswerModel>(vocab, epsilon);
    case ModelKind::heuristic: return std::make_shared<HeuristicAnswerModel>(vocab, epsilon);
    case ModelKind::learned: return std::make_shared<LearnedAnswerModel>(vocab, learned.polar, learned.what, epsilon);
  }
  throw ConfigError("unknown answer model");
}

void GameConfig::validate() const {
  if (k < 2) throw ConfigError("k must be at least 2");
  if (max_questions < 0) throw ConfigError("max_questions must be >= 0");
  if (std::isnan(entropy_threshold_bits) || entropy_threshold_bits < 0.0)
    throw ConfigError("entropy threshold must be >= 0");
  if (captions_per_scene < 1) throw ConfigError("captions_per_scene must be >= 1");
  try {
    check_epsilon(epsilon);
    check_epsilon(belief_epsilon);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::ordered_json GameConfig::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["max_questions"] = max_questions;
  j["entropy_threshold_bits"] = threshold_to_json(entropy_threshold_bits);
  j["strategy"] = std::string(to_string(strategy));
  j["answerer"] = std::string(to_string(answerer));
  j["epsilon"] = epsilon;
  j["belief_model"] = std::string(to_string(belief_model));
  j["belief_epsilon"] = belief_epsilon;
  j["include_what"] = include_what;
  j["with_description"] = with_description;
  j["captions_per_scene"] = captions_per_scene;
  j["seed"] = seed;
  j["record_scores"] = record_scores;
  return j;
}

GameConfig GameConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("game config must be an object");
  GameConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "k") c.k = v.get<std::size_t>();
      else if (key == "max_questions") c.max_questions = v.get<int>();
      else if (key == "entropy_threshold_bits") c.entropy_threshold_bits = threshold_from_json(v);
      else if (key == "strategy") c.strategy = strategy_from_string(v.get<std::string>());
      else if (key == "answerer") c.answerer = answerer_kind_from_string(v.get<std::string>());
      else if (key == "epsilon") c.epsilon = v.get<double>();
      else if (key == "belief_model") c.belief_model = model_kind_from_string(v.get<std::string>());
      else if (key == "belief_epsilon") c.belief_epsilon = v.get<double>();
      else if (key == "include_what") c.include_what = v.get<bool>();
      else if (key == "with_description") c.with_description = v.get<bool>();
      else if (key == "captions_per_scene") c.captions_per_scene = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "record_scores") c.record_scores = v.get<bool>();
      else throw ConfigError("unknown game config field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad game config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::threshold: return "threshold";
    case StopReason::max_questions: return "max_questions";
    case StopReason::pool_exhausted: return "pool_exhausted";
  }
  return "?";
}

StopReason stop_reason_from_string(std::string_view name) {
  if (name == "threshold") return StopReason::threshold;
  if (name == "max_questions") return StopReason::max_questions;
  if (name == "pool_exhausted") return StopReason::pool_exhausted;
  throw FormatError("unknown stop reason '" + std::string(name) + "'");
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::awaiting_description: return "awaiting_description";
    case SessionStatus::awaiting_answer: return "awaiting_answer";
    case SessionStatus::finished: return "finished";
  }
  return "?";
}

const std::vector<double>& Transcript::posterior_at(std::size_t t) const {
  if (t == 0 || turns.empty()) return initial_posterior;
  return turns[std::min(t, turns.size()) - 1].posterior;
}

std::string Transcript::serialize(const Vocabulary& vocab) const {
  std::string out;
  nlohmann::ordered_json head;
  head["record"] = "game";
  head["schema"] = kSchema;
  head["config"] = config.to_json();
  head["context"] = context_to_json(context, vocab);
  head["target"] = target;
  head["description"] = description ? nlohmann::ordered_json(*description) : nlohmann::ordered_json(nullptr);
  head["initial_posterior"] = initial_posterior;
  head["initial_entropy_bits"] = initial_entropy_bits;
  out += head.dump() + '\n';
  for (const auto& t : turns) {
    nlohmann::ordered_json j;
    j["record"] = "turn";
    j["turn"] = t.turn;
    j["question"] = t.question;
    j["kind"] = t.kind;
    j["answer"] = t.answer;
    j["posterior"] = t.posterior;
    j["entropy_bits"] = t.entropy_bits;
    if (!t.scores.empty()) {
      auto& scores = j["scores"] = nlohmann::ordered_json::array();
      for (const auto& [text, bits] : t.scores) scores.push_back({{"question", text}, {"eig_bits", bits}});
    }
    out += j.dump() + '\n';
  }
  nlohmann::ordered_json tail;
  tail["record"] = "result";
  tail["guess"] = guess;
  tail["win"] = win;
  tail["stop_reason"] = std::string(to_string(stop_reason));
  tail["questions"] = turns.size();
  out += tail.dump() + '\n';
  return out;
}

Transcript Transcript::parse(std::string_view text, const Vocabulary& vocab) {
  Transcript t;
  bool head = false, tail = false;
  std::istringstream in{std::string(text)};
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto record = j.at("record").get<std::string>();
      if (record == "game") {
        if (j.at("schema").get<int>() != kSchema) throw FormatError("unsupported transcript schema");
        t.config = GameConfig::from_json(j.at("config"));
        t.context = context_from_json(j.at("context"), vocab);
        t.target = j.at("target").get<std::size_t>();
        if (!j.at("description").is_null()) t.description = j.at("description").get<std::string>();
        t.initial_posterior = j.at("initial_posterior").get<std::vector<double>>();
        t.initial_entropy_bits = j.at("initial_entropy_bits").get<double>();
        head = true;
      } else if (record == "turn") {
        Turn turn;
        turn.turn = j.at("turn").get<int>();
        turn.question = j.at("question").get<std::string>();
        turn.kind = j.at("kind").get<std::string>();
        turn.answer = j.at("answer").get<std::string>();
        turn.posterior = j.at("posterior").get<std::vector<double>>();
        turn.entropy_bits = j.at("entropy_bits").get<double>();
        if (j.contains("scores"))
          for (const auto& s : j.at("scores"))
            turn.scores.emplace_back(s.at("question").get<std::string>(), s.at("eig_bits").get<double>());
        t.turns.push_back(std::move(turn));
      } else if (record == "result") {
        t.guess = j.at("guess").get<std::size_t>();
        t.win = j.at("win").get<bool>();
        t.stop_reason = stop_reason_from_string(j.at("stop_reason").get<std::string>());
        tail = true;
      } else {
        throw FormatError("unknown transcript record '" + record + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad transcript: ") + e.what());
  }
  if (!head || !tail) throw FormatError("transcript is missing its header or result record");
  return t;
}

GameSession::GameSession(GameConfig config, const Vocabulary& vocab, const Parser& parser, Context context,
                         std::size_t target, std::shared_ptr<const AnswerModel> belief_model)
    : config_(std::move(config)),
      vocab_(&vocab),
      context_(std::move(context)),
      target_(target),
      model_(require(std::move(belief_model))),
      selector_(context_, *model_, vocab) {
  config_.validate();
  if (context_.size() != config_.k) throw ConfigError("context size does not match k");
  if (target_ >= context_.size()) throw PreconditionError("target index out of range");
  if (config_.strategy != Strategy::binary_search_oracle) {
    const auto captions = caption_context(context_, vocab, config_.captions_per_scene,
                                          derive_seed(config_.seed, {kCaptionTag}));
    pool_ = build_pool(captions, parser, vocab,
                       {config_.include_what, config_.strategy == Strategy::full_caption_eig});
  }
  transcript_.config = config_;
  transcript_.context = context_;
  transcript_.target = target_;
  belief_ = init_uniform(context_.size());
  if (config_.with_description) {
    status_ = SessionStatus::awaiting_description;
    return;
  }
  start(belief_);
}

const Question* GameSession::pending_question() const {
  if (!pending_ || !pending_->pool_index) return nullptr;
  return &pool_.at(*pending_->pool_index);
}

void GameSession::provide_description(std::string_view text) {
  if (status_ != SessionStatus::awaiting_description) throw ProtocolError("game is not waiting for a description");
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw PreconditionError("description is empty");
  transcript_.description = join_tokens(tokens);
  start(init_from_description(tokens, context_, *vocab_));
}

void GameSession::start(Belief initial) {
  belief_ = std::move(initial);
  transcript_.initial_posterior = belief_.probs;
  transcript_.initial_entropy_bits = entropy(belief_, EntropyUnit::bits);
  status_ = SessionStatus::awaiting_answer;
  advance();
}

void GameSession::advance() {
  if (entropy(belief_, EntropyUnit::bits) < config_.entropy_threshold_bits) return finish(StopReason::threshold);
  if (questions_asked() >= config_.max_questions) return finish(StopReason::max_questions);
  const auto turn = static_cast<std::uint64_t>(questions_asked() + 1);
  auto sel = selector_.select(pool_, belief_, config_.strategy, derive_seed(config_.seed, {kSelectTag, turn}),
                              config_.record_scores);
  if (!sel) return finish(StopReason::pool_exhausted);

  PendingQuestion p;
  p.turn = static_cast<int>(turn);
  if (sel->question) {
    const Question& q = pool_.at(*sel->question);
    p.pool_index = sel->question;
    p.text = question_text(q);
    p.kind = kind_name(question_kind(q));
    p.answers = answer_space(q, *vocab_);
  } else {
    p.partition = std::move(sel->partition);
    p.text = partition_text(p.partition);
    p.kind = "partition";
    p.answers = {kYes, kNo};
  }
  p.scores = std::move(sel->scores);
  pending_ = std::move(p);
}

void GameSession::finish(StopReason reason) {
  status_ = SessionStatus::finished;
  pending_.reset();
  transcript_.guess = belief_.argmax();
  transcript_.win = transcript_.guess == target_;
  transcript_.stop_reason = reason;
}

void GameSession::submit_answer(std::string_view answer, std::string_view token) {
  const auto id = answer_from_string(answer, *vocab_);
  if (!id) throw InvalidAnswerError("'" + std::string(answer) + "' is not an answer");
  submit_answer(*id, token);
}

void GameSession::submit_answer(AnswerId answer, std::string_view token) {
  if (status_ != SessionStatus::awaiting_answer || !pending_)
    throw ProtocolError("game is not waiting for an answer");
  if (!token.empty() && tokens_.contains(token)) throw DuplicateSubmissionError("submission token already used");
  const auto& p = *pending_;
  if (std::find(p.answers.begin(), p.answers.end(), answer) == p.answers.end())
    throw InvalidAnswerError("'" + answer_to_string(answer, *vocab_) + "' is not a valid answer to '" + p.text + "'");

  const std::string answer_text = answer_to_string(answer, *vocab_);
  Belief next;
  if (!p.pool_index) {
    next = update_with_likelihood(belief_, partition_likelihood(p.partition, context_.size(), answer),
                                  "the partition answer");
  } else if (answer == kNotApplicable && p.kind == "polar") {
    next = Belief{belief_.probs, belief_.step + 1};
  } else {
    const auto& table = selector_.table(pool_, *p.pool_index);
    next = update_with_likelihood(belief_, table.row(*table.row_of(answer)),
                                  "'" + p.text + "' answered '" + answer_text + "'");
  }

  Turn t;
  t.turn = p.turn;
  t.question = p.text;
  t.kind = p.kind;
  t.answer = answer_text;
  t.posterior = next.probs;
  t.entropy_bits = entropy(next, EntropyUnit::bits);
  if (!p.scores.empty()) {
    const double h = entropy(belief_, EntropyUnit::nats);
    for (const auto& s : p.scores)
      t.scores.emplace_back(question_text(pool_.at(s.index)), (h - s.expected_surprisal) / std::numbers::ln2);
  }

  if (!token.empty()) tokens_.emplace(token);
  belief_ = std::move(next);
  transcript_.turns.push_back(std::move(t));
  pending_.reset();
  advance();
}

SyntheticAnswerer::SyntheticAnswerer(const Context& context, std::size_t target,
                                     std::shared_ptr<const AnswerModel> model, const Vocabulary& vocab,
                                     std::uint64_t seed)
    : context_(&context), target_(target), model_(std::move(model)), vocab_(&vocab), seed_(seed), rng_(seed) {
  if (!model_) throw PreconditionError("synthetic answerer needs an answer model");
  if (target_ >= context.size()) throw PreconditionError("target index out of range");
}

AnswerId SyntheticAnswerer::answer(const PendingQuestion& pending, const Question* question) {
  const double u = rng_.uniform01();
  if (!question) {
    return std::binary_search(pending.partition.begin(), pending.partition.end(), target_) ? kYes : kNo;
  }
  const auto dist = model_->predict(*question, *context_, target_);
  double acc = 0.0;
  std::optional<AnswerId> last;
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    if (dist.probs[i] <= 0.0) continue;
    acc += dist.probs[i];
    last = dist.support[i];
    if (u < acc) return dist.support[i];
  }
  if (!last) throw PreconditionError("answer model gave no answer any probability");
  return *last;
}

std::string SyntheticAnswerer::description() {
  return caption(context_->scenes[target_], *vocab_, derive_seed(seed_, {kDescribeTag}),
                 static_cast<int>(target_))
      .text();
}

ScriptedAnswerer::ScriptedAnswerer(std::vector<std::string> answers, std::optional<std::string> description,
                                   const Vocabulary& vocab)
    : answers_(std::move(answers)), description_(std::move(description)), vocab_(&vocab) {}

AnswerId ScriptedAnswerer::answer(const PendingQuestion&, const Question*) {
  if (next_ >= answers_.size()) throw ProtocolError("answer script ran out before the game finished");
  const auto& token = answers_[next_++];
  const auto id = answer_from_string(token, *vocab_);
  if (!id) throw FormatError("'" + token + "' is not an answer");
  return *id;
}

std::string ScriptedAnswerer::description() {
  if (!description_) throw ProtocolError("game asked for a description the script does not have");
  return *description_;
}

Transcript run_game(const GameConfig& config, const Vocabulary& vocab, const Parser& parser, const Context& context,
                    std::size_t target, std::shared_ptr<const AnswerModel> belief_model, AnswerSource& source) {
  GameSession session(config, vocab, parser, context, target, std::move(belief_model));
  if (session.status() == SessionStatus::awaiting_description) session.provide_description(source.description());
  while (session.status() == SessionStatus::awaiting_answer)
    session.submit_answer(source.answer(*session.pending(), session.pending_question()));
  return session.transcript();
}

Transcript run_game(const GameConfig& config, const Vocabulary& vocab, const Parser& parser, const Context& context,
                    std::size_t target, const LearnedModels& learned) {
  if (config.answerer == AnswererKind::external) throw ConfigError("an external answerer needs an answer source");
  const ModelKind answer_kind = config.answerer == AnswererKind::oracle      ? ModelKind::oracle
                               : config.answerer == AnswererKind::heuristic ? ModelKind::heuristic
                                                                            : ModelKind::learned;
  SyntheticAnswerer source(context, target, make_answer_model(answer_kind, config.epsilon, vocab, learned), vocab,
                           derive_seed(config.seed, {kAnswerTag}));
  return run_game(config, vocab, parser, context, target,
                  make_answer_model(config.belief_model, config.belief_epsilon, vocab, learned), source);
}

Transcript replay(const Transcript& transcript, const Vocabulary& vocab, const Parser& parser,
                  const LearnedModels& learned) {
  std::vector<std::string> answers;
  answers.reserve(transcript.turns.size());
  for (const auto& t : transcript.turns) answers.push_back(t.answer);
  ScriptedAnswerer source(std::move(answers), transcript.description, vocab);
  return run_game(transcript.config, vocab, parser, transcript.context, transcript.target,
                  make_answer_model(transcript.config.belief_model, transcript.config.belief_epsilon, vocab, learned),
                  source);
}

}  // namespace clarify
