// Command-line front end: batch experiments, answerer training, terminal
// play and the HTTP game service.

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "clarify/errors.hpp"
#include "clarify/harness.hpp"
#include "clarify/selfsup.hpp"
#include "clarify/service.hpp"

using namespace clarify;

namespace {

const Vocabulary& vocab() { return Vocabulary::standard(); }

const Parser& parser() {
  static const Parser p(Grammar::for_vocabulary(vocab()));
  return p;
}

struct Options {
  std::size_t k = 10;
  std::size_t games = 1000;
  std::uint64_t seed = 0;
  std::string strategy = "eig";
  std::string answerer = "oracle";
  double epsilon = 0.0;
  std::string belief_model = "oracle";
  double belief_epsilon = 0.01;
  double threshold_bits = 1.0;
  int max_questions = 20;
  std::string mode = "distinct";
  std::string world = "shapes_only";
  bool include_what = false;
  bool with_description = false;
  std::size_t captions_per_scene = 2;
  std::size_t threads = 0;
  std::string polar_model;
  std::string out;
};

void add_game_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--k", o.k, "Scenes per context")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  cmd->add_option("--strategy", o.strategy, "eig | random | full_caption | binary")->capture_default_str();
  cmd->add_option("--answerer", o.answerer, "Synthetic answerer: oracle | heuristic | learned")->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "Answerer noise")->capture_default_str();
  cmd->add_option("--belief-model", o.belief_model, "Questioner's answer model")->capture_default_str();
  cmd->add_option("--belief-epsilon", o.belief_epsilon, "Noise assumed by the questioner")->capture_default_str();
  cmd->add_option("--threshold-bits", o.threshold_bits, "Stop below this posterior entropy; inf disables")
      ->capture_default_str();
  cmd->add_option("--max-questions", o.max_questions)->capture_default_str();
  cmd->add_option("--mode", o.mode, "Context mode: random | split | distinct")->capture_default_str();
  cmd->add_option("--world", o.world, "shapes_only | relational")->capture_default_str();
  cmd->add_flag("--what", o.include_what, "Add `what` questions to the pool");
  cmd->add_flag("--description", o.with_description, "Open each game with a description of the target");
  cmd->add_option("--captions-per-scene", o.captions_per_scene)->capture_default_str();
  cmd->add_option("--polar-model", o.polar_model, "Trained polar answerer for learned models");
}

void add_batch_options(CLI::App* cmd, Options& o) {
  add_game_options(cmd, o);
  cmd->add_option("--games", o.games, "Games per batch")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->capture_default_str();
  cmd->add_option("--out", o.out, "Output file (default stdout)");
}

WorldConfig world_from_string(const std::string& name) {
  if (name == "shapes_only") return WorldConfig::shapes_only();
  if (name == "relational") return WorldConfig::relational();
  throw ConfigError("unknown world: " + name);
}

GameConfig game_config(const Options& o) {
  GameConfig g;
  g.k = o.k;
  g.max_questions = o.max_questions;
  g.entropy_threshold_bits = o.threshold_bits;
  g.strategy = strategy_from_string(o.strategy);
  g.answerer = answerer_kind_from_string(o.answerer);
  g.epsilon = o.epsilon;
  g.belief_model = model_kind_from_string(o.belief_model);
  g.belief_epsilon = o.belief_epsilon;
  g.include_what = o.include_what;
  g.with_description = o.with_description;
  g.captions_per_scene = o.captions_per_scene;
  g.seed = o.seed;
  g.validate();
  return g;
}

BatchSpec batch_spec(const Options& o) {
  BatchSpec b;
  b.game = game_config(o);
  b.world = world_from_string(o.world);
  b.mode = context_mode_from_string(o.mode);
  b.n_games = o.games;
  b.seed = o.seed;
  b.threads = o.threads;
  return b;
}

LearnedModels load_models(const Options& o) {
  LearnedModels m;
  if (o.polar_model.empty()) return m;
  std::ifstream in(o.polar_model);
  if (!in) throw ConfigError("cannot open " + o.polar_model);
  m.polar = std::make_shared<const LogisticModel>(LogisticModel::load(in));
  return m;
}

// Runs fn against --out, or stdout when it is empty.
template <class Fn>
void with_output(const std::string& path, Fn fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  fn(out);
}

std::string format_ci(const Interval& ci) {
  std::ostringstream s;
  s << '[' << ci.lo << ", " << ci.hi << ']';
  return s.str();
}

void simulate(const Options& o, const std::string& transcripts_path) {
  const auto result = simulate_batch(batch_spec(o), vocab(), parser(), load_models(o));
  with_output(o.out, [&](std::ostream& out) { write_curve_csv(out, result); });
  if (!transcripts_path.empty()) {
    std::ofstream out(transcripts_path);
    if (!out) throw ConfigError("cannot write " + transcripts_path);
    write_transcripts(out, result, vocab());
  }
  std::cerr << "win rate " << result.win_rate << ' ' << format_ci(result.win_ci) << ", mean questions "
            << result.questions.mean << " over " << result.transcripts.size() << " games\n";
}

// Entropy after one question: eig on random and split contexts, and the
// binary-search oracle.
void table1(const Options& o) {
  struct Row {
    const char* name;
    Strategy strategy;
    ContextMode mode;
  };
  const Row rows[] = {{"random_context", Strategy::eig, ContextMode::random},
                      {"split_context", Strategy::eig, ContextMode::split},
                      {"binary_search", Strategy::binary_search_oracle, ContextMode::random}};
  const auto models = load_models(o);
  with_output(o.out, [&](std::ostream& out) {
    out << "setting,mean_entropy_bits,ci_low,ci_high,n\n";
    for (const auto& row : rows) {
      auto spec = batch_spec(o);
      spec.game.strategy = row.strategy;
      spec.mode = row.mode;
      const auto r = entropy_after_one(spec, vocab(), parser(), models);
      out << row.name << ',' << r.entropy_bits.mean << ',' << r.entropy_bits.ci.lo << ',' << r.entropy_bits.ci.hi
          << ',' << r.entropy_bits.n << '\n';
    }
  });
}

void sweep(const Options& o, const std::vector<double>& thresholds) {
  const auto rows = threshold_sweep(thresholds, batch_spec(o), vocab(), parser(), load_models(o));
  with_output(o.out, [&](std::ostream& out) {
    out << "threshold_bits,mean_questions,questions_ci_low,questions_ci_high,win_rate,ci_low,ci_high\n";
    for (const auto& r : rows)
      out << r.threshold_bits << ',' << r.questions.mean << ',' << r.questions.ci.lo << ',' << r.questions.ci.hi
          << ',' << r.win_rate << ',' << r.win_ci.lo << ',' << r.win_ci.hi << '\n';
  });
}

void what_comparison(const Options& o) {
  const auto c = compare_what(batch_spec(o), vocab(), parser(), load_models(o));
  with_output(o.out, [&](std::ostream& out) {
    out << "arm,win_rate,ci_low,ci_high,mean_questions\n";
    out << "polar," << c.polar.win_rate << ',' << c.polar.win_ci.lo << ',' << c.polar.win_ci.hi << ','
        << c.polar.questions.mean << '\n';
    out << "polar_what," << c.polar_what.win_rate << ',' << c.polar_what.win_ci.lo << ',' << c.polar_what.win_ci.hi
        << ',' << c.polar_what.questions.mean << '\n';
  });
  if (!c.paired) std::cerr << "warning: arms saw different contexts\n";
}

SelfSupDataset generate_pairs(const std::string& world, std::size_t scenes, std::size_t per_scene,
                              std::size_t negatives, std::uint64_t seed) {
  const auto data = sample_captioned_scenes(vocab(), world_from_string(world), scenes, per_scene, seed);
  return gen_selfsup_data(data.scenes, data.captions, parser(), vocab(), negatives, seed);
}

std::vector<LabeledPair> read_pairs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_pairs(in, parser(), vocab());
}

std::string describe_scene(const Scene& s) {
  std::string text;
  for (const auto& obj : s.objects) {
    if (!text.empty()) text += ", ";
    text += vocab().colors[obj.color] + ' ' + vocab().shapes[obj.shape];
  }
  for (const auto& r : s.relations) {
    const auto& a = s.objects[r.subject_id];
    const auto& b = s.objects[r.object_id];
    text += "; " + vocab().colors[a.color] + ' ' + vocab().shapes[a.shape] + ' ' + vocab().verbs[r.verb] + ' ' +
            vocab().colors[b.color] + ' ' + vocab().shapes[b.shape];
  }
  return text;
}

std::optional<std::string> prompt(const std::string& text) {
  std::cout << text << std::flush;
  std::string line;
  if (!std::getline(std::cin, line)) return std::nullopt;
  return line;
}

// A human answers in the terminal.
void play(const Options& o, std::optional<std::size_t> target_arg) {
  auto config = game_config(o);
  config.answerer = AnswererKind::external;
  const auto models = load_models(o);
  const auto ctx = gen_context(vocab(), world_from_string(o.world), derive_seed(o.seed, {1}), o.k,
                               context_mode_from_string(o.mode));
  const std::size_t target = target_arg ? *target_arg : derive_seed(o.seed, {2}) % o.k;
  if (target >= o.k) throw ConfigError("target out of range");

  GameSession game(config, vocab(), parser(), ctx, target,
                   make_answer_model(config.belief_model, config.belief_epsilon, vocab(), models));
  std::cout << "Scenes:\n";
  for (std::size_t i = 0; i < ctx.size(); ++i)
    std::cout << (i == target ? " * " : "   ") << i << ": " << describe_scene(ctx.scenes[i]) << '\n';
  std::cout << "You are answering for scene " << target << ".\n";

  while (game.status() != SessionStatus::finished) {
    try {
      if (game.status() == SessionStatus::awaiting_description) {
        const auto line = prompt("Describe your scene: ");
        if (!line) return;
        game.provide_description(*line);
        continue;
      }
      const auto& pending = *game.pending();
      std::string choices;
      for (AnswerId a : pending.answers) choices += (choices.empty() ? "" : "/") + answer_to_string(a, vocab());
      const auto line = prompt("Q" + std::to_string(pending.turn) + ": " + pending.text + " [" + choices + "] ");
      if (!line) return;
      game.submit_answer(*line);
    } catch (const PreconditionError& e) {
      std::cout << e.what() << '\n';
    } catch (const ProtocolError& e) {
      std::cout << e.what() << '\n';
    }
  }
  const auto& t = game.transcript();
  std::cout << "Guess: scene " << t.guess << (t.win ? " (correct)" : " (wrong)") << " after " << t.turns.size()
            << " questions, stopped by " << to_string(t.stop_reason) << ".\n";
  if (!o.out.empty()) with_output(o.out, [&](std::ostream& out) { out << t.serialize(vocab()); });
}

volatile std::sig_atomic_t stop_requested = 0;

void on_signal(int) { stop_requested = 1; }

void serve(const Options& o, std::string host, int port) {
  auto options = service_options_from_env();
  GameService service(vocab(), parser(), load_models(o), options);
  if (host.empty() || port < 0) {
    const auto [h, p] = bind_address_from_env();
    if (host.empty()) host = h;
    if (port < 0) port = p;
  }
  HttpServer server(service);
  const int bound = server.start(host, port);
  std::cerr << "listening on " << host << ':' << bound << '\n';

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  auto last_sweep = std::chrono::steady_clock::now();
  while (!stop_requested) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    if (std::chrono::steady_clock::now() - last_sweep > std::chrono::seconds(30)) {
      service.expire_idle();
      last_sweep = std::chrono::steady_clock::now();
    }
  }
  server.stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clarification-question games over synthetic scenes"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Batch of synthetic games; writes the win-rate curve");
  add_batch_options(sim, o);
  std::string transcripts_path;
  sim->add_option("--transcripts", transcripts_path, "Write game transcripts here");

  auto* t1 = app.add_subcommand("table1", "Entropy after one question for three settings");
  add_batch_options(t1, o);

  auto* sw = app.add_subcommand("sweep", "Questions asked and win rate per stopping threshold");
  add_batch_options(sw, o);
  std::vector<double> thresholds = {3.0, 2.0, 1.0, 0.5, 0.1};
  sw->add_option("--thresholds", thresholds, "Descending thresholds in bits")->delimiter(',')->capture_default_str();

  auto* cw = app.add_subcommand("compare-what", "Polar-only against polar plus `what` questions, paired");
  add_batch_options(cw, o);

  std::size_t n_scenes = 2500, per_scene = 2, negatives = 1;
  auto* gen = app.add_subcommand("gen-data", "Self-supervised (question, scene, label) pairs");
  gen->add_option("--scenes", n_scenes)->capture_default_str();
  gen->add_option("--captions-per-scene", per_scene)->capture_default_str();
  gen->add_option("--negatives", negatives, "Negatives per positive")->capture_default_str();
  gen->add_option("--world", o.world)->capture_default_str();
  gen->add_option("--seed", o.seed)->capture_default_str();
  gen->add_option("--out", o.out);

  std::string data_path;
  TrainingOptions training;
  auto* train = app.add_subcommand("train-answerer", "Fit the polar answer classifier");
  train->add_option("--data", data_path, "Pairs from gen-data; generated in memory when omitted");
  train->add_option("--scenes", n_scenes)->capture_default_str();
  train->add_option("--world", o.world)->capture_default_str();
  train->add_option("--seed", o.seed)->capture_default_str();
  train->add_option("--epochs", training.epochs)->capture_default_str();
  train->add_option("--learning-rate", training.learning_rate)->capture_default_str();
  train->add_option("--batch-size", training.batch_size)->capture_default_str();
  train->add_option("--out", o.out, "Model file (default stdout)");

  std::string model_path;
  auto* eval = app.add_subcommand("eval-answerer", "Accuracy of a trained classifier on held-out pairs");
  eval->add_option("--model", model_path)->required();
  eval->add_option("--data", data_path, "Pairs from gen-data; generated in memory when omitted");
  eval->add_option("--scenes", n_scenes)->capture_default_str();
  eval->add_option("--world", o.world)->capture_default_str();
  eval->add_option("--seed", o.seed)->capture_default_str();

  auto* pl = app.add_subcommand("play", "Answer the questions yourself");
  add_game_options(pl, o);
  std::optional<std::size_t> target;
  pl->add_option("--target", target, "Scene you answer for (default: drawn from the seed)");
  pl->add_option("--out", o.out, "Write the transcript here");

  std::string host;
  int port = -1;
  auto* srv = app.add_subcommand("serve", "HTTP game service (bind from CLARIFY_BIND unless given)");
  srv->add_option("--host", host);
  srv->add_option("--port", port);
  srv->add_option("--polar-model", o.polar_model);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) simulate(o, transcripts_path);
    if (*t1) table1(o);
    if (*sw) sweep(o, thresholds);
    if (*cw) what_comparison(o);
    if (*gen) {
      const auto set = generate_pairs(o.world, n_scenes, per_scene, negatives, o.seed);
      with_output(o.out, [&](std::ostream& out) { write_pairs(out, set.pairs, vocab()); });
      std::cerr << set.pairs.size() << " pairs (" << set.positives << " yes, " << set.negatives
                << " no), false-negative rate " << set.false_negative_rate() << '\n';
    }
    if (*train) {
      training.seed = o.seed;
      const auto pairs = data_path.empty() ? generate_pairs(o.world, n_scenes, 2, 1, o.seed).pairs
                                           : read_pairs_file(data_path);
      const auto model = train_answerer(pairs, Featurizer(vocab()), training);
      with_output(o.out, [&](std::ostream& out) { model.save(out); });
      std::cerr << "trained on " << pairs.size() << " pairs, final loss " << model.final_loss << '\n';
    }
    if (*eval) {
      std::ifstream in(model_path);
      if (!in) throw ConfigError("cannot open " + model_path);
      const auto model = LogisticModel::load(in);
      const auto pairs = data_path.empty() ? generate_pairs(o.world, n_scenes, 2, 1, o.seed + 1).pairs
                                           : read_pairs_file(data_path);
      const auto ev = evaluate_answerer(model, Featurizer(vocab()), pairs, vocab());
      std::cout << "pairs " << ev.count << "\naccuracy_vs_labels " << ev.accuracy_vs_labels
                << "\naccuracy_vs_ground_truth " << ev.accuracy_vs_ground_truth << '\n';
    }
    if (*pl) play(o, target);
    if (*srv) serve(o, host, port);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
