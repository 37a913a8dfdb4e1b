// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "clarify/errors.hpp"
#include "clarify/features.hpp"
#include "clarify/harness.hpp"
#include "clarify/selector.hpp"
#include "clarify/selfsup.hpp"

using namespace clarify;

namespace {

const Vocabulary& vocab() { return Vocabulary::standard(); }

const Parser& parser() {
  static const Parser p(Grammar::for_vocabulary(vocab()));
  return p;
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

// Runs one criterion; an exception counts as a failure.
void criterion(int id, const char* name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, name, ok, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("error: ") + e.what());
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BatchSpec batch(std::size_t k, Strategy s, ContextMode mode, std::size_t n, std::uint64_t seed) {
  BatchSpec b;
  b.game.k = k;
  b.game.strategy = s;
  b.game.entropy_threshold_bits = 0.0;
  b.game.max_questions = 20;
  b.mode = mode;
  b.n_games = n;
  b.seed = seed;
  return b;
}

double half_width(const Interval& ci) { return (ci.hi - ci.lo) / 2.0; }

// Expected posterior entropy computed answer by answer.
double conditional_entropy(const Question& q, const std::vector<double>& prior, const AnswerModel& model,
                           const Context& ctx) {
  double total = 0.0;
  for (AnswerId a : answer_space(q, vocab())) {
    std::vector<double> joint(prior.size());
    double pa = 0.0;
    for (std::size_t y = 0; y < prior.size(); ++y) {
      joint[y] = prior[y] * model.predict(q, ctx, y).prob(a);
      pa += joint[y];
    }
    if (pa <= 0.0) continue;
    double h = 0.0;
    for (double j : joint)
      if (j > 0.0) h -= (j / pa) * std::log(j / pa);
    total += pa * h;
  }
  return total;
}

// Pairs until at least n are collected.
SelfSupDataset selfsup_pairs(std::size_t n, std::uint64_t seed) {
  const auto data = sample_captioned_scenes(vocab(), WorldConfig::shapes_only(), n / 2, 2, seed);
  auto set = gen_selfsup_data(data.scenes, data.captions, parser(), vocab(), 1, seed);
  if (set.pairs.size() < n) throw Error("dataset generator produced too few pairs");
  set.pairs.resize(n);
  return set;
}

}  // namespace

int main() {
  criterion(1, "binary-search entropy anchor", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = entropy_after_one(batch(10, Strategy::binary_search_oracle, ContextMode::distinct, 1000, 1), vocab(),
                                     parser());
    const double secs = seconds_since(t0);
    const double target = std::log2(5.0);
    const bool ok = std::abs(r.entropy_bits.mean - target) < 1e-4 && r.entropy_bits.stddev < 1e-12 && secs < 1.0;
    return std::pair{ok, fmt("mean=%.6f bits (expected %.4f) sd=%.2g over %zu games, %.3fs", r.entropy_bits.mean,
                             target, r.entropy_bits.stddev, r.entropy_bits.n, secs)};
  });

  criterion(2, "binary-search win anchor", [] {
    std::string detail;
    bool ok = true;
    for (auto [k, limit] : {std::pair<std::size_t, int>{10, 4}, {25, 5}}) {
      auto spec = batch(k, Strategy::binary_search_oracle, ContextMode::distinct, 1000, 2);
      spec.game.max_questions = limit;
      const auto r = simulate_batch(spec, vocab(), parser());
      std::size_t wins = 0;
      for (const auto& t : r.transcripts) wins += t.win && static_cast<int>(t.turns.size()) <= limit;
      ok = ok && wins == r.transcripts.size();
      detail += fmt("k=%zu: %zu/%zu won within %d; ", k, wins, r.transcripts.size(), limit);
    }
    return std::pair{ok, detail};
  });

  criterion(3, "strategy ordering", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const Strategy order[] = {Strategy::binary_search_oracle, Strategy::eig, Strategy::full_caption_eig,
                              Strategy::random};
    std::vector<BatchResult> results;
    for (auto s : order) results.push_back(simulate_batch(batch(10, s, ContextMode::distinct, 1000, 3), vocab(), parser()));
    const double secs = seconds_since(t0);
    bool ok = secs < 30.0;
    std::string detail;
    for (int t : {2, 4, 6, 8}) {
      detail += fmt("t=%d", t);
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& p = results[i].curve[static_cast<std::size_t>(t)];
        detail += fmt(" %s=%.3f", std::string(to_string(order[i])).c_str(), p.win_rate);
        // a >= b, allowing for the two intervals' sampling error
        if (i > 0) {
          const auto& prev = results[i - 1].curve[static_cast<std::size_t>(t)];
          ok = ok && prev.win_rate + half_width(prev.ci) >= p.win_rate - half_width(p.ci);
        }
      }
      detail += "; ";
    }
    const auto& eig4 = results[1].curve[4];
    const auto& rnd4 = results[3].curve[4];
    const bool separated = eig4.ci.lo > rnd4.ci.hi;
    const double eig20 = results[1].curve[20].win_rate;
    ok = ok && separated && eig20 == 1.0;
    detail += fmt("eig-random at t=4: [%.3f,%.3f] vs [%.3f,%.3f]; eig at t=20: %.3f; %.1fs", eig4.ci.lo, eig4.ci.hi,
                  rnd4.ci.lo, rnd4.ci.hi, eig20, secs);
    return std::pair{ok, detail};
  });

  criterion(4, "split-context entropy", [] {
    const auto split = entropy_after_one(batch(10, Strategy::eig, ContextMode::split, 500, 4), vocab(), parser());
    const auto random = entropy_after_one(batch(10, Strategy::eig, ContextMode::random, 500, 4), vocab(), parser());
    const bool ok = split.entropy_bits.ci.hi < random.entropy_bits.ci.lo;
    return std::pair{ok, fmt("split %.4f [%.4f,%.4f] < random %.4f [%.4f,%.4f] bits", split.entropy_bits.mean,
                             split.entropy_bits.ci.lo, split.entropy_bits.ci.hi, random.entropy_bits.mean,
                             random.entropy_bits.ci.lo, random.entropy_bits.ci.hi)};
  });

  criterion(5, "EIG / conditional entropy equivalence", [] {
    Rng rng(5);
    std::size_t argmin_mismatch = 0, questions = 0;
    double worst = 0.0;
    const auto data = sample_captioned_scenes(vocab(), WorldConfig::shapes_only(), 600, 2, 55);
    const auto pairs = gen_selfsup_data(data.scenes, data.captions, parser(), vocab(), 1, 55);
    const Featurizer featurizer(vocab());
    const auto polar = std::make_shared<const LogisticModel>(train_answerer(pairs.pairs, featurizer, {}));
    for (int state = 0; state < 200; ++state) {
      const auto k = 2 + rng.uniform_index(9);
      const WorldConfig world{1, 2, 0.5};
      const auto ctx = gen_context(vocab(), world, rng.next(), k, ContextMode::random);
      auto pool = build_pool(caption_context(ctx, vocab(), 2, rng.next()), parser(), vocab(), {state % 2 == 0, false});
      std::vector<double> p(k);
      double z = 0.0;
      for (auto& x : p) z += (x = rng.bernoulli(0.2) ? 0.0 : rng.uniform01());
      if (z == 0.0) p[0] = z = 1.0;
      for (auto& x : p) x /= z;
      const Belief b{p, 0};

      std::shared_ptr<const AnswerModel> model;
      switch (state % 3) {
        case 0: model = std::make_shared<OracleAnswerModel>(vocab(), 0.2 * rng.uniform01()); break;
        case 1: model = std::make_shared<HeuristicAnswerModel>(vocab(), 0.1 * rng.uniform01()); break;
        default:
          // The polar classifier has no `what` head; keep to polar pools.
          pool = build_pool(caption_context(ctx, vocab(), 2, rng.next()), parser(), vocab(), {});
          model = std::make_shared<LearnedAnswerModel>(vocab(), polar, nullptr, 0.05);
      }

      std::size_t brute_best = 0;
      double brute_value = 0.0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const double es = expected_surprisal(pool.at(i), b, *model, ctx, vocab());
        const double ce = conditional_entropy(pool.at(i), p, *model, ctx);
        worst = std::max(worst, std::abs(es - ce));
        ++questions;
        const bool better = i == 0 || ce < brute_value - 1e-12 ||
                            (std::abs(ce - brute_value) <= 1e-12 &&
                             question_text(pool.at(i)) < question_text(pool.at(brute_best)));
        if (better) {
          brute_best = i;
          brute_value = ce;
        }
      }
      QuestionSelector selector(ctx, *model, vocab());
      const auto pick = selector.select(pool, b, Strategy::eig, 0);
      argmin_mismatch += !pick || *pick->question != brute_best;
    }
    const bool ok = argmin_mismatch == 0 && worst < 1e-9;
    return std::pair{ok, fmt("200 states, %zu questions scored: argmin mismatches=%zu, max |diff|=%.2e nats",
                             questions, argmin_mismatch, worst)};
  });

  criterion(6, "worked EIG micro-case", [] {
    auto scene = [](const char* c, const char* s) {
      return Scene{{{0, *vocab().color_index(c), *vocab().shape_index(s)}}, {}};
    };
    Context ctx;
    ctx.scenes = {scene("red", "square"), scene("red", "circle"), scene("blue", "square"), scene("blue", "circle")};
    const OracleAnswerModel model(vocab(), 0.0);
    std::vector<Question> qs = {parse_polar_question("Is there a red square?", parser(), vocab()),
                                parse_polar_question("Is there a red shape?", parser(), vocab())};
    QuestionPool pool(qs, false);
    const auto b = init_uniform(4);
    const double square = expected_surprisal(qs[0], b, model, ctx, vocab());
    const double shape = expected_surprisal(qs[1], b, model, ctx, vocab());
    QuestionSelector selector(ctx, model, vocab());
    const auto pick = selector.select(pool, b, Strategy::eig, 0);
    const std::string chosen = pick ? question_text(pool.at(*pick->question)) : "";
    const bool ok = chosen == "Is there a red shape?" && std::abs(shape - 0.6931) < 1e-4 &&
                    std::abs(square - 0.8240) < 1e-4;
    return std::pair{ok, fmt("picked \"%s\"; red shape %.4f nats, red square %.4f nats", chosen.c_str(), shape, square)};
  });

  criterion(7, "answer classifier", [] {
    const auto train = selfsup_pairs(5000, 71);
    const auto held_out = selfsup_pairs(5000, 72);
    const Featurizer featurizer(vocab());
    const auto model = train_answerer(train.pairs, featurizer, {});
    const auto ev = evaluate_answerer(model, featurizer, held_out.pairs, vocab());

    // Central differences on the trained weights over a subset of the data.
    const auto examples = to_examples(std::vector<LabeledPair>(train.pairs.begin(), train.pairs.begin() + 500),
                                      featurizer);
    const auto grad = cross_entropy_gradient(model.weights, examples);
    std::vector<double> w = model.weights;
    double worst = 0.0;
    const double h = 1e-5;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double keep = w[i];
      w[i] = keep + h;
      const double up = mean_cross_entropy(w, examples);
      w[i] = keep - h;
      const double down = mean_cross_entropy(w, examples);
      w[i] = keep;
      worst = std::max(worst, std::abs((up - down) / (2 * h) - grad[i]));
    }
    const double fnr = train.false_negative_rate();
    const bool ok = ev.accuracy_vs_ground_truth >= 0.90 && worst < 1e-5 && fnr < 0.10;
    return std::pair{ok, fmt("held-out accuracy %.4f (vs self-labels %.4f) on %zu pairs; gradient check max err %.2e over "
                             "%zu weights; generator false-negative rate %.4f",
                             ev.accuracy_vs_ground_truth, ev.accuracy_vs_labels, ev.count, worst, w.size(), fnr)};
  });

  criterion(8, "what-question extension", [] {
    auto spec = batch(25, Strategy::eig, ContextMode::random, 1000, 8);
    spec.world = WorldConfig::relational();
    const auto c = compare_what(spec, vocab(), parser());
    const bool ok = c.paired && c.polar_what.win_rate >= c.polar.win_rate;
    return std::pair{ok, fmt("polar %.3f [%.3f,%.3f], polar+what %.3f [%.3f,%.3f], paired=%s", c.polar.win_rate,
                             c.polar.win_ci.lo, c.polar.win_ci.hi, c.polar_what.win_rate, c.polar_what.win_ci.lo,
                             c.polar_what.win_ci.hi, c.paired ? "yes" : "no")};
  });

  criterion(9, "description conditioning", [] {
    auto spec = batch(10, Strategy::eig, ContextMode::random, 1000, 9);
    spec.game.with_description = true;
    spec.game.entropy_threshold_bits = 1.0;
    const auto r = simulate_batch(spec, vocab(), parser());
    const auto& before = r.curve[0];
    const double chance = 1.0 / 10.0;
    const bool ok = before.ci.lo > chance && r.win_ci.lo > before.ci.hi;
    return std::pair{ok, fmt("chance %.3f; before questions %.3f [%.3f,%.3f]; after %.3f [%.3f,%.3f] (mean %.2f questions)",
                             chance, before.win_rate, before.ci.lo, before.ci.hi, r.win_rate, r.win_ci.lo, r.win_ci.hi,
                             r.questions.mean)};
  });

  criterion(10, "threshold sweep", [] {
    const std::vector<double> thresholds = {3.0, 2.0, 1.0, 0.5, 0.1};
    const auto rows = threshold_sweep(thresholds, batch(10, Strategy::eig, ContextMode::random, 1000, 10), vocab(),
                                      parser());
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail += fmt("%.1f bits: %.2f questions, win %.3f; ", rows[i].threshold_bits, rows[i].questions.mean,
                    rows[i].win_rate);
      if (i > 0)
        ok = ok && rows[i].questions.mean >= rows[i - 1].questions.mean && rows[i].win_rate >= rows[i - 1].win_rate;
    }
    return std::pair{ok, detail + "(thresholds descending)"};
  });

  criterion(11, "determinism", [] {
    auto spec = batch(10, Strategy::eig, ContextMode::random, 200, 11);
    spec.world = WorldConfig::relational();
    spec.game.include_what = true;
    spec.game.epsilon = 0.1;
    spec.game.with_description = true;
    spec.game.entropy_threshold_bits = 0.5;
    spec.game.record_scores = true;
    const auto a = simulate_batch(spec, vocab(), parser());
    const auto b = simulate_batch(spec, vocab(), parser());
    std::size_t identical = 0, replayed = 0;
    for (std::size_t i = 0; i < a.transcripts.size(); ++i) {
      const auto text = a.transcripts[i].serialize(vocab());
      identical += text == b.transcripts[i].serialize(vocab());
      const auto again = replay(Transcript::parse(text, vocab()), vocab(), parser());
      bool same = again.initial_posterior == a.transcripts[i].initial_posterior &&
                  again.turns.size() == a.transcripts[i].turns.size();
      for (std::size_t t = 0; same && t < again.turns.size(); ++t)
        same = again.turns[t].posterior == a.transcripts[i].turns[t].posterior;
      replayed += same;
    }
    const auto n = a.transcripts.size();
    return std::pair{identical == n && replayed == n,
                     fmt("%zu/%zu transcripts byte-identical, %zu/%zu replays bit-exact", identical, n, replayed, n)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
