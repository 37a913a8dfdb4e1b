#include "clarify/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

constexpr double kZ = 1.96;

// Runs fn(i) for i in [0, n) on a small thread pool; rethrows the first error.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::exception_ptr error;
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (error || next >= n) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

Interval proportion_ci(double p, std::size_t n) {
  if (n == 0) return {p, p};
  const double half = kZ * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return {p - half, p + half};
}

MeanStat mean_ci(std::span<const double> xs) {
  MeanStat s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  const double half = kZ * s.stddev / std::sqrt(static_cast<double>(xs.size()));
  s.ci = {s.mean - half, s.mean + half};
  return s;
}

GamePlan plan_game(const BatchSpec& spec, const Vocabulary& vocab, std::size_t index) {
  const std::uint64_t i = index;
  GamePlan plan;
  plan.context = gen_context(vocab, spec.world, derive_seed(spec.seed, {i, 1}), spec.game.k, spec.mode);
  plan.target = static_cast<std::size_t>(derive_seed(spec.seed, {i, 2}) % spec.game.k);
  plan.game_seed = derive_seed(spec.seed, {i, 3});
  return plan;
}

BatchResult simulate_batch(const BatchSpec& spec, const Vocabulary& vocab, const Parser& parser,
                           const LearnedModels& learned) {
  if (spec.n_games < 1) throw PreconditionError("a batch needs at least one game");
  spec.game.validate();
  spec.world.validate();

  BatchResult r;
  r.transcripts.resize(spec.n_games);
  parallel_for(spec.n_games, spec.threads, [&](std::size_t i) {
    auto plan = plan_game(spec, vocab, i);
    GameConfig config = spec.game;
    config.seed = plan.game_seed;
    r.transcripts[i] = run_game(config, vocab, parser, plan.context, plan.target, learned);
  });

  const auto n = spec.n_games;
  const auto max_t = static_cast<std::size_t>(spec.game.max_questions);
  std::vector<std::size_t> wins_at(max_t + 1, 0);
  std::vector<double> asked;
  std::size_t wins = 0;
  for (const auto& t : r.transcripts) {
    for (std::size_t step = 0; step <= max_t; ++step) {
      const auto& post = t.posterior_at(step);
      const auto guess = static_cast<std::size_t>(std::max_element(post.begin(), post.end()) - post.begin());
      wins_at[step] += guess == t.target;
    }
    wins += t.win;
    asked.push_back(static_cast<double>(t.turns.size()));
    r.context_hashes.push_back(t.context.hash());
  }
  for (std::size_t step = 0; step <= max_t; ++step) {
    const double p = static_cast<double>(wins_at[step]) / static_cast<double>(n);
    r.curve.push_back({static_cast<int>(step), p, proportion_ci(p, n)});
  }
  r.win_rate = static_cast<double>(wins) / static_cast<double>(n);
  r.win_ci = proportion_ci(r.win_rate, n);
  r.questions = mean_ci(asked);
  return r;
}

void write_curve_csv(std::ostream& out, const BatchResult& result) {
  out << "t,win_rate,ci_low,ci_high\n";
  for (const auto& p : result.curve) out << p.t << ',' << p.win_rate << ',' << p.ci.lo << ',' << p.ci.hi << '\n';
}

void write_transcripts(std::ostream& out, const BatchResult& result, const Vocabulary& vocab) {
  for (const auto& t : result.transcripts) out << t.serialize(vocab);
}

EntropyAfterOne entropy_after_one(BatchSpec spec, const Vocabulary& vocab, const Parser& parser,
                                  const LearnedModels& learned) {
  spec.game.max_questions = 1;
  spec.game.entropy_threshold_bits = 0.0;
  spec.game.with_description = false;
  const auto batch = simulate_batch(spec, vocab, parser, learned);
  std::vector<double> h;
  h.reserve(batch.transcripts.size());
  for (const auto& t : batch.transcripts)
    h.push_back(t.turns.empty() ? t.initial_entropy_bits : t.turns.front().entropy_bits);
  return {mean_ci(h), batch.context_hashes};
}

std::vector<SweepRow> threshold_sweep(const std::vector<double>& thresholds_bits, BatchSpec spec,
                                      const Vocabulary& vocab, const Parser& parser, const LearnedModels& learned) {
  if (!std::is_sorted(thresholds_bits.begin(), thresholds_bits.end(), std::greater<>()))
    throw PreconditionError("thresholds must be sorted in descending order");
  std::vector<SweepRow> rows;
  for (double th : thresholds_bits) {
    spec.game.entropy_threshold_bits = th;
    const auto batch = simulate_batch(spec, vocab, parser, learned);
    SweepRow row;
    row.threshold_bits = th;
    row.questions = batch.questions;
    row.win_rate = batch.win_rate;
    row.win_ci = batch.win_ci;
    for (const auto& t : batch.transcripts) {
      row.per_game_questions.push_back(static_cast<int>(t.turns.size()));
      row.per_game_wins.push_back(t.win);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

WhatComparison compare_what(BatchSpec spec, const Vocabulary& vocab, const Parser& parser,
                            const LearnedModels& learned) {
  WhatComparison c;
  spec.game.include_what = false;
  c.polar = simulate_batch(spec, vocab, parser, learned);
  spec.game.include_what = true;
  c.polar_what = simulate_batch(spec, vocab, parser, learned);
  c.paired = c.polar.context_hashes == c.polar_what.context_hashes;
  return c;
}

}  // namespace clarify
