#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "clarify/game.hpp"
#include "clarify/grammar.hpp"
#include "clarify/scene.hpp"

namespace clarify {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// p +- 1.96 sqrt(p (1 - p) / n).
Interval proportion_ci(double p, std::size_t n);

struct MeanStat {
  double mean = 0.0;
  double stddev = 0.0;
  Interval ci;  // mean +- 1.96 sd / sqrt(n)
  std::size_t n = 0;
};
MeanStat mean_ci(std::span<const double> xs);

/// A batch of games. Game i draws its context, target and game seed from
/// (seed, i) alone, so batches that differ only in game settings are paired.
struct BatchSpec {
  GameConfig game;  // game.seed is replaced per game
  WorldConfig world;
  ContextMode mode = ContextMode::distinct;
  std::size_t n_games = 1000;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: one per hardware thread
};

struct GamePlan {
  Context context;
  std::size_t target = 0;
  std::uint64_t game_seed = 0;
};
GamePlan plan_game(const BatchSpec& spec, const Vocabulary& vocab, std::size_t index);

struct CurvePoint {
  int t = 0;
  double win_rate = 0.0;
  Interval ci;
};

struct BatchResult {
  // Fraction of games whose argmax posterior is the target after t
  // questions, t = 0..max_questions. Finished games carry their last belief.
  std::vector<CurvePoint> curve;
  double win_rate = 0.0;
  Interval win_ci;
  MeanStat questions;
  std::vector<std::uint64_t> context_hashes;
  std::vector<Transcript> transcripts;
};

BatchResult simulate_batch(const BatchSpec& spec, const Vocabulary& vocab, const Parser& parser,
                           const LearnedModels& learned = {});

// "t,win_rate,ci_low,ci_high" rows.
void write_curve_csv(std::ostream& out, const BatchResult& result);
void write_transcripts(std::ostream& out, const BatchResult& result, const Vocabulary& vocab);

struct EntropyAfterOne {
  MeanStat entropy_bits;
  std::vector<std::uint64_t> context_hashes;
};

/// One question per game from the uniform prior; entropy of the posterior.
EntropyAfterOne entropy_after_one(BatchSpec spec, const Vocabulary& vocab, const Parser& parser,
                                  const LearnedModels& learned = {});

struct SweepRow {
  double threshold_bits = 0.0;
  MeanStat questions;
  double win_rate = 0.0;
  Interval win_ci;
  std::vector<int> per_game_questions;
  std::vector<bool> per_game_wins;
};

/// Thresholds must be sorted in descending order. Every row replays the
/// same games.
std::vector<SweepRow> threshold_sweep(const std::vector<double>& thresholds_bits, BatchSpec spec,
                                      const Vocabulary& vocab, const Parser& parser,
                                      const LearnedModels& learned = {});

struct WhatComparison {
  BatchResult polar;
  BatchResult polar_what;
  // Both arms saw identical contexts.
  bool paired = false;
};
WhatComparison compare_what(BatchSpec spec, const Vocabulary& vocab, const Parser& parser,
                            const LearnedModels& learned = {});

}  // namespace clarify
