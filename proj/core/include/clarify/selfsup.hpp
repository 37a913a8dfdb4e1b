#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "clarify/answers.hpp"
#include "clarify/captioner.hpp"
#include "clarify/features.hpp"
#include "clarify/grammar.hpp"
#include "clarify/logistic.hpp"
#include "clarify/questions.hpp"

namespace clarify {

struct LabeledPair {
  PolarQuestion question;
  Scene scene;
  bool label = false;  // yes
};

struct SelfSupDataset {
  std::vector<LabeledPair> pairs;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  // "no"-labelled pairs whose question is in fact true of the scene.
  std::size_t false_negatives = 0;

  double false_negative_rate() const {
    return negatives == 0 ? 0.0 : static_cast<double>(false_negatives) / static_cast<double>(negatives);
  }
};

/// Labels (question, scene) pairs by provenance alone.
///
/// Every question decomposed from a scene's own captions is a "yes" pair.
/// For each of them, `negatives_per_positive` questions decomposed from a
/// uniformly drawn other scene are paired with this scene as "no". Ground
/// truth is only consulted to count false negatives, never to relabel.
SelfSupDataset gen_selfsup_data(const std::vector<Scene>& scenes, const std::vector<std::vector<Caption>>& captions,
                                const Parser& parser, const Vocabulary& vocab, std::size_t negatives_per_positive,
                                std::uint64_t seed);

/// Scenes with `per_scene` captions each, for dataset generation.
struct CaptionedScenes {
  std::vector<Scene> scenes;
  std::vector<std::vector<Caption>> captions;
};
CaptionedScenes sample_captioned_scenes(const Vocabulary& vocab, const WorldConfig& world, std::size_t n,
                                        std::size_t per_scene, std::uint64_t seed);

std::vector<SparseExample> to_examples(const std::vector<LabeledPair>& pairs, const Featurizer& featurizer);

LogisticModel train_answerer(const std::vector<LabeledPair>& pairs, const Featurizer& featurizer,
                             const TrainingOptions& options);

struct AnswererEvaluation {
  std::size_t count = 0;
  double accuracy_vs_labels = 0.0;        // against the self-supervised labels
  double accuracy_vs_ground_truth = 0.0;  // against eval_polar
};
AnswererEvaluation evaluate_answerer(const LogisticModel& model, const Featurizer& featurizer,
                                     const std::vector<LabeledPair>& pairs, const Vocabulary& vocab);

/// (what question, scene, answer) triples: a scene's own relational
/// captions give the object noun; questions from other scenes give N/A.
struct WhatTriple {
  WhatQuestion question;
  Scene scene;
  AnswerId answer = kNotApplicable;
};
std::vector<WhatTriple> gen_what_data(const std::vector<Scene>& scenes, const std::vector<std::vector<Caption>>& captions,
                                      const Parser& parser, const Vocabulary& vocab,
                                      std::size_t negatives_per_positive, std::uint64_t seed);

WhatModel train_what_model(const std::vector<WhatTriple>& triples, const Featurizer& featurizer,
                           const Vocabulary& vocab, const TrainingOptions& options);

// Line-delimited records {"question": ..., "scene": {...}, "label": "yes"|"no"}.
void write_pairs(std::ostream& out, const std::vector<LabeledPair>& pairs, const Vocabulary& vocab);
std::vector<LabeledPair> read_pairs(std::istream& in, const Parser& parser, const Vocabulary& vocab);

}  // namespace clarify
