#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clarify/scene.hpp"

namespace clarify {

struct Caption {
  std::vector<std::string> tokens;
  int scene_id = 0;
  int caption_id = 0;

  std::string text() const;
};

struct WeightedUtterance {
  std::vector<std::string> tokens;
  double probability = 0.0;
};

/// Generative caption model for one scene.
///
/// With a relation present, the relational template "a <color> <shape>
/// <verb> a <color> <shape>" takes probability 1/2. The remaining mass is
/// split evenly over (object, template) for the templates "a <color>
/// <shape>" and "a <shape>". Identical utterances from different
/// derivations are merged, so the result is a distribution over distinct
/// token sequences, sorted by descending probability then text.
std::vector<WeightedUtterance> caption_distribution(const Scene& scene, const Vocabulary& vocab);

/// One caption sampled from caption_distribution.
Caption caption(const Scene& scene, const Vocabulary& vocab, std::uint64_t seed, int scene_id = 0);

/// Up to n distinct captions, sampled without replacement. Fewer are
/// returned when the scene admits fewer utterances.
std::vector<Caption> sample_captions(const Scene& scene, const Vocabulary& vocab, std::size_t n,
                                     std::uint64_t seed, int scene_id = 0);

/// Captions for every scene of a context (outer index = scene).
std::vector<std::vector<Caption>> caption_context(const Context& context, const Vocabulary& vocab,
                                                  std::size_t per_scene, std::uint64_t seed);

/// p(u | scene) under the caption model; 0 for utterances the model cannot
/// emit (ungrammatical or false of the scene).
double caption_likelihood(const std::vector<std::string>& utterance, const Scene& scene,
                          const Vocabulary& vocab);

}  // namespace clarify
