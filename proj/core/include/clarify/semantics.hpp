#pragma once

#include <optional>
#include <string>

#include "clarify/questions.hpp"
#include "clarify/scene.hpp"

namespace clarify {

// Ground-truth meaning of questions against a single scene.

// True iff some object in the scene satisfies the phrase. A participle
// additionally requires a relation from that object, with the same verb, to
// an object satisfying the embedded phrase. Plural phrases are existence
// checks as well. Throws SemanticGapError on words outside the vocabulary.
bool satisfies(const Scene& scene, const NounPhrase& np, const Vocabulary& vocab);

inline bool eval_polar(const Scene& scene, const PolarQuestion& q, const Vocabulary& vocab) {
  return satisfies(scene, q.predicate, vocab);
}

/// Shape noun of the object of the first relation (lowest subject id, then
/// list order) whose subject has shape `nn` and whose verb is `vbg`.
std::optional<std::string> eval_what(const Scene& scene, const WhatQuestion& q, const Vocabulary& vocab);

}  // namespace clarify
