#include "clarify/semantics.hpp"

#include "clarify/errors.hpp"

namespace clarify {

namespace {

struct ResolvedPhrase {
  std::optional<int> color;
  std::optional<int> shape;  // empty for the generic noun
  std::optional<int> verb;
  std::vector<ResolvedPhrase> object;
};

ResolvedPhrase resolve(const NounPhrase& np, const Vocabulary& vocab) {
  ResolvedPhrase r;
  if (np.color) {
    r.color = vocab.color_index(*np.color);
    if (!r.color) throw SemanticGapError("color outside vocabulary: " + *np.color);
  }
  if (np.noun != vocab.generic_noun || vocab.generic_noun.empty()) {
    r.shape = vocab.shape_index(np.noun);
    if (!r.shape) throw SemanticGapError("noun outside vocabulary: " + np.noun);
  }
  if (np.participle) {
    r.verb = vocab.verb_index(np.participle->verb);
    if (!r.verb) throw SemanticGapError("verb outside vocabulary: " + np.participle->verb);
    if (np.participle->object.size() != 1) throw PreconditionError("participle needs one object phrase");
    r.object.push_back(resolve(np.participle->object.front(), vocab));
  }
  return r;
}

bool matches(const Scene& scene, const ResolvedPhrase& p, const SceneObject& o) {
  if (p.color && *p.color != o.color) return false;
  if (p.shape && *p.shape != o.shape) return false;
  if (!p.verb) return true;
  for (const auto& rel : scene.relations) {
    if (rel.subject_id != o.id || rel.verb != *p.verb) continue;
    if (matches(scene, p.object.front(), scene.objects[static_cast<std::size_t>(rel.object_id)])) return true;
  }
  return false;
}

}  // namespace

bool satisfies(const Scene& scene, const NounPhrase& np, const Vocabulary& vocab) {
  const auto resolved = resolve(np, vocab);
  for (const auto& o : scene.objects)
    if (matches(scene, resolved, o)) return true;
  return false;
}

std::optional<std::string> eval_what(const Scene& scene, const WhatQuestion& q, const Vocabulary& vocab) {
  const auto shape = vocab.shape_index(q.nn);
  const auto verb = vocab.verb_index(q.vbg);
  if (!shape || !verb) return std::nullopt;
  const Relation* best = nullptr;
  for (const auto& rel : scene.relations) {
    if (rel.verb != *verb) continue;
    if (scene.objects[static_cast<std::size_t>(rel.subject_id)].shape != *shape) continue;
    if (!best || rel.subject_id < best->subject_id) best = &rel;
  }
  if (!best) return std::nullopt;
  return vocab.shapes[static_cast<std::size_t>(scene.objects[static_cast<std::size_t>(best->object_id)].shape)];
}

}  // namespace clarify
