#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clarify/rng.hpp"

namespace clarify {

/// Word inventory of the synthetic world.
///
/// Colors and shapes are the open-class words a caption can mention. Verbs
/// (present participles) only appear in relational captions. The generic
/// noun ("shape") is accepted by the grammar and matches any shape, but the
/// captioner never emits it.
struct Vocabulary {
  std::vector<std::string> colors;
  std::vector<std::string> shapes;
  std::vector<std::string> verbs;
  std::vector<std::string> closed_class;
  std::string generic_noun;
  // Nouns that take no indefinite article ("Is there food?"). Empty for the
  // shape world.
  std::vector<std::string> mass_nouns;

  /// 7 colors, 8 shapes, 3 verbs.
  static const Vocabulary& standard();

  // Throws ConfigError if words repeat, are not lowercase, or the lists are empty.
  void validate() const;

  std::optional<int> color_index(std::string_view word) const;
  std::optional<int> shape_index(std::string_view word) const;
  std::optional<int> verb_index(std::string_view word) const;

  std::string plural(std::string_view noun) const;

  struct NounForm {
    std::string lemma;
    bool plural = false;
  };
  // Resolves a shape or generic noun in singular or plural form.
  std::optional<NounForm> noun_form(std::string_view word) const;

  // Words a `what` question can be answered with: colors then shapes.
  std::vector<std::string> answer_words() const;

  bool is_mass_noun(std::string_view noun) const;
};

// "an" before a vowel-initial word.
std::string_view indefinite_article(std::string_view next_word);

struct SceneObject {
  int id = 0;
  int color = 0;  // index into Vocabulary::colors
  int shape = 0;  // index into Vocabulary::shapes

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Relation {
  int subject_id = 0;
  int verb = 0;  // index into Vocabulary::verbs
  int object_id = 0;

  friend bool operator==(const Relation&, const Relation&) = default;
};

struct Scene {
  std::vector<SceneObject> objects;
  std::vector<Relation> relations;

  // Canonical text of the sorted (color, shape) multiset plus relations
  // rewritten in terms of attributes. Equal contents give equal signatures.
  std::string signature() const;

  // Checks id contiguity, attribute ranges and relation endpoints.
  void validate(const Vocabulary& vocab) const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

enum class ContextMode { random, split, distinct };

std::string_view to_string(ContextMode mode);
ContextMode context_mode_from_string(std::string_view name);

/// Shape of the scenes gen_context draws.
struct WorldConfig {
  int min_objects = 1;
  int max_objects = 1;
  // Probability that a scene with at least two objects carries a relation.
  double relation_prob = 0.0;

  // Single colored shapes, no relations.
  static WorldConfig shapes_only() { return {}; }
  // Two objects joined by a relation in every scene.
  static WorldConfig relational() { return {2, 2, 1.0}; }

  void validate() const;
};

struct Context {
  std::vector<Scene> scenes;
  ContextMode mode = ContextMode::random;
  std::uint64_t seed = 0;
  // The two shape categories of a split context.
  std::optional<std::pair<int, int>> split_shapes;

  std::size_t size() const noexcept { return scenes.size(); }
  // FNV-1a over the scene signatures; used to verify paired designs.
  std::uint64_t hash() const;
};

Scene random_scene(const Vocabulary& vocab, const WorldConfig& world, Rng& rng,
                   std::optional<int> fixed_shape = std::nullopt);

/// Number of pairwise-distinct scene signatures the world can produce, when
/// that number is finite and cheap to state (relations disabled). Returns
/// nullopt when relations are enabled.
std::optional<std::uint64_t> signature_capacity(const Vocabulary& vocab, const WorldConfig& world);

/// Draws a context of k scenes.
///
/// random   - independent scenes; repeats allowed.
/// split    - two shape categories drawn at random; ceil(k/2) scenes use only
///            the first shape and floor(k/2) only the second; order shuffled.
/// distinct - rejection-sampled until all signatures differ. Throws
///            CapacityError when the attribute space is too small.
Context gen_context(const Vocabulary& vocab, const WorldConfig& world, std::uint64_t seed,
                    std::size_t k, ContextMode mode);

}  // namespace clarify
