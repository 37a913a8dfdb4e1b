#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clarify/captioner.hpp"
#include "clarify/grammar.hpp"
#include "clarify/scene.hpp"

namespace clarify {

struct NounPhrase;

struct Participle {
  std::string verb;
  std::vector<NounPhrase> object;  // exactly one element
};

/// Structured content of an NP: what a polar question asks about.
struct NounPhrase {
  std::string determiner;  // as written in the source caption
  std::optional<std::string> color;
  std::string noun;  // singular lemma; may be the generic noun
  bool plural = false;
  std::optional<Participle> participle;

  // Tokens with agreement applied: "a"/"an" for singular count nouns, no
  // article for mass nouns, "some" for plurals (omitted at top level when
  // `with_determiner` is false).
  std::vector<std::string> surface(const Vocabulary& vocab, bool with_determiner = true) const;

  friend bool operator==(const NounPhrase& a, const NounPhrase& b);
};

/// Reads an NP-labelled parse tree into a NounPhrase.
NounPhrase noun_phrase_from_tree(const ParseTree& np, const Vocabulary& vocab);

struct Provenance {
  int scene_id = 0;
  int caption_id = 0;

  friend auto operator<=>(const Provenance&, const Provenance&) = default;
};

struct PolarQuestion {
  std::string text;
  NounPhrase predicate;
  std::vector<Provenance> provenance;  // sorted, unique
  // Derived from a participle-stripped NP rather than a literal subtree.
  bool from_stripped_np = false;
};

struct WhatQuestion {
  std::string text;
  std::string nn;   // subject shape noun
  std::string vbg;  // verb
  std::vector<Provenance> provenance;
};

using Question = std::variant<PolarQuestion, WhatQuestion>;

enum class QuestionKind { polar, what };

const std::string& question_text(const Question& q);
QuestionKind question_kind(const Question& q);
const std::vector<Provenance>& question_provenance(const Question& q);
bool derived_from_scene(const Question& q, int scene_id);

/// "Is there a <NP>?" / "Is there an <NP>?" for singular heads, "Are there
/// <NP>?" (no determiner) for plural heads.
PolarQuestion polar_from_np(const ParseTree& np, const Vocabulary& vocab);
PolarQuestion polar_from_phrase(const NounPhrase& np, const Vocabulary& vocab);

/// Inverse of polar_from_np's surface form: parses "Is there ...?" / "Are
/// there ...?" back into a question. Throws ParseError on other input.
PolarQuestion parse_polar_question(std::string_view text, const Parser& parser, const Vocabulary& vocab);

/// One "What is the <nn> <vbg>?" per NP that carries a participle, pre-order.
std::vector<WhatQuestion> what_from_caption(const ParseTree& tree, const Vocabulary& vocab);

std::string what_text(std::string_view nn, std::string_view vbg);

/// Candidate questions for one game.
///
/// Polar questions come first, then `what` questions; within each group the
/// order is first appearance over (scene, caption, NP). Texts are unique;
/// duplicates merge their provenance.
class QuestionPool {
 public:
  QuestionPool() = default;
  QuestionPool(std::vector<Question> questions, bool full_caption);

  std::size_t size() const noexcept { return questions_.size(); }
  bool empty() const noexcept { return questions_.empty(); }
  const Question& at(std::size_t i) const { return questions_.at(i); }
  const std::vector<Question>& questions() const noexcept { return questions_; }

  bool is_asked(std::size_t i) const { return asked_.at(i); }
  void mark_asked(std::size_t i);
  std::size_t unasked_count() const noexcept { return unasked_; }
  std::optional<std::size_t> find(std::string_view text) const;

  // Built without NP decomposition.
  bool full_caption() const noexcept { return full_caption_; }

  /// One question per line: text, type ("polar"/"what"), provenance as
  /// comma-separated scene:caption pairs; tab-separated.
  std::string dump() const;

 private:
  std::vector<Question> questions_;
  std::vector<bool> asked_;
  std::size_t unasked_ = 0;
  bool full_caption_ = false;
};

struct PoolOptions {
  bool include_what = false;
  // One polar question per whole caption, no NP decomposition.
  bool full_caption = false;
};

/// Builds the candidate pool from per-scene captions (outer index = scene).
/// Throws ConfigError if any scene has no captions.
QuestionPool build_pool(const std::vector<std::vector<Caption>>& captions, const Parser& parser,
                        const Vocabulary& vocab, const PoolOptions& options);

}  // namespace clarify
