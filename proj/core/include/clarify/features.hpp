#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clarify/scene.hpp"

namespace clarify {

/// Binary feature map for (question, scene) pairs.
///
/// Three blocks, concatenated:
///   question  - bag of words over the question vocabulary (closed-class
///               words, colors, shape lemmas, the generic noun, verbs);
///               plural nouns count as their lemma
///   scene     - multi-hot over colors, shapes, verbs and (color, shape) pairs
///   cross     - question word x scene feature, so that a linear model can
///               score agreement between what is asked and what is present
class Featurizer {
 public:
  explicit Featurizer(const Vocabulary& vocab);

  std::size_t question_dims() const noexcept { return question_words_.size(); }
  std::size_t scene_dims() const noexcept { return scene_dims_; }
  std::size_t dimension() const noexcept { return question_dims() * (1 + scene_dims_) + scene_dims_; }

  /// Sorted indices of the features that are 1. Throws SemanticGapError on
  /// a question token outside the question vocabulary.
  std::vector<std::uint32_t> active(std::string_view question_text, const Scene& scene) const;

  std::vector<double> featurize(std::string_view question_text, const Scene& scene) const;

  std::vector<std::uint32_t> question_block(std::string_view question_text) const;
  std::vector<std::uint32_t> scene_block(const Scene& scene) const;  // indices local to the scene block

  const std::string& feature_name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }

 private:
  const Vocabulary* vocab_;
  std::vector<std::string> question_words_;
  std::size_t scene_dims_ = 0;
  std::vector<std::string> names_;
};

}  // namespace clarify
