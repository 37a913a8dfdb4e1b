#include "clarify/features.hpp"

#include <algorithm>

#include "clarify/errors.hpp"
#include "clarify/grammar.hpp"

namespace clarify {

Featurizer::Featurizer(const Vocabulary& vocab) : vocab_(&vocab) {
  for (const auto* list : {&vocab.closed_class, &vocab.colors, &vocab.shapes})
    question_words_.insert(question_words_.end(), list->begin(), list->end());
  if (!vocab.generic_noun.empty()) question_words_.push_back(vocab.generic_noun);
  question_words_.insert(question_words_.end(), vocab.verbs.begin(), vocab.verbs.end());

  std::vector<std::string> scene_names;
  for (const auto& c : vocab.colors) scene_names.push_back("color=" + c);
  for (const auto& s : vocab.shapes) scene_names.push_back("shape=" + s);
  for (const auto& v : vocab.verbs) scene_names.push_back("verb=" + v);
  for (const auto& c : vocab.colors)
    for (const auto& s : vocab.shapes) scene_names.push_back("pair=" + c + "+" + s);
  scene_dims_ = scene_names.size();

  for (const auto& w : question_words_) names_.push_back("q:" + w);
  for (const auto& s : scene_names) names_.push_back("s:" + s);
  for (const auto& w : question_words_)
    for (const auto& s : scene_names) names_.push_back("x:" + w + "|" + s);
}

std::vector<std::uint32_t> Featurizer::question_block(std::string_view question_text) const {
  std::vector<std::uint32_t> out;
  for (const auto& tok : tokenize(question_text)) {
    std::string word = tok;
    if (auto form = vocab_->noun_form(tok)) word = form->lemma;
    auto it = std::find(question_words_.begin(), question_words_.end(), word);
    if (it == question_words_.end()) throw SemanticGapError("question token outside vocabulary: " + tok);
    out.push_back(static_cast<std::uint32_t>(it - question_words_.begin()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint32_t> Featurizer::scene_block(const Scene& scene) const {
  const auto colors = static_cast<std::uint32_t>(vocab_->colors.size());
  const auto shapes = static_cast<std::uint32_t>(vocab_->shapes.size());
  const auto verbs = static_cast<std::uint32_t>(vocab_->verbs.size());
  std::vector<std::uint32_t> out;
  for (const auto& o : scene.objects) {
    const auto c = static_cast<std::uint32_t>(o.color);
    const auto s = static_cast<std::uint32_t>(o.shape);
    out.push_back(c);
    out.push_back(colors + s);
    out.push_back(colors + shapes + verbs + c * shapes + s);
  }
  for (const auto& r : scene.relations) out.push_back(colors + shapes + static_cast<std::uint32_t>(r.verb));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint32_t> Featurizer::active(std::string_view question_text, const Scene& scene) const {
  const auto q = question_block(question_text);
  const auto s = scene_block(scene);
  const auto q_dims = static_cast<std::uint32_t>(question_dims());
  const auto s_dims = static_cast<std::uint32_t>(scene_dims_);
  std::vector<std::uint32_t> out;
  out.reserve(q.size() + s.size() + q.size() * s.size());
  for (auto i : q) out.push_back(i);
  for (auto j : s) out.push_back(q_dims + j);
  for (auto i : q)
    for (auto j : s) out.push_back(q_dims + s_dims + i * s_dims + j);
  return out;  // already sorted: blocks are laid out in this order
}

std::vector<double> Featurizer::featurize(std::string_view question_text, const Scene& scene) const {
  std::vector<double> dense(dimension(), 0.0);
  for (auto i : active(question_text, scene)) dense[i] = 1.0;
  return dense;
}

}  // namespace clarify
