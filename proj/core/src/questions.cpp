#include "clarify/questions.hpp"

#include <algorithm>
#include <map>

#include "clarify/errors.hpp"

namespace clarify {

bool operator==(const NounPhrase& a, const NounPhrase& b) {
  if (a.color != b.color || a.noun != b.noun || a.plural != b.plural) return false;
  if (a.participle.has_value() != b.participle.has_value()) return false;
  if (!a.participle) return true;
  return a.participle->verb == b.participle->verb && a.participle->object == b.participle->object;
}

std::vector<std::string> NounPhrase::surface(const Vocabulary& vocab, bool with_determiner) const {
  std::vector<std::string> out;
  const std::string head = plural ? vocab.plural(noun) : noun;
  const std::string& first = color ? *color : head;
  if (with_determiner) {
    if (plural)
      out.emplace_back("some");
    else if (!vocab.is_mass_noun(noun))
      out.emplace_back(indefinite_article(first));
  }
  if (color) out.push_back(*color);
  out.push_back(head);
  if (participle) {
    out.push_back(participle->verb);
    auto obj = participle->object.front().surface(vocab, true);
    out.insert(out.end(), obj.begin(), obj.end());
  }
  return out;
}

NounPhrase noun_phrase_from_tree(const ParseTree& np, const Vocabulary& vocab) {
  if (np.label != "NP") throw PreconditionError("expected an NP node, got " + np.label);
  NounPhrase out;
  if (const auto* det = np.child("DET"); det && !det->children.empty()) out.determiner = det->children[0].label;
  if (const auto* adjp = np.child("ADJP")) {
    const auto* clr = adjp->child("CLR");
    if (!clr || clr->children.empty()) throw PreconditionError("ADJP without a color");
    const std::string& word = clr->children[0].label;
    if (!vocab.color_index(word)) throw SemanticGapError("unknown color word: " + word);
    out.color = word;
  }
  const auto* n = np.child("N");
  if (!n || n->children.empty()) throw PreconditionError("NP without a head noun");
  const std::string& word = n->children[0].label;
  auto form = vocab.noun_form(word);
  if (!form) throw SemanticGapError("unknown noun: " + word);
  out.noun = form->lemma;
  out.plural = form->plural;
  if (const auto* partp = np.child("PARTP")) {
    const auto* vbg = partp->child("VBG");
    const auto* obj = partp->child("NP");
    if (!vbg || vbg->children.empty() || !obj) throw PreconditionError("malformed participle phrase");
    const std::string& verb = vbg->children[0].label;
    if (!vocab.verb_index(verb)) throw SemanticGapError("unknown verb: " + verb);
    out.participle = Participle{verb, {noun_phrase_from_tree(*obj, vocab)}};
  }
  return out;
}

const std::string& question_text(const Question& q) {
  return std::visit([](const auto& v) -> const std::string& { return v.text; }, q);
}

QuestionKind question_kind(const Question& q) {
  return std::holds_alternative<PolarQuestion>(q) ? QuestionKind::polar : QuestionKind::what;
}

const std::vector<Provenance>& question_provenance(const Question& q) {
  return std::visit([](const auto& v) -> const std::vector<Provenance>& { return v.provenance; }, q);
}

bool derived_from_scene(const Question& q, int scene_id) {
  const auto& prov = question_provenance(q);
  return std::any_of(prov.begin(), prov.end(), [&](const Provenance& p) { return p.scene_id == scene_id; });
}

PolarQuestion polar_from_phrase(const NounPhrase& np, const Vocabulary& vocab) {
  PolarQuestion q;
  q.predicate = np;
  const auto tokens = np.surface(vocab, !np.plural);
  q.text = (np.plural ? "Are there " : "Is there ") + join_tokens(tokens) + "?";
  return q;
}

PolarQuestion polar_from_np(const ParseTree& np, const Vocabulary& vocab) {
  auto q = polar_from_phrase(noun_phrase_from_tree(np, vocab), vocab);
  q.from_stripped_np = np.synthetic;
  return q;
}

PolarQuestion parse_polar_question(std::string_view text, const Parser& parser, const Vocabulary& vocab) {
  auto tokens = tokenize(text);
  if (tokens.size() < 3 || tokens[1] != "there" || (tokens[0] != "is" && tokens[0] != "are"))
    throw ParseError("polar questions start with 'is there' or 'are there'", 0);
  std::vector<std::string> np(tokens.begin() + 2, tokens.end());
  if (tokens[0] == "are") {
    np.insert(np.begin(), "some");
  } else if (np.front() != "a" && np.front() != "an") {
    np.insert(np.begin(), "a");  // mass noun without article
  }
  ParseTree tree;
  try {
    tree = parser.parse(np, "NP");
  } catch (const ParseError& e) {
    // Report positions relative to the question text.
    throw ParseError(e.what(), e.token_index() + 2);
  }
  return polar_from_np(tree, vocab);
}

std::string what_text(std::string_view nn, std::string_view vbg) {
  return "What is the " + std::string(nn) + " " + std::string(vbg) + "?";
}

std::vector<WhatQuestion> what_from_caption(const ParseTree& tree, const Vocabulary& vocab) {
  std::vector<WhatQuestion> out;
  std::vector<const ParseTree*> stack{&tree};
  while (!stack.empty()) {
    const ParseTree* t = stack.back();
    stack.pop_back();
    if (t->label == "NP" && t->child("PARTP")) {
      const auto np = noun_phrase_from_tree(*t, vocab);
      WhatQuestion q;
      q.nn = np.noun;
      q.vbg = np.participle->verb;
      q.text = what_text(q.nn, q.vbg);
      out.push_back(std::move(q));
    }
    for (auto it = t->children.rbegin(); it != t->children.rend(); ++it) stack.push_back(&*it);
  }
  return out;
}

QuestionPool::QuestionPool(std::vector<Question> questions, bool full_caption)
    : questions_(std::move(questions)),
      asked_(questions_.size(), false),
      unasked_(questions_.size()),
      full_caption_(full_caption) {}

void QuestionPool::mark_asked(std::size_t i) {
  if (!asked_.at(i)) {
    asked_[i] = true;
    --unasked_;
  }
}

std::optional<std::size_t> QuestionPool::find(std::string_view text) const {
  for (std::size_t i = 0; i < questions_.size(); ++i)
    if (question_text(questions_[i]) == text) return i;
  return std::nullopt;
}

std::string QuestionPool::dump() const {
  std::string out;
  for (const auto& q : questions_) {
    out += question_text(q);
    out += '\t';
    out += question_kind(q) == QuestionKind::polar ? "polar" : "what";
    out += '\t';
    bool first = true;
    for (const auto& p : question_provenance(q)) {
      if (!first) out += ',';
      first = false;
      out += std::to_string(p.scene_id) + ":" + std::to_string(p.caption_id);
    }
    out += '\n';
  }
  return out;
}

namespace {

template <typename Q>
void merge_into(std::vector<Q>& list, std::map<std::string, std::size_t>& index, Q q, Provenance prov) {
  auto [it, inserted] = index.emplace(q.text, list.size());
  if (inserted) {
    q.provenance = {prov};
    list.push_back(std::move(q));
    return;
  }
  auto& existing = list[it->second].provenance;
  auto pos = std::lower_bound(existing.begin(), existing.end(), prov);
  if (pos == existing.end() || *pos != prov) existing.insert(pos, prov);
}

}  // namespace

QuestionPool build_pool(const std::vector<std::vector<Caption>>& captions, const Parser& parser,
                        const Vocabulary& vocab, const PoolOptions& options) {
  if (captions.empty()) throw ConfigError("no captions supplied");
  std::vector<PolarQuestion> polar;
  std::vector<WhatQuestion> what;
  std::map<std::string, std::size_t> polar_index;
  std::map<std::string, std::size_t> what_index;

  for (std::size_t s = 0; s < captions.size(); ++s) {
    if (captions[s].empty()) throw ConfigError("scene " + std::to_string(s) + " has no captions");
    for (const auto& cap : captions[s]) {
      const Provenance prov{static_cast<int>(s), cap.caption_id};
      const ParseTree tree = parser.parse(cap.tokens);
      const auto nps = np_subtrees(tree);
      if (options.full_caption) {
        merge_into(polar, polar_index, polar_from_np(nps.front(), vocab), prov);
      } else {
        for (const auto& np : nps) merge_into(polar, polar_index, polar_from_np(np, vocab), prov);
      }
      if (options.include_what)
        for (auto& q : what_from_caption(tree, vocab)) merge_into(what, what_index, std::move(q), prov);
    }
  }

  std::vector<Question> all;
  all.reserve(polar.size() + what.size());
  for (auto& q : polar) all.emplace_back(std::move(q));
  for (auto& q : what) all.emplace_back(std::move(q));
  return QuestionPool(std::move(all), options.full_caption);
}

}  // namespace clarify
