#include "clarify/captioner.hpp"

#include <algorithm>
#include <map>

#include "clarify/errors.hpp"
#include "clarify/grammar.hpp"
#include "clarify/rng.hpp"

namespace clarify {

std::string Caption::text() const { return join_tokens(tokens); }

namespace {

void push_np(std::vector<std::string>& out, const Vocabulary& vocab, const SceneObject& o, bool with_color) {
  const std::string& first = with_color ? vocab.colors[static_cast<std::size_t>(o.color)]
                                        : vocab.shapes[static_cast<std::size_t>(o.shape)];
  out.emplace_back(indefinite_article(first));
  if (with_color) out.push_back(vocab.colors[static_cast<std::size_t>(o.color)]);
  out.push_back(vocab.shapes[static_cast<std::size_t>(o.shape)]);
}

}  // namespace

std::vector<WeightedUtterance> caption_distribution(const Scene& scene, const Vocabulary& vocab) {
  scene.validate(vocab);
  std::map<std::vector<std::string>, double> mass;
  double plain_mass = 1.0;
  if (!scene.relations.empty()) {
    plain_mass = 0.5;
    const double each = 0.5 / static_cast<double>(scene.relations.size());
    for (const auto& r : scene.relations) {
      std::vector<std::string> toks;
      push_np(toks, vocab, scene.objects[static_cast<std::size_t>(r.subject_id)], true);
      toks.push_back(vocab.verbs[static_cast<std::size_t>(r.verb)]);
      push_np(toks, vocab, scene.objects[static_cast<std::size_t>(r.object_id)], true);
      mass[toks] += each;
    }
  }
  const double each = plain_mass / (2.0 * static_cast<double>(scene.objects.size()));
  for (const auto& o : scene.objects) {
    for (bool with_color : {true, false}) {
      std::vector<std::string> toks;
      push_np(toks, vocab, o, with_color);
      mass[toks] += each;
    }
  }
  std::vector<WeightedUtterance> out;
  out.reserve(mass.size());
  for (auto& [toks, p] : mass) out.push_back({toks, p});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.probability > b.probability; });
  return out;
}

std::vector<Caption> sample_captions(const Scene& scene, const Vocabulary& vocab, std::size_t n,
                                     std::uint64_t seed, int scene_id) {
  auto dist = caption_distribution(scene, vocab);
  Rng rng(derive_seed(seed, {0x63617074ULL}));
  std::vector<Caption> out;
  while (out.size() < n && !dist.empty()) {
    double total = 0.0;
    for (const auto& u : dist) total += u.probability;
    double x = rng.uniform01() * total;
    std::size_t pick = dist.size() - 1;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      x -= dist[i].probability;
      if (x < 0.0) {
        pick = i;
        break;
      }
    }
    out.push_back({std::move(dist[pick].tokens), scene_id, static_cast<int>(out.size())});
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

Caption caption(const Scene& scene, const Vocabulary& vocab, std::uint64_t seed, int scene_id) {
  return sample_captions(scene, vocab, 1, seed, scene_id).front();
}

std::vector<std::vector<Caption>> caption_context(const Context& context, const Vocabulary& vocab,
                                                  std::size_t per_scene, std::uint64_t seed) {
  if (per_scene == 0) throw ConfigError("at least one caption per scene is required");
  std::vector<std::vector<Caption>> out;
  out.reserve(context.size());
  for (std::size_t i = 0; i < context.size(); ++i)
    out.push_back(sample_captions(context.scenes[i], vocab, per_scene, derive_seed(seed, {i}),
                                  static_cast<int>(i)));
  return out;
}

double caption_likelihood(const std::vector<std::string>& utterance, const Scene& scene,
                          const Vocabulary& vocab) {
  for (const auto& u : caption_distribution(scene, vocab))
    if (u.tokens == utterance) return u.probability;
  return 0.0;
}

}  // namespace clarify
