#include "clarify/scene.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "clarify/errors.hpp"

namespace clarify {

namespace {

std::optional<int> find_index(const std::vector<std::string>& words, std::string_view w) {
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i] == w) return static_cast<int>(i);
  return std::nullopt;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

const Vocabulary& Vocabulary::standard() {
  static const Vocabulary vocab = [] {
    Vocabulary v;
    v.colors = {"red", "green", "blue", "yellow", "magenta", "cyan", "gray"};
    v.shapes = {"square", "rectangle", "triangle", "pentagon",
                "cross",  "circle",    "semicircle", "ellipse"};
    v.verbs = {"touching", "holding", "facing"};
    v.closed_class = {"is", "are", "there", "a", "an", "what", "the", "some"};
    v.generic_noun = "shape";
    v.validate();
    return v;
  }();
  return vocab;
}

void Vocabulary::validate() const {
  if (colors.empty() || shapes.empty()) throw ConfigError("vocabulary needs colors and shapes");
  std::unordered_set<std::string> seen;
  auto check = [&](const std::string& w) {
    if (w.empty()) throw ConfigError("empty vocabulary word");
    for (char c : w)
      if (std::isupper(static_cast<unsigned char>(c)) || std::isspace(static_cast<unsigned char>(c)))
        throw ConfigError("vocabulary word not lowercase: " + w);
    if (!seen.insert(w).second) throw ConfigError("duplicate vocabulary word: " + w);
  };
  for (const auto* list : {&colors, &shapes, &verbs, &closed_class})
    for (const auto& w : *list) check(w);
  if (!generic_noun.empty()) check(generic_noun);
}

std::optional<int> Vocabulary::color_index(std::string_view w) const { return find_index(colors, w); }
std::optional<int> Vocabulary::shape_index(std::string_view w) const { return find_index(shapes, w); }
std::optional<int> Vocabulary::verb_index(std::string_view w) const { return find_index(verbs, w); }

std::string Vocabulary::plural(std::string_view noun) const {
  std::string out(noun);
  if (ends_with(noun, "s") || ends_with(noun, "x") || ends_with(noun, "ch") || ends_with(noun, "sh"))
    out += "es";
  else
    out += "s";
  return out;
}

std::optional<Vocabulary::NounForm> Vocabulary::noun_form(std::string_view word) const {
  auto try_noun = [&](const std::string& lemma) -> std::optional<NounForm> {
    if (word == lemma) return NounForm{lemma, false};
    if (word == plural(lemma)) return NounForm{lemma, true};
    return std::nullopt;
  };
  for (const auto& s : shapes)
    if (auto f = try_noun(s)) return f;
  if (!generic_noun.empty())
    if (auto f = try_noun(generic_noun)) return f;
  return std::nullopt;
}

std::vector<std::string> Vocabulary::answer_words() const {
  std::vector<std::string> out(colors);
  out.insert(out.end(), shapes.begin(), shapes.end());
  return out;
}

bool Vocabulary::is_mass_noun(std::string_view noun) const {
  return find_index(mass_nouns, noun).has_value();
}

std::string_view indefinite_article(std::string_view next_word) {
  if (next_word.empty()) return "a";
  switch (next_word.front()) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return "an";
    default:
      return "a";
  }
}

std::string Scene::signature() const {
  std::vector<std::string> parts;
  auto obj = [&](int id) {
    const auto& o = objects.at(static_cast<std::size_t>(id));
    return std::to_string(o.color) + "." + std::to_string(o.shape);
  };
  for (const auto& o : objects) parts.push_back(obj(o.id));
  std::sort(parts.begin(), parts.end());
  std::vector<std::string> rels;
  for (const auto& r : relations)
    rels.push_back(obj(r.subject_id) + ">" + std::to_string(r.verb) + ">" + obj(r.object_id));
  std::sort(rels.begin(), rels.end());
  std::string out;
  for (const auto& p : parts) out += p + ",";
  out += "|";
  for (const auto& r : rels) out += r + ",";
  return out;
}

void Scene::validate(const Vocabulary& vocab) const {
  if (objects.empty()) throw PreconditionError("scene has no objects");
  const int n = static_cast<int>(objects.size());
  for (int i = 0; i < n; ++i) {
    const auto& o = objects[static_cast<std::size_t>(i)];
    if (o.id != i) throw PreconditionError("scene object ids must be contiguous from 0");
    if (o.color < 0 || o.color >= static_cast<int>(vocab.colors.size()))
      throw PreconditionError("scene object color out of range");
    if (o.shape < 0 || o.shape >= static_cast<int>(vocab.shapes.size()))
      throw PreconditionError("scene object shape out of range");
  }
  for (const auto& r : relations) {
    if (r.subject_id == r.object_id) throw PreconditionError("relation subject equals object");
    if (r.subject_id < 0 || r.subject_id >= n || r.object_id < 0 || r.object_id >= n)
      throw PreconditionError("relation references a missing object");
    if (r.verb < 0 || r.verb >= static_cast<int>(vocab.verbs.size()))
      throw PreconditionError("relation verb out of range");
  }
}

std::string_view to_string(ContextMode mode) {
  switch (mode) {
    case ContextMode::random: return "random";
    case ContextMode::split: return "split";
    case ContextMode::distinct: return "distinct";
  }
  return "random";
}

ContextMode context_mode_from_string(std::string_view name) {
  if (name == "random") return ContextMode::random;
  if (name == "split") return ContextMode::split;
  if (name == "distinct") return ContextMode::distinct;
  throw ConfigError("unknown context mode: " + std::string(name));
}

void WorldConfig::validate() const {
  if (min_objects < 1 || max_objects < min_objects || max_objects > 3)
    throw ConfigError("scenes hold between 1 and 3 objects");
  if (!(relation_prob >= 0.0 && relation_prob <= 1.0))
    throw ConfigError("relation_prob must lie in [0, 1]");
}

std::uint64_t Context::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : scenes) {
    for (unsigned char c : s.signature()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Scene random_scene(const Vocabulary& vocab, const WorldConfig& world, Rng& rng,
                   std::optional<int> fixed_shape) {
  Scene scene;
  const auto span = static_cast<std::size_t>(world.max_objects - world.min_objects + 1);
  const int n = world.min_objects + static_cast<int>(rng.uniform_index(span));
  for (int i = 0; i < n; ++i) {
    SceneObject o;
    o.id = i;
    o.color = static_cast<int>(rng.uniform_index(vocab.colors.size()));
    o.shape = fixed_shape ? *fixed_shape : static_cast<int>(rng.uniform_index(vocab.shapes.size()));
    scene.objects.push_back(o);
  }
  if (n >= 2 && !vocab.verbs.empty() && world.relation_prob > 0.0 &&
      rng.bernoulli(world.relation_prob)) {
    Relation r;
    r.subject_id = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
    r.object_id = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n - 1)));
    if (r.object_id >= r.subject_id) ++r.object_id;
    r.verb = static_cast<int>(rng.uniform_index(vocab.verbs.size()));
    scene.relations.push_back(r);
  }
  return scene;
}

std::optional<std::uint64_t> signature_capacity(const Vocabulary& vocab, const WorldConfig& world) {
  if (world.relation_prob > 0.0 && world.max_objects >= 2 && !vocab.verbs.empty())
    return std::nullopt;
  // Multisets of size n drawn from P attribute pairs: C(P + n - 1, n).
  const std::uint64_t pairs = vocab.colors.size() * vocab.shapes.size();
  std::uint64_t total = 0;
  for (int n = world.min_objects; n <= world.max_objects; ++n) {
    std::uint64_t c = 1;
    for (int i = 1; i <= n; ++i) c = c * (pairs + static_cast<std::uint64_t>(i) - 1) / static_cast<std::uint64_t>(i);
    total += c;
  }
  return total;
}

Context gen_context(const Vocabulary& vocab, const WorldConfig& world, std::uint64_t seed,
                    std::size_t k, ContextMode mode) {
  world.validate();
  if (k < 2) throw PreconditionError("a context needs at least 2 scenes");
  Rng rng(derive_seed(seed, {0x636f6e74ULL}));
  Context ctx;
  ctx.mode = mode;
  ctx.seed = seed;
  ctx.scenes.reserve(k);

  switch (mode) {
    case ContextMode::random:
      for (std::size_t i = 0; i < k; ++i) ctx.scenes.push_back(random_scene(vocab, world, rng));
      break;

    case ContextMode::split: {
      if (vocab.shapes.size() < 2) throw CapacityError("split contexts need two shape categories");
      const int a = static_cast<int>(rng.uniform_index(vocab.shapes.size()));
      int b = static_cast<int>(rng.uniform_index(vocab.shapes.size() - 1));
      if (b >= a) ++b;
      ctx.split_shapes = std::make_pair(a, b);
      const std::size_t first = (k + 1) / 2;
      for (std::size_t i = 0; i < k; ++i)
        ctx.scenes.push_back(random_scene(vocab, world, rng, i < first ? a : b));
      rng.shuffle(ctx.scenes);
      break;
    }

    case ContextMode::distinct: {
      if (auto cap = signature_capacity(vocab, world); cap && *cap < k)
        throw CapacityError("distinct context of " + std::to_string(k) + " scenes requested but only " +
                            std::to_string(*cap) + " distinct signatures exist");
      std::set<std::string> seen;
      const std::size_t budget = 1000 * k + 10000;
      std::size_t attempts = 0;
      while (ctx.scenes.size() < k) {
        if (++attempts > budget)
          throw CapacityError("could not draw " + std::to_string(k) + " distinct scenes");
        Scene s = random_scene(vocab, world, rng);
        if (seen.insert(s.signature()).second) ctx.scenes.push_back(std::move(s));
      }
      break;
    }
  }
  return ctx;
}

}  // namespace clarify
