#include "clarify/serialize.hpp"

#include <istream>
#include <ostream>

#include "clarify/errors.hpp"

namespace clarify {

using nlohmann::json;

json scene_to_json(const Scene& scene, const Vocabulary& vocab) {
  json objects = json::array();
  for (const auto& o : scene.objects)
    objects.push_back({vocab.colors.at(static_cast<std::size_t>(o.color)),
                       vocab.shapes.at(static_cast<std::size_t>(o.shape))});
  json relations = json::array();
  for (const auto& r : scene.relations)
    relations.push_back({r.subject_id, vocab.verbs.at(static_cast<std::size_t>(r.verb)), r.object_id});
  return {{"objects", std::move(objects)}, {"relations", std::move(relations)}};
}

Scene scene_from_json(const json& j, const Vocabulary& vocab) {
  Scene scene;
  try {
    int id = 0;
    for (const auto& o : j.at("objects")) {
      const auto color = vocab.color_index(o.at(0).get<std::string>());
      const auto shape = vocab.shape_index(o.at(1).get<std::string>());
      if (!color || !shape) throw FormatError("scene object outside vocabulary: " + o.dump());
      scene.objects.push_back({id++, *color, *shape});
    }
    if (j.contains("relations")) {
      for (const auto& r : j.at("relations")) {
        const auto verb = vocab.verb_index(r.at(1).get<std::string>());
        if (!verb) throw FormatError("relation verb outside vocabulary: " + r.dump());
        scene.relations.push_back({r.at(0).get<int>(), *verb, r.at(2).get<int>()});
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed scene record: ") + e.what());
  }
  try {
    scene.validate(vocab);
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("invalid scene record: ") + e.what());
  }
  return scene;
}

json context_to_json(const Context& context, const Vocabulary& vocab) {
  json scenes = json::array();
  for (const auto& s : context.scenes) scenes.push_back(scene_to_json(s, vocab));
  json out = {{"mode", std::string(to_string(context.mode))}, {"seed", context.seed}, {"scenes", std::move(scenes)}};
  if (context.split_shapes)
    out["split_shapes"] = {vocab.shapes.at(static_cast<std::size_t>(context.split_shapes->first)),
                           vocab.shapes.at(static_cast<std::size_t>(context.split_shapes->second))};
  return out;
}

Context context_from_json(const json& j, const Vocabulary& vocab) {
  Context ctx;
  try {
    ctx.mode = context_mode_from_string(j.at("mode").get<std::string>());
    ctx.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("scenes")) ctx.scenes.push_back(scene_from_json(s, vocab));
    if (j.contains("split_shapes")) {
      const auto a = vocab.shape_index(j["split_shapes"].at(0).get<std::string>());
      const auto b = vocab.shape_index(j["split_shapes"].at(1).get<std::string>());
      if (!a || !b) throw FormatError("split shapes outside vocabulary");
      ctx.split_shapes = std::make_pair(*a, *b);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed context record: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }
  return ctx;
}

void write_context_lines(std::ostream& out, const std::vector<Context>& contexts, const Vocabulary& vocab) {
  for (const auto& c : contexts) out << context_to_json(c, vocab).dump() << '\n';
}

std::vector<Context> read_context_lines(std::istream& in, const Vocabulary& vocab) {
  std::vector<Context> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad context line: ") + e.what());
    }
    out.push_back(context_from_json(j, vocab));
  }
  return out;
}

json render_spec(const Scene& scene, const Vocabulary& vocab) {
  constexpr int cell = 100;
  constexpr int size = 60;
  json primitives = json::array();
  for (const auto& o : scene.objects) {
    const int cx = o.id * cell + cell / 2;
    primitives.push_back({{"id", o.id},
                          {"glyph", vocab.shapes.at(static_cast<std::size_t>(o.shape))},
                          {"fill", vocab.colors.at(static_cast<std::size_t>(o.color))},
                          {"x", cx},
                          {"y", cell / 2},
                          {"size", size}});
  }
  json arrows = json::array();
  for (const auto& r : scene.relations)
    arrows.push_back(
        {{"from", r.subject_id}, {"to", r.object_id}, {"label", vocab.verbs.at(static_cast<std::size_t>(r.verb))}});
  return {{"width", 3 * cell}, {"height", cell}, {"primitives", std::move(primitives)}, {"arrows", std::move(arrows)}};
}

}  // namespace clarify
