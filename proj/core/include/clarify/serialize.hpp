#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/scene.hpp"

namespace clarify {

// Structured records for scenes and contexts. A scene is
//   {"objects": [["red", "square"], ...], "relations": [[0, "touching", 1], ...]}
// and a context
//   {"mode": "split", "seed": 7, "scenes": [...]}
// Batch files hold one context per line.

nlohmann::json scene_to_json(const Scene& scene, const Vocabulary& vocab);
Scene scene_from_json(const nlohmann::json& j, const Vocabulary& vocab);

nlohmann::json context_to_json(const Context& context, const Vocabulary& vocab);
Context context_from_json(const nlohmann::json& j, const Vocabulary& vocab);

void write_context_lines(std::ostream& out, const std::vector<Context>& contexts, const Vocabulary& vocab);
std::vector<Context> read_context_lines(std::istream& in, const Vocabulary& vocab);

/// Drawing description for a scene on a 300x100 canvas: objects sit in
/// fixed 100x100 cells left to right, one primitive per object (glyph =
/// shape, fill = color), relations become labelled arrows.
nlohmann::json render_spec(const Scene& scene, const Vocabulary& vocab);

}  // namespace clarify
