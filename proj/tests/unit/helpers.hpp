#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "clarify/grammar.hpp"
#include "clarify/scene.hpp"

namespace testing {

inline const clarify::Vocabulary& vocab() { return clarify::Vocabulary::standard(); }

inline const clarify::Parser& parser() {
  static const clarify::Parser p(clarify::Grammar::for_vocabulary(vocab()));
  return p;
}

// Scene from (color, shape) words and (subject, verb, object) relations.
inline clarify::Scene scene(const std::vector<std::pair<std::string, std::string>>& objects,
                            const std::vector<std::tuple<int, std::string, int>>& relations = {}) {
  clarify::Scene s;
  int id = 0;
  for (const auto& [c, sh] : objects) s.objects.push_back({id++, *vocab().color_index(c), *vocab().shape_index(sh)});
  for (const auto& [a, v, b] : relations) s.relations.push_back({a, *vocab().verb_index(v), b});
  s.validate(vocab());
  return s;
}

inline clarify::Context context(std::vector<clarify::Scene> scenes) {
  clarify::Context c;
  c.scenes = std::move(scenes);
  return c;
}

}  // namespace testing
