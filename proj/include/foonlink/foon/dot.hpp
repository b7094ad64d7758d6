#pragma once

#include <string>

#include "foonlink/foon/types.hpp"
#include "foonlink/foon/universal.hpp"

namespace foonlink {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string dot_quote(const std::string& s) { return "\"" + dot_escape(s) + "\""; }

inline std::string object_caption(const ObjectNode& n) {
  std::string out = dot_escape(n.label);
  for (const auto& s : n.states) {
    out += "\\n" + dot_escape(s.name);
    if (s.related_object) out += " " + dot_escape(*s.related_object);
  }
  return out;
}

}  // namespace detail

// Objects are circles (lime green, goals blue), motions are boxes; one box
// per functional unit.
inline std::string export_dot(const UniversalFOON& f, const std::string& name = "foon") {
  std::string out = "digraph " + detail::dot_quote(name) + " {\n";
  out += "  rankdir=TB;\n";
  out += "  node [fontname=\"Helvetica\", style=filled];\n";
  for (std::size_t i = 0; i < f.object_nodes.size(); ++i) {
    const auto& n = f.object_nodes[i];
    // The label is pre-escaped: object_caption emits literal "\n" separators.
    out += "  o" + std::to_string(i) + " [label=\"" + detail::object_caption(n) +
           "\", shape=circle, fillcolor=" + (n.is_goal ? "\"blue\", fontcolor=\"white\"" : "\"limegreen\"") + "];\n";
  }
  for (std::size_t i = 0; i < f.units.size(); ++i) {
    out += "  m" + std::to_string(i) + " [label=" + detail::dot_quote(f.motion_nodes[f.units[i].motion].label) +
           ", shape=box, fillcolor=\"lightgrey\"];\n";
  }
  for (std::size_t i = 0; i < f.units.size(); ++i) {
    const auto& u = f.units[i];
    for (auto k : u.inputs) out += "  o" + std::to_string(k) + " -> m" + std::to_string(i) + ";\n";
    for (auto k : u.outputs) out += "  m" + std::to_string(i) + " -> o" + std::to_string(k) + ";\n";
  }
  out += "}\n";
  return out;
}

inline std::string export_dot(const Subgraph& g) { return export_dot(lift(g), g.name); }

}  // namespace foonlink
