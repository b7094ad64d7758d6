#pragma once

// Line-oriented, tab-separated FOON text format.
//
//   #FOONv1 <subgraph-name>
//   O <label> <goal 0|1>        input object (all O blocks before M)
//   S <state> [<related>]       0..n per preceding O
//   M <motion>                  exactly one per unit
//   H <actor> [<grasped>]       0..n, between M and the first output O
//   O <label> <goal 0|1>        output object
//   //                          unit terminator
//
// Fields are separated by a single tab. `#` at column 0 outside a unit is a
// comment. The universal variant uses a `#FOONv1-U` header and records the
// source of each unit in `# from <subgraph>#unit/<k>` comments.

#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foonlink/error.hpp"
#include "foonlink/foon/types.hpp"
#include "foonlink/foon/universal.hpp"
#include "foonlink/text.hpp"

namespace foonlink {

inline constexpr std::string_view kFoonHeader = "#FOONv1";
inline constexpr std::string_view kUniversalHeader = "#FOONv1-U";

namespace detail {

struct ParsedUnit {
  FunctionalUnit unit;
  std::vector<UnitSource> sources;
};

struct ParsedDocument {
  std::string name;
  std::vector<ParsedUnit> units;
};

inline std::string required_label(std::string_view field, std::size_t line, const char* what) {
  auto s = text::normalize_label(field);
  if (s.empty()) throw SyntaxError(line, std::string("empty ") + what);
  return s;
}

inline std::optional<UnitSource> parse_source_comment(std::string_view line) {
  constexpr std::string_view prefix = "# from ";
  if (line.substr(0, prefix.size()) != prefix) return std::nullopt;
  auto rest = line.substr(prefix.size());
  auto pos = rest.rfind("#unit/");
  if (pos == std::string_view::npos) return std::nullopt;
  auto num = rest.substr(pos + 6);
  std::size_t k = 0;
  auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
  if (ec != std::errc{} || p != num.data() + num.size()) return std::nullopt;
  return UnitSource{std::string(rest.substr(0, pos)), k};
}

inline ParsedDocument parse_document(std::string_view doc, std::string_view header) {
  enum class Where { outside, inputs, hands, outputs };

  auto lines = text::split(doc, '\n');
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw SyntaxError(1, "empty document");

  ParsedDocument out;
  {
    auto first = lines.front();
    if (first.substr(0, header.size()) != header || first.size() <= header.size() + 1 ||
        first[header.size()] != ' ') {
      throw SyntaxError(1, "expected header '" + std::string(header) + " <name>'");
    }
    auto name = first.substr(header.size() + 1);
    while (!name.empty() && text::is_space(name.back())) name.remove_suffix(1);
    if (name.empty()) throw SyntaxError(1, "missing subgraph name");
    out.name = std::string(name);
  }

  Where where = Where::outside;
  ParsedUnit cur;
  bool have_motion = false;
  std::size_t unit_start = 0;
  std::vector<UnitSource> pending_sources;
  ObjectNode* last_object = nullptr;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    const auto line = lines[i];

    if (where == Where::outside) {
      if (line.empty()) continue;
      if (line.front() == '#') {
        if (auto src = parse_source_comment(line)) pending_sources.push_back(*src);
        continue;
      }
    }

    auto f = text::split(line, '\t');
    const auto tag = f.front();

    if (where == Where::outside) {
      if (tag == "S") throw SyntaxError(ln, "state record before any object record");
      if (tag == "H") throw SyntaxError(ln, "hand record outside a unit");
      if (tag == "//") throw SyntaxError(ln, "unit terminator outside a unit");
      if (tag != "O" && tag != "M") throw SyntaxError(ln, "unknown record tag '" + std::string(tag) + "'");
      cur = ParsedUnit{};
      cur.sources = std::move(pending_sources);
      pending_sources.clear();
      have_motion = false;
      last_object = nullptr;
      unit_start = ln;
      where = Where::inputs;
    }

    if (tag == "O") {
      if (f.size() != 3) throw SyntaxError(ln, "object record needs label and goal flag");
      if (f[2] != "0" && f[2] != "1") throw SyntaxError(ln, "goal flag must be 0 or 1");
      ObjectNode node{required_label(f[1], ln, "object label"), {}, f[2] == "1"};
      if (where == Where::hands) where = Where::outputs;
      auto& side = (where == Where::inputs) ? cur.unit.inputs : cur.unit.outputs;
      side.push_back(std::move(node));
      last_object = &side.back();
    } else if (tag == "S") {
      if (last_object == nullptr) throw SyntaxError(ln, "state record before any object record");
      if (f.size() != 2 && f.size() != 3) throw SyntaxError(ln, "state record needs a name and optional related object");
      StateDescriptor sd{required_label(f[1], ln, "state name"), std::nullopt};
      if (f.size() == 3) sd.related_object = required_label(f[2], ln, "related object");
      last_object->states.push_back(std::move(sd));
    } else if (tag == "M") {
      if (have_motion) throw SyntaxError(ln, "second motion record in unit");
      if (f.size() != 2) throw SyntaxError(ln, "motion record needs exactly one label");
      cur.unit.motion = MotionNode{required_label(f[1], ln, "motion label")};
      have_motion = true;
      last_object = nullptr;
      where = Where::hands;
    } else if (tag == "H") {
      if (where == Where::inputs) throw SyntaxError(ln, "hand record before motion record");
      if (where == Where::outputs) throw SyntaxError(ln, "hand record after output objects");
      if (f.size() != 2 && f.size() != 3) throw SyntaxError(ln, "hand record needs an actor and optional object");
      auto actor = parse_actor(f[1]);
      if (!actor) throw SyntaxError(ln, "unknown actor '" + std::string(f[1]) + "'");
      HandAnnotation h{*actor, std::nullopt};
      if (f.size() == 3) h.grasped_object = required_label(f[2], ln, "grasped object");
      cur.unit.hands.push_back(std::move(h));
    } else if (tag == "//") {
      if (f.size() != 1) throw SyntaxError(ln, "unit terminator takes no fields");
      if (!have_motion) throw StructureError(ln, "unit starting at line " + std::to_string(unit_start) + " has no motion record");
      cur.unit.unit_index = out.units.size();
      out.units.push_back(std::move(cur));
      cur = ParsedUnit{};
      last_object = nullptr;
      where = Where::outside;
    } else if (line.empty()) {
      throw SyntaxError(ln, "blank line inside a unit");
    } else {
      throw SyntaxError(ln, "unknown record tag '" + std::string(tag) + "'");
    }
  }

  if (where != Where::outside) {
    if (!have_motion) throw StructureError(lines.size(), "unit starting at line " + std::to_string(unit_start) + " has no motion record");
    throw StructureError(lines.size(), "unit starting at line " + std::to_string(unit_start) + " is missing the '//' terminator");
  }
  return out;
}

inline void write_object(std::string& out, const ObjectNode& n) {
  out += "O\t";
  out += n.label;
  out += n.is_goal ? "\t1\n" : "\t0\n";
  for (const auto& s : n.states) {
    out += "S\t";
    out += s.name;
    if (s.related_object) {
      out += '\t';
      out += *s.related_object;
    }
    out += '\n';
  }
}

inline void write_unit(std::string& out, const FunctionalUnit& u) {
  for (const auto& n : u.inputs) write_object(out, n);
  out += "M\t" + u.motion.label + "\n";
  for (const auto& h : u.hands) {
    out += "H\t";
    out += to_string(h.actor);
    if (h.grasped_object) {
      out += '\t';
      out += *h.grasped_object;
    }
    out += '\n';
  }
  for (const auto& n : u.outputs) write_object(out, n);
  out += "//\n";
}

}  // namespace detail

inline Subgraph parse_foon(std::string_view doc) {
  auto parsed = detail::parse_document(doc, kFoonHeader);
  Subgraph g{std::move(parsed.name), {}};
  for (auto& pu : parsed.units) g.units.push_back(std::move(pu.unit));
  return g;
}

inline std::string serialize_foon(const Subgraph& g) {
  std::string out = std::string(kFoonHeader) + " " + g.name + "\n";
  for (const auto& u : g.units) detail::write_unit(out, u);
  return out;
}

inline std::string serialize_universal(const UniversalFOON& f) {
  auto names = f.subgraph_names();
  std::string out = std::string(kUniversalHeader) + " " + (names.empty() ? "universal" : text::join(names, "+")) + "\n";
  for (std::size_t i = 0; i < f.units.size(); ++i) {
    for (const auto& p : f.units[i].provenance)
      out += "# from " + p.subgraph + "#unit/" + std::to_string(p.unit_index) + "\n";
    detail::write_unit(out, f.unit(i));
  }
  return out;
}

inline UniversalFOON parse_universal(std::string_view doc) {
  auto parsed = detail::parse_document(doc, kUniversalHeader);
  std::vector<detail::LooseUnit> loose;
  for (auto& pu : parsed.units) {
    detail::LooseUnit lu{std::move(pu.unit.inputs), std::move(pu.unit.outputs), pu.unit.motion.label,
                         std::move(pu.unit.hands), {pu.sources.begin(), pu.sources.end()}};
    loose.push_back(std::move(lu));
  }
  return detail::build_universal(loose);
}

inline bool is_universal_document(std::string_view doc) {
  return doc.substr(0, kUniversalHeader.size()) == kUniversalHeader;
}

}  // namespace foonlink
