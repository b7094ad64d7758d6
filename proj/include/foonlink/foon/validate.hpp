#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "foonlink/foon/types.hpp"
#include "foonlink/text.hpp"

namespace foonlink {

enum class ViolationKind {
  empty_unit,
  dangling_related_object,
  chaining_inconsistency,
  unit_index_mismatch,
  hand_grasps_non_input,
  duplicate_state,
  bad_label,
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::empty_unit: return "empty unit";
    case ViolationKind::dangling_related_object: return "dangling related object";
    case ViolationKind::chaining_inconsistency: return "chaining inconsistency";
    case ViolationKind::unit_index_mismatch: return "unit index mismatch";
    case ViolationKind::hand_grasps_non_input: return "hand grasps non-input object";
    case ViolationKind::duplicate_state: return "duplicate state";
    case ViolationKind::bad_label: return "bad label";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> unit;  // position in Subgraph::units
  std::string detail;

  std::string to_string() const {
    std::string s(foonlink::to_string(kind));
    if (unit) s += " (unit " + std::to_string(*unit) + ")";
    if (!detail.empty()) s += ": " + detail;
    return s;
  }
};

using ValidationReport = std::vector<Violation>;

/// Collects every structural problem in `g`; an empty report means valid.
///
/// Chaining rule: an input of unit k must either match (by identity) an output
/// of an earlier unit, or be subgraph-initial, i.e. no earlier unit has
/// produced that label in any state. Later units may produce the same identity
/// again (pass-through objects, returning to a prior state).
inline ValidationReport validate(const Subgraph& g) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::optional<std::size_t> u, std::string d) {
    report.push_back(Violation{k, u, std::move(d)});
  };

  std::set<std::string> labels;
  for (const auto& u : g.units)
    for (const auto* side : {&u.inputs, &u.outputs})
      for (const auto& n : *side) labels.insert(n.label);

  for (std::size_t k = 0; k < g.units.size(); ++k) {
    const auto& u = g.units[k];
    if (u.unit_index != k)
      add(ViolationKind::unit_index_mismatch, k,
          "unit_index " + std::to_string(u.unit_index) + " at position " + std::to_string(k));
    if (u.empty()) add(ViolationKind::empty_unit, k, "no input and no output objects");
    if (!text::is_normalized(u.motion.label)) add(ViolationKind::bad_label, k, "motion label '" + u.motion.label + "'");

    for (const auto* side : {&u.inputs, &u.outputs}) {
      for (const auto& n : *side) {
        if (!text::is_normalized(n.label)) add(ViolationKind::bad_label, k, "object label '" + n.label + "'");
        std::set<StateDescriptor> seen;
        for (const auto& s : n.states) {
          if (!text::is_normalized(s.name)) add(ViolationKind::bad_label, k, "state name '" + s.name + "' on " + n.label);
          if (!seen.insert(s).second) add(ViolationKind::duplicate_state, k, describe(n));
          if (s.related_object && !labels.count(*s.related_object))
            add(ViolationKind::dangling_related_object, k,
                describe(n) + " refers to unknown object '" + *s.related_object + "'");
        }
      }
    }

    for (const auto& h : u.hands) {
      if (!h.grasped_object) continue;
      bool found = false;
      for (const auto& n : u.inputs) found = found || n.label == *h.grasped_object;
      if (!found)
        add(ViolationKind::hand_grasps_non_input, k,
            std::string(to_string(h.actor)) + " grasps '" + *h.grasped_object + "'");
    }
  }

  // identity -> positions of producing units; label -> first producing unit.
  std::map<ObjectIdentity, std::vector<std::size_t>> produced_at;
  std::map<std::string, std::size_t> label_first_produced;
  for (std::size_t k = 0; k < g.units.size(); ++k) {
    for (const auto& n : g.units[k].outputs) {
      produced_at[n.identity()].push_back(k);
      label_first_produced.try_emplace(n.label, k);
    }
  }
  for (std::size_t k = 0; k < g.units.size(); ++k) {
    for (const auto& n : g.units[k].inputs) {
      auto it = produced_at.find(n.identity());
      if (it != produced_at.end() && it->second.front() < k) continue;
      auto lp = label_first_produced.find(n.label);
      if (lp != label_first_produced.end() && lp->second < k)
        add(ViolationKind::chaining_inconsistency, k,
            describe(n) + " was never produced, but '" + n.label + "' already changed state in unit " +
                std::to_string(lp->second));
    }
  }
  return report;
}

}  // namespace foonlink
