#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foonlink/text.hpp"

namespace foonlink {

/// One state of an object node. `related_object` names the target of a
/// relative state, e.g. {"attached to", "strut profile"}.
struct StateDescriptor {
  std::string name;
  std::optional<std::string> related_object;

  friend bool operator==(const StateDescriptor&, const StateDescriptor&) = default;
  friend auto operator<=>(const StateDescriptor&, const StateDescriptor&) = default;
};

/// Deduplication key of an object node: label plus the sorted state set.
/// The goal flag is not part of it.
struct ObjectIdentity {
  std::string label;
  std::vector<StateDescriptor> states;

  friend bool operator==(const ObjectIdentity&, const ObjectIdentity&) = default;
  friend auto operator<=>(const ObjectIdentity&, const ObjectIdentity&) = default;
};

struct ObjectNode {
  std::string label;
  std::vector<StateDescriptor> states;
  bool is_goal = false;

  ObjectIdentity identity() const {
    ObjectIdentity id{label, states};
    std::sort(id.states.begin(), id.states.end());
    id.states.erase(std::unique(id.states.begin(), id.states.end()), id.states.end());
    return id;
  }

  bool has_state(std::string_view name) const {
    return std::any_of(states.begin(), states.end(),
                       [&](const StateDescriptor& s) { return s.name == name; });
  }

  friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

struct MotionNode {
  std::string label;

  friend bool operator==(const MotionNode&, const MotionNode&) = default;
  friend auto operator<=>(const MotionNode&, const MotionNode&) = default;
};

enum class Actor { left_hand, right_hand, robot_end_effector };

inline std::string_view to_string(Actor a) {
  switch (a) {
    case Actor::left_hand: return "left-hand";
    case Actor::right_hand: return "right-hand";
    case Actor::robot_end_effector: return "robot-end-effector";
  }
  return "right-hand";
}

inline std::optional<Actor> parse_actor(std::string_view s) {
  if (s == "left-hand") return Actor::left_hand;
  if (s == "right-hand") return Actor::right_hand;
  if (s == "robot-end-effector") return Actor::robot_end_effector;
  return std::nullopt;
}

struct HandAnnotation {
  Actor actor = Actor::right_hand;
  std::optional<std::string> grasped_object;

  friend bool operator==(const HandAnnotation&, const HandAnnotation&) = default;
  friend auto operator<=>(const HandAnnotation&, const HandAnnotation&) = default;
};

/// One action: preconditions (inputs), a motion, and effects (outputs).
struct FunctionalUnit {
  std::vector<ObjectNode> inputs;
  std::vector<ObjectNode> outputs;
  MotionNode motion;
  std::vector<HandAnnotation> hands;
  std::size_t unit_index = 0;

  bool empty() const { return inputs.empty() && outputs.empty(); }

  /// Labels of input objects some hand annotation grasps, in annotation order.
  std::vector<std::string> grasped_labels() const {
    std::vector<std::string> out;
    for (const auto& h : hands) {
      if (h.grasped_object && std::find(out.begin(), out.end(), *h.grasped_object) == out.end()) {
        out.push_back(*h.grasped_object);
      }
    }
    return out;
  }

  friend bool operator==(const FunctionalUnit&, const FunctionalUnit&) = default;
};

/// Ordered chain of functional units describing one activity.
struct Subgraph {
  std::string name;
  std::vector<FunctionalUnit> units;

  friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

/// Builds a node with normalized label and state strings.
inline ObjectNode make_object(std::string_view label, std::vector<StateDescriptor> states = {},
                              bool is_goal = false) {
  ObjectNode n{text::normalize_label(label), std::move(states), is_goal};
  for (auto& s : n.states) {
    s.name = text::normalize_label(s.name);
    if (s.related_object) s.related_object = text::normalize_label(*s.related_object);
  }
  return n;
}

inline StateDescriptor state(std::string_view name) { return {std::string(name), std::nullopt}; }
inline StateDescriptor state(std::string_view name, std::string_view related) {
  return {std::string(name), std::string(related)};
}

/// Short human-readable form: `bracket[aligned, attached to strut profile]`.
inline std::string describe(const ObjectNode& n) {
  std::string out = n.label + "[";
  for (std::size_t i = 0; i < n.states.size(); ++i) {
    if (i) out += ", ";
    out += n.states[i].name;
    if (n.states[i].related_object) out += " " + *n.states[i].related_object;
  }
  return out + "]";
}

}  // namespace foonlink
