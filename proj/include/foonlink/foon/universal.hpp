#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "foonlink/foon/types.hpp"

namespace foonlink {

/// Where a universal unit came from.
struct UnitSource {
  std::string subgraph;
  std::size_t unit_index = 0;

  friend bool operator==(const UnitSource&, const UnitSource&) = default;
  friend auto operator<=>(const UnitSource&, const UnitSource&) = default;
};

/// A unit of a universal FOON. Node references are indices into the owning
/// UniversalFOON's sorted node tables.
struct UniversalUnit {
  std::vector<std::size_t> inputs;   // sorted, unique
  std::vector<std::size_t> outputs;  // sorted, unique
  std::size_t motion = 0;
  std::vector<HandAnnotation> hands;  // sorted, unique
  std::set<UnitSource> provenance;

  friend bool operator==(const UniversalUnit&, const UniversalUnit&) = default;
};

/// Deduplicated union of subgraphs. Construction always yields the canonical
/// form, so two universal FOONs with the same node and unit sets compare equal.
struct UniversalFOON {
  std::vector<ObjectNode> object_nodes;  // sorted by identity, states canonical
  std::vector<MotionNode> motion_nodes;  // sorted by label
  std::vector<UniversalUnit> units;      // sorted by earliest provenance

  std::vector<std::string> subgraph_names() const {
    std::set<std::string> names;
    for (const auto& u : units)
      for (const auto& p : u.provenance) names.insert(p.subgraph);
    return {names.begin(), names.end()};
  }

  std::optional<std::size_t> find_object(const ObjectIdentity& id) const {
    auto it = std::lower_bound(object_nodes.begin(), object_nodes.end(), id,
                               [](const ObjectNode& n, const ObjectIdentity& k) { return n.identity() < k; });
    if (it != object_nodes.end() && it->identity() == id)
      return static_cast<std::size_t>(it - object_nodes.begin());
    return std::nullopt;
  }

  /// Rebuilds unit `i` as a plain functional unit; unit_index is `i`.
  FunctionalUnit unit(std::size_t i) const {
    const auto& u = units.at(i);
    FunctionalUnit f;
    for (auto k : u.inputs) f.inputs.push_back(object_nodes[k]);
    for (auto k : u.outputs) f.outputs.push_back(object_nodes[k]);
    f.motion = motion_nodes[u.motion];
    f.hands = u.hands;
    f.unit_index = i;
    return f;
  }

  friend bool operator==(const UniversalFOON&, const UniversalFOON&) = default;
};

namespace detail {

struct LooseUnit {
  std::vector<ObjectNode> inputs;
  std::vector<ObjectNode> outputs;
  std::string motion;
  std::vector<HandAnnotation> hands;
  std::set<UnitSource> provenance;
};

using UnitKey = std::tuple<std::vector<ObjectIdentity>, std::vector<ObjectIdentity>, std::string>;

inline std::vector<ObjectIdentity> identity_set(const std::vector<ObjectNode>& nodes) {
  std::vector<ObjectIdentity> ids;
  for (const auto& n : nodes) ids.push_back(n.identity());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

// Canonicalizes a bag of units: nodes unified by identity (goal flags OR'd),
// motions by label, units by (input set, output set, motion).
inline UniversalFOON build_universal(const std::vector<LooseUnit>& loose) {
  std::map<ObjectIdentity, bool> nodes;
  std::set<std::string> motions;
  std::map<UnitKey, LooseUnit> merged;
  for (const auto& u : loose) {
    for (const auto* side : {&u.inputs, &u.outputs})
      for (const auto& n : *side) nodes[n.identity()] |= n.is_goal;
    motions.insert(u.motion);
    UnitKey key{identity_set(u.inputs), identity_set(u.outputs), u.motion};
    auto [it, fresh] = merged.try_emplace(key, u);
    if (!fresh) {
      auto& m = it->second;
      m.hands.insert(m.hands.end(), u.hands.begin(), u.hands.end());
      m.provenance.insert(u.provenance.begin(), u.provenance.end());
    }
  }

  UniversalFOON f;
  for (const auto& [id, goal] : nodes) f.object_nodes.push_back(ObjectNode{id.label, id.states, goal});
  for (const auto& m : motions) f.motion_nodes.push_back(MotionNode{m});

  auto index_of = [&](const ObjectIdentity& id) {
    return static_cast<std::size_t>(std::distance(nodes.begin(), nodes.find(id)));
  };
  for (auto& [key, lu] : merged) {
    UniversalUnit u;
    for (const auto& id : std::get<0>(key)) u.inputs.push_back(index_of(id));
    for (const auto& id : std::get<1>(key)) u.outputs.push_back(index_of(id));
    u.motion = static_cast<std::size_t>(std::distance(motions.begin(), motions.find(std::get<2>(key))));
    u.hands = lu.hands;
    std::sort(u.hands.begin(), u.hands.end());
    u.hands.erase(std::unique(u.hands.begin(), u.hands.end()), u.hands.end());
    u.provenance = std::move(lu.provenance);
    f.units.push_back(std::move(u));
  }
  // Units without provenance sort first; `merged` is already key-ordered, so
  // a stable sort keeps ties deterministic.
  std::stable_sort(f.units.begin(), f.units.end(), [](const UniversalUnit& a, const UniversalUnit& b) {
    if (a.provenance.empty() || b.provenance.empty()) return a.provenance.empty() && !b.provenance.empty();
    return *a.provenance.begin() < *b.provenance.begin();
  });
  return f;
}

inline void append_loose(const UniversalFOON& f, std::vector<LooseUnit>& out) {
  for (const auto& u : f.units) {
    LooseUnit lu;
    for (auto k : u.inputs) lu.inputs.push_back(f.object_nodes[k]);
    for (auto k : u.outputs) lu.outputs.push_back(f.object_nodes[k]);
    lu.motion = f.motion_nodes[u.motion].label;
    lu.hands = u.hands;
    lu.provenance = u.provenance;
    out.push_back(std::move(lu));
  }
}

}  // namespace detail

inline UniversalFOON lift(const Subgraph& g) {
  std::vector<detail::LooseUnit> loose;
  for (const auto& u : g.units)
    loose.push_back({u.inputs, u.outputs, u.motion.label, u.hands, {UnitSource{g.name, u.unit_index}}});
  return detail::build_universal(loose);
}

inline UniversalFOON merge(const UniversalFOON& a, const UniversalFOON& b) {
  std::vector<detail::LooseUnit> loose;
  detail::append_loose(a, loose);
  detail::append_loose(b, loose);
  return detail::build_universal(loose);
}

inline UniversalFOON merge(std::span<const Subgraph> subgraphs) {
  UniversalFOON out;
  for (const auto& g : subgraphs) out = merge(out, lift(g));
  return out;
}

inline UniversalFOON merge(std::initializer_list<Subgraph> subgraphs) {
  return merge(std::span<const Subgraph>(subgraphs.begin(), subgraphs.size()));
}

/// Units whose outputs contain a node with the given identity.
inline std::vector<FunctionalUnit> units_producing(const UniversalFOON& f, const ObjectIdentity& target) {
  std::vector<FunctionalUnit> out;
  auto idx = f.find_object(target);
  if (!idx) return out;
  for (std::size_t i = 0; i < f.units.size(); ++i) {
    const auto& outs = f.units[i].outputs;
    if (std::binary_search(outs.begin(), outs.end(), *idx)) out.push_back(f.unit(i));
  }
  return out;
}

inline std::vector<FunctionalUnit> units_producing(const UniversalFOON& f, const ObjectNode& target) {
  return units_producing(f, target.identity());
}

}  // namespace foonlink
