#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "foonlink/foon/types.hpp"

namespace foonlink {

/// Current node per object label, as a chain of units is executed.
class WorldState {
 public:
  struct Entry {
    ObjectNode node;
    std::size_t seq = 0;  // 0 = initial, otherwise the number of the unit application that set it
  };

  WorldState() = default;

  /// The subgraph-initial nodes: the first time a label appears as an input,
  /// provided no earlier unit has already produced that label.
  static WorldState initial(const Subgraph& g) {
    WorldState w;
    std::set<std::string> produced;
    for (const auto& u : g.units) {
      for (const auto& n : u.inputs)
        if (!produced.count(n.label)) w.entries_.try_emplace(n.label, Entry{n, 0});
      for (const auto& n : u.outputs) produced.insert(n.label);
    }
    return w;
  }

  bool satisfies(const FunctionalUnit& u) const {
    return std::all_of(u.inputs.begin(), u.inputs.end(), [&](const ObjectNode& n) {
      auto it = entries_.find(n.label);
      return it != entries_.end() && it->second.node.identity() == n.identity();
    });
  }

  /// Most recent seq among the unit's input objects.
  std::size_t recency(const FunctionalUnit& u) const {
    std::size_t r = 0;
    for (const auto& n : u.inputs) {
      auto it = entries_.find(n.label);
      if (it != entries_.end()) r = std::max(r, it->second.seq);
    }
    return r;
  }

  void apply(const FunctionalUnit& u) {
    ++applied_;
    for (const auto& n : u.outputs) entries_[n.label] = Entry{n, applied_};
  }

  const ObjectNode* find(const std::string& label) const {
    auto it = entries_.find(label);
    return it == entries_.end() ? nullptr : &it->second.node;
  }

  std::set<ObjectIdentity> identities() const {
    std::set<ObjectIdentity> out;
    for (const auto& [_, e] : entries_) out.insert(e.node.identity());
    return out;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
  std::size_t applied_ = 0;
};

/// World state after running every unit of `g` from its initial nodes.
inline WorldState final_state(const Subgraph& g) {
  auto w = WorldState::initial(g);
  for (const auto& u : g.units) w.apply(u);
  return w;
}

}  // namespace foonlink
