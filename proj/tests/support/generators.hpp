#pragma once

// Random generators for property tests. Everything here is independent of the
// library's parsing, merging and matching code paths.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "foonlink/foon/types.hpp"
#include "foonlink/recognition/detection.hpp"

namespace foonlink::fixtures {

inline const std::vector<std::string>& label_pool() {
  static const std::vector<std::string> pool{"gear", "shaft", "plate", "cover", "bolt", "nut",
                                             "washer", "bearing", "housing", "spring", "clip", "pin"};
  return pool;
}

inline const std::vector<std::string>& state_pool() {
  static const std::vector<std::string> pool{"loose", "aligned", "inserted", "attached to", "secured to",
                                             "detached", "empty-slot", "painted", "on"};
  return pool;
}

inline const std::vector<std::string>& motion_pool() {
  static const std::vector<std::string> pool{"pick-and-place", "screw", "unscrew", "insert", "press"};
  return pool;
}

class SubgraphGenerator {
 public:
  explicit SubgraphGenerator(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  /// A subgraph that passes validate(): inputs are either the current node of
  /// an already-seen label or a brand-new label; related objects name labels
  /// of the same subgraph.
  Subgraph subgraph(const std::string& name, int max_units = 6) {
    Subgraph g{name, {}};
    std::map<std::string, ObjectNode> current;  // label -> latest node
    std::vector<std::string> unused = label_pool();
    std::shuffle(unused.begin(), unused.end(), rng_);
    std::vector<std::string> known;

    auto fresh_label = [&]() -> std::optional<std::string> {
      if (unused.empty()) return std::nullopt;
      auto l = unused.back();
      unused.pop_back();
      known.push_back(l);
      return l;
    };
    auto random_states = [&](const std::string& self) {
      std::vector<StateDescriptor> states;
      std::set<StateDescriptor> seen;
      int n = uniform(0, 2);
      for (int i = 0; i < n; ++i) {
        StateDescriptor s{pick(state_pool()), std::nullopt};
        if (coin(0.4)) {
          std::vector<std::string> others;
          for (const auto& k : known)
            if (k != self) others.push_back(k);
          if (!others.empty()) s.related_object = pick(others);
        }
        if (seen.insert(s).second) states.push_back(s);
      }
      return states;
    };

    const int n_units = uniform(0, max_units);
    for (int k = 0; k < n_units; ++k) {
      FunctionalUnit u;
      u.unit_index = static_cast<std::size_t>(k);
      u.motion = MotionNode{pick(motion_pool())};

      std::set<std::string> used;
      const int n_in = uniform(0, 3);
      for (int i = 0; i < n_in; ++i) {
        bool reuse = !current.empty() && coin(0.6);
        if (reuse) {
          std::vector<std::string> labels;
          for (const auto& [l, _] : current)
            if (!used.count(l)) labels.push_back(l);
          if (labels.empty()) continue;
          auto l = pick(labels);
          used.insert(l);
          auto node = current.at(l);
          node.is_goal = coin(0.1);
          u.inputs.push_back(node);
        } else {
          auto l = fresh_label();
          if (!l) continue;
          used.insert(*l);
          u.inputs.push_back(ObjectNode{*l, random_states(*l), coin(0.1)});
        }
      }

      // Outputs: a new state for some inputs, plus occasionally a product.
      for (const auto& in : u.inputs) {
        if (coin(0.8)) {
          ObjectNode out{in.label, random_states(in.label), coin(0.2)};
          u.outputs.push_back(out);
        }
      }
      if (coin(0.2) || (u.inputs.empty() && u.outputs.empty())) {
        if (auto l = fresh_label()) u.outputs.push_back(ObjectNode{*l, random_states(*l), coin(0.3)});
      }
      if (u.inputs.empty() && u.outputs.empty()) break;

      // An output identity already produced earlier for another label state is
      // fine; record the latest node per label.
      for (const auto& o : u.outputs) current[o.label] = ObjectNode{o.label, o.states, false};
      // Inputs never changed by this unit keep their node.
      for (const auto& in : u.inputs) current.try_emplace(in.label, ObjectNode{in.label, in.states, false});

      if (!u.inputs.empty() && coin(0.7)) {
        int h = uniform(1, 2);
        for (int i = 0; i < h; ++i) {
          HandAnnotation ha{coin() ? Actor::right_hand : Actor::left_hand, std::nullopt};
          if (coin(0.8)) ha.grasped_object = pick(u.inputs).label;
          u.hands.push_back(ha);
        }
      } else if (coin(0.2)) {
        u.hands.push_back(HandAnnotation{Actor::robot_end_effector, std::nullopt});
      }
      g.units.push_back(std::move(u));
    }
    return g;
  }

  recognition::DetectionFrame frame(int max_dets = 8) {
    recognition::DetectionFrame f;
    f.t = uniform(0, 10000) / 100.0;
    f.width = uniform(1, 1920);
    f.height = uniform(1, 1080);
    std::uniform_real_distribution<double> ux(-0.2 * f.width, 1.2 * f.width);
    std::uniform_real_distribution<double> uy(-0.2 * f.height, 1.2 * f.height);
    std::uniform_real_distribution<double> us(1.0, 200.0);
    const int n = uniform(0, max_dets);
    for (int i = 0; i < n; ++i) {
      bool hand = coin(0.3);
      recognition::Detection d;
      d.is_hand = hand;
      d.label = hand ? (coin() ? "left-hand" : "right-hand") : pick(label_pool());
      d.confidence = uniform(0, 100) / 100.0;
      d.bbox = {ux(rng_), uy(rng_), us(rng_), us(rng_)};
      f.detections.push_back(d);
    }
    return f;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace foonlink::fixtures
