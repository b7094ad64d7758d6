#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "foonlink/foon/types.hpp"
#include "foonlink/foon/world.hpp"
#include "foonlink/recognition/detection.hpp"
#include "foonlink/recognition/matcher.hpp"

namespace foonlink::recognition {

struct SimulationOptions {
  double fps = 30.0;
  double noise_sigma = 0.0;  // centroid jitter, normalized by the frame diagonal
  std::uint64_t seed = 0;
  int width = 1280;
  int height = 720;
  int k_confirm = RecognizerConfig{}.k_confirm;
};

namespace detail {

struct Vec2 {
  double x = 0, y = 0;
};

inline Vec2 lerp(Vec2 a, Vec2 b, double s) { return {a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s}; }
inline double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Workbench layout in a 1280x720 reference frame, scaled to the actual size.
class Layout {
 public:
  Layout(int width, int height) : sx_(width / 1280.0), sy_(height / 720.0) {}

  Vec2 home(const std::string& label) {
    static const std::map<std::string, Vec2> fixed{
        {"strut profile", {640, 360}}, {"bracket", {260, 600}}, {"t-bolt", {460, 640}}, {"flange nut", {820, 640}}};
    if (auto it = fixed.find(label); it != fixed.end()) return scale(it->second);
    auto [it, fresh] = extra_.try_emplace(label, Vec2{});
    if (fresh) {
      const auto i = extra_.size() - 1;
      it->second = {150.0 + 150.0 * static_cast<double>(i % 5), 300.0 + 115.0 * static_cast<double>((i / 5) % 4)};
    }
    return scale(it->second);
  }

  Vec2 hand_rest(Actor a) const {
    return a == Actor::left_hand ? scale({80, 80}) : scale({1200, 80});
  }

 private:
  Vec2 scale(Vec2 p) const { return {p.x * sx_, p.y * sy_}; }

  double sx_, sy_;
  std::map<std::string, Vec2> extra_;
};

inline const StateDescriptor* attachment_of(const ObjectNode& n) {
  for (const auto& s : n.states)
    if (s.related_object && relation_of(s.name) == Relation::attached) return &s;
  return nullptr;
}

}  // namespace detail

/// Synthesizes a detection stream that performs `g` unit by unit.
///
/// Per unit with a grasped object: the hand travels from rest to a staging
/// point, snaps onto the object and holds for 2*k_confirm frames, carries it
/// to its target, jumps back to the staging point and returns to rest. At zero
/// noise every hand/object distance is either 0 or at least 0.26 of the frame
/// diagonal, as are the attach separations, so each threshold of the default
/// matcher config is met with a 2x margin.
inline std::vector<DetectionFrame> simulate_stream(const Subgraph& g, const SimulationOptions& opt = {}) {
  constexpr int kApproach = 8, kTransport = 12, kRelease = 8, kDwell = 6;
  constexpr double kStaging = 0.26;
  const int hold = 2 * opt.k_confirm;

  detail::Layout layout(opt.width, opt.height);
  const double diag = std::hypot(static_cast<double>(opt.width), static_cast<double>(opt.height));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);

  // Objects present in the scene: every label the subgraph mentions.
  std::set<std::string> labels;
  for (const auto& u : g.units)
    for (const auto* side : {&u.inputs, &u.outputs})
      for (const auto& n : *side) labels.insert(n.label);

  std::map<std::string, detail::Vec2> pos;
  for (const auto& l : labels) pos[l] = layout.home(l);
  auto world = WorldState::initial(g);
  // Initially attached objects sit on their targets; resolve chains a few levels deep.
  for (int pass = 0; pass < 4; ++pass) {
    for (const auto& [label, entry] : world.entries()) {
      if (auto* s = detail::attachment_of(entry.node); s && pos.count(*s->related_object)) pos[label] = pos[*s->related_object];
    }
  }

  const detail::Vec2 left_rest = layout.hand_rest(Actor::left_hand);
  const detail::Vec2 right_rest = layout.hand_rest(Actor::right_hand);
  detail::Vec2 left = left_rest, right = right_rest;

  std::vector<DetectionFrame> frames;
  auto emit = [&]() {
    DetectionFrame f;
    f.t = static_cast<double>(frames.size()) / opt.fps;
    f.width = opt.width;
    f.height = opt.height;
    auto detect = [&](const std::string& label, detail::Vec2 c, double w, double h, double conf, bool hand) {
      if (opt.noise_sigma > 0) {
        c.x += jitter(rng) * opt.noise_sigma * diag;
        c.y += jitter(rng) * opt.noise_sigma * diag;
      }
      c.x = std::clamp(c.x, 0.0, static_cast<double>(opt.width));
      c.y = std::clamp(c.y, 0.0, static_cast<double>(opt.height));
      auto r3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
      f.detections.push_back({label, conf, {r3(c.x - w / 2), r3(c.y - h / 2), w, h}, hand});
    };
    for (const auto& [label, p] : pos) detect(label, p, 60, 40, 0.95, false);
    detect("left-hand", left, 90, 90, 0.9, true);
    detect("right-hand", right, 90, 90, 0.9, true);
    frames.push_back(std::move(f));
  };

  auto staging_for = [&](detail::Vec2 obj, detail::Vec2 rest) {
    double d = detail::dist(obj, rest);
    if (d <= 0) return rest;
    return detail::lerp(obj, rest, std::min(1.0, kStaging * diag / d));
  };

  for (int i = 0; i < kDwell; ++i) emit();

  for (const auto& u : g.units) {
    auto grasped = u.grasped_labels();
    if (grasped.empty() || !pos.count(grasped.front())) {
      for (int i = 0; i < kDwell; ++i) emit();
      world.apply(u);
      continue;
    }
    const std::string& obj = grasped.front();
    // A robot end effector is rendered as the right hand.
    Actor actor = Actor::right_hand;
    for (const auto& h : u.hands)
      if (h.grasped_object == obj) {
        actor = h.actor;
        break;
      }
    const bool use_left = actor == Actor::left_hand;
    detail::Vec2& hand = use_left ? left : right;
    const detail::Vec2 rest = use_left ? left_rest : right_rest;
    const detail::Vec2 start = pos[obj];
    detail::Vec2 target = start;
    for (const auto& n : u.outputs) {
      if (n.label != obj) continue;
      if (auto* s = detail::attachment_of(n); s && pos.count(*s->related_object)) {
        target = pos[*s->related_object];
      } else {
        for (const auto& st : n.states)
          if (detail::relation_of(st.name) == detail::Relation::detached) target = layout.home(obj);
      }
    }

    const detail::Vec2 stage_in = staging_for(start, rest);
    for (int i = 0; i < kApproach; ++i) {
      hand = detail::lerp(rest, stage_in, static_cast<double>(i + 1) / kApproach);
      emit();
    }
    hand = start;
    for (int i = 0; i < hold; ++i) emit();
    for (int i = 0; i < kTransport; ++i) {
      pos[obj] = detail::lerp(start, target, static_cast<double>(i + 1) / kTransport);
      hand = pos[obj];
      emit();
    }
    pos[obj] = target;
    const detail::Vec2 stage_out = staging_for(target, rest);
    for (int i = 0; i < kRelease; ++i) {
      hand = detail::lerp(stage_out, rest, static_cast<double>(i) / kRelease);
      emit();
    }
    hand = rest;
    for (int i = 0; i < kDwell; ++i) emit();
    world.apply(u);
  }
  return frames;
}

inline std::vector<DetectionFrame> simulate_stream(const Subgraph& g, double fps, double noise_sigma, std::uint64_t seed) {
  SimulationOptions opt;
  opt.fps = fps;
  opt.noise_sigma = noise_sigma;
  opt.seed = seed;
  return simulate_stream(g, opt);
}

}  // namespace foonlink::recognition
