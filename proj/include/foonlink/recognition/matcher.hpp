#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foonlink/error.hpp"
#include "foonlink/foon/types.hpp"
#include "foonlink/foon/validate.hpp"
#include "foonlink/foon/world.hpp"
#include "foonlink/recognition/detection.hpp"
#include "foonlink/recognition/distance.hpp"

namespace foonlink::recognition {

/// Matcher thresholds. Distances are normalized by the frame diagonal.
struct RecognizerConfig {
  double tau_grasp = 0.05;
  double tau_release = 0.12;
  double tau_attach = 0.04;
  int k_confirm = 5;
  double min_confidence = 0.5;

  void check() const {
    if (!(tau_grasp < tau_release)) throw std::invalid_argument("tau_grasp must be smaller than tau_release");
    if (k_confirm < 1) throw std::invalid_argument("k_confirm must be at least 1");
  }
};

enum class Phase { grasp, transport, release };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::grasp: return "grasp";
    case Phase::transport: return "transport";
    case Phase::release: return "release";
  }
  return "grasp";
}

struct UnitRef {
  std::string subgraph;
  std::size_t unit_index = 0;

  friend bool operator==(const UnitRef&, const UnitRef&) = default;
};

struct PhaseSegment {
  UnitRef unit;
  Phase phase = Phase::grasp;
  double t_start = 0;
  double t_end = 0;
  std::size_t frames = 0;
  double score = 1.0;  // threshold margin in [0, 1]
};

struct RecognizedUnit {
  UnitRef unit;
  double t_start = 0;
  double t_end = 0;
  double confidence = 0;
  std::vector<PhaseSegment> evidence;
};

/// Features handed to a classifier for one frame.
struct FrameFeatures {
  const DetectionFrame& frame;
  const DistanceMatrices& matrices;
};

/// Turns a sequence of per-frame features into completed unit hypotheses.
/// The recognizer owns world-state bookkeeping; a classifier only reads it.
class UnitClassifier {
 public:
  virtual ~UnitClassifier() = default;
  virtual std::vector<RecognizedUnit> observe(const FrameFeatures& features, const WorldState& world) = 0;
};

namespace detail {

inline double margin_below(double x, double tau) { return std::clamp((tau - x) / (tau / 2), 0.0, 1.0); }
inline double margin_above(double x, double tau) { return std::clamp((x - tau) / tau, 0.0, 1.0); }

inline bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

enum class Relation { none, attached, detached };

inline Relation relation_of(std::string_view state_name) {
  if (starts_with(state_name, "detached")) return Relation::detached;
  if (starts_with(state_name, "attached") || starts_with(state_name, "secured") ||
      starts_with(state_name, "inserted") || state_name == "on" || starts_with(state_name, "on "))
    return Relation::attached;
  return Relation::none;
}

// Index of the most confident detection with `label` in the object or hand
// partition, matching the row/column order of distance_matrices().
inline std::optional<std::size_t> partition_index(const DetectionFrame& f, std::string_view label, bool hand) {
  std::optional<std::size_t> best;
  double best_conf = -1;
  std::size_t idx = 0;
  for (const auto& d : f.detections) {
    if (d.is_hand != hand) continue;
    if (d.label == label && d.confidence > best_conf) {
      best = idx;
      best_conf = d.confidence;
    }
    ++idx;
  }
  return best;
}

}  // namespace detail

/// Deterministic FOON-grounded matcher.
///
/// While idle, every unit whose inputs hold in the world state is a candidate.
/// A candidate is confirmed once the distance between an annotated hand and
/// the object it grasps stays below tau_grasp for k_confirm consecutive
/// frames. The active unit completes on the first frame where that distance
/// exceeds tau_release, all relative output states are visible in the
/// object-to-object distances and the unit's confidence reaches
/// min_confidence. Until then, a new confirmed grasp replaces the activity.
class FoonMatcher final : public UnitClassifier {
 public:
  FoonMatcher(Subgraph foon, RecognizerConfig cfg) : foon_(std::move(foon)), cfg_(cfg) { cfg_.check(); }

  std::vector<RecognizedUnit> observe(const FrameFeatures& ff, const WorldState& world) override {
    std::vector<RecognizedUnit> done;
    const double t = ff.frame.t;

    if (active_) {
      auto& a = *active_;
      const auto& unit = foon_.units[a.unit];
      if (auto d = grasp_distance(unit, ff)) {
        if (*d <= cfg_.tau_release) {
          if (a.transport_frames == 0) a.transport_first = t;
          a.transport_last = t;
          ++a.transport_frames;
          a.release_first.reset();
          a.release_frames = 0;
          runs_.clear();
        } else {
          if (!a.release_first) {
            a.release_first = t;
            runs_.clear();
          }
          ++a.release_frames;
          auto scores = corroborate(unit, ff);
          if (scores) {
            scores->push_back(detail::margin_above(*d, cfg_.tau_release));
            done = finish(t, *scores);
            if (!done.empty()) return done;
          }
        }
      }
      if (!active_->release_first) return done;
    }

    // Idle, or waiting for outputs after a release: look for a confirmed grasp.
    // Frames between tau_grasp and tau_release neither count nor break a run.
    bool confirmed = false;
    std::vector<std::size_t> near;
    for (std::size_t i = 0; i < foon_.units.size(); ++i) {
      const auto& unit = foon_.units[i];
      auto& run = runs_[i];
      auto d = world.satisfies(unit) ? grasp_distance(unit, ff) : std::nullopt;
      if (!d || *d > cfg_.tau_release) {
        run = Run{};
        continue;
      }
      if (run.count > 0) near.push_back(i);
      if (*d >= cfg_.tau_grasp) continue;
      if (run.count == 0) {
        run.t_first = t;
        near.push_back(i);
      }
      ++run.count;
      run.max_d = std::max(run.max_d, *d);
      confirmed = confirmed || run.count >= cfg_.k_confirm;
    }
    // Parts stacked on each other share a centroid, so one grasp can match
    // several units. The FOON order decides: most recent inputs, then lowest index.
    std::optional<std::size_t> winner;
    if (confirmed) {
      for (auto i : near)
        if (!winner || world.recency(foon_.units[i]) > world.recency(foon_.units[*winner])) winner = i;
    }
    if (winner) {
      const auto& run = runs_[*winner];
      Activity a;
      a.unit = *winner;
      a.t_start = run.t_first;
      a.grasp_end = t;
      a.grasp_frames = static_cast<std::size_t>(run.count);
      a.grasp_max_d = run.max_d;
      active_ = a;
      runs_.clear();
    }
    return done;
  }

  const Subgraph& foon() const { return foon_; }

 private:
  struct Run {
    int count = 0;
    double t_first = 0;
    double max_d = 0;
  };

  struct Activity {
    std::size_t unit = 0;
    double t_start = 0;
    double grasp_end = 0;
    std::size_t grasp_frames = 0;
    double grasp_max_d = 0;
    double transport_first = 0;
    double transport_last = 0;
    std::size_t transport_frames = 0;
    std::optional<double> release_first;
    std::size_t release_frames = 0;
  };

  std::optional<double> grasp_distance(const FunctionalUnit& unit, const FrameFeatures& ff) const {
    std::optional<double> best;
    for (const auto& h : unit.hands) {
      if (!h.grasped_object) continue;
      auto oi = detail::partition_index(ff.frame, *h.grasped_object, false);
      if (!oi) continue;
      for (std::size_t j = 0; j < ff.matrices.hand_labels.size(); ++j) {
        const auto& hl = ff.matrices.hand_labels[j];
        if (h.actor != Actor::robot_end_effector && hl != to_string(h.actor)) continue;
        double d = ff.matrices.o2h(*oi, j);
        if (!best || d < *best) best = d;
      }
    }
    return best;
  }

  // Scores of every relative-state check, or nullopt if any check fails.
  std::optional<std::vector<double>> corroborate(const FunctionalUnit& unit, const FrameFeatures& ff) const {
    std::vector<double> scores;
    for (const auto& n : unit.outputs) {
      for (const auto& s : n.states) {
        if (!s.related_object) continue;
        auto rel = detail::relation_of(s.name);
        if (rel == detail::Relation::none) continue;
        auto a = detail::partition_index(ff.frame, n.label, false);
        auto b = detail::partition_index(ff.frame, *s.related_object, false);
        if (!a || !b) return std::nullopt;
        double d = ff.matrices.o2o(*a, *b);
        if (rel == detail::Relation::attached) {
          if (!(d < cfg_.tau_attach)) return std::nullopt;
          scores.push_back(detail::margin_below(d, cfg_.tau_attach));
        } else {
          if (!(d > cfg_.tau_release)) return std::nullopt;
          scores.push_back(detail::margin_above(d, cfg_.tau_release));
        }
      }
    }
    return scores;
  }

  // Emits the active unit, unless its confidence is below the floor; then the
  // activity stays open so a later release frame can still complete it.
  std::vector<RecognizedUnit> finish(double t_end, std::vector<double> release_scores) {
    const auto a = *active_;
    UnitRef ref{foon_.name, foon_.units[a.unit].unit_index};
    double grasp_score = detail::margin_below(a.grasp_max_d, cfg_.tau_grasp);
    double release_score = 0;
    for (double s : release_scores) release_score += s;
    release_score /= static_cast<double>(release_scores.size());

    std::vector<double> all{grasp_score};
    all.insert(all.end(), release_scores.begin(), release_scores.end());
    double confidence = 0;
    for (double s : all) confidence += s;
    confidence /= static_cast<double>(all.size());
    if (confidence < cfg_.min_confidence) return {};
    active_.reset();
    runs_.clear();

    RecognizedUnit r{ref, a.t_start, t_end, confidence, {}};
    r.evidence.push_back({ref, Phase::grasp, a.t_start, a.grasp_end, a.grasp_frames, grasp_score});
    if (a.transport_frames > 0)
      r.evidence.push_back({ref, Phase::transport, a.transport_first, a.transport_last, a.transport_frames, 1.0});
    r.evidence.push_back({ref, Phase::release, *a.release_first, t_end, a.release_frames, release_score});
    return {std::move(r)};
  }

  Subgraph foon_;
  RecognizerConfig cfg_;
  std::map<std::size_t, Run> runs_;
  std::optional<Activity> active_;
};

/// Single-consumer recognition state machine: feed frames in time order.
class Recognizer {
 public:
  Recognizer(const Subgraph& foon, RecognizerConfig cfg)
      : Recognizer(foon, std::make_unique<FoonMatcher>(foon, cfg)) {}

  Recognizer(const Subgraph& foon, std::unique_ptr<UnitClassifier> classifier)
      : foon_(foon), world_(WorldState::initial(foon)), classifier_(std::move(classifier)) {
    auto report = validate(foon_);
    if (!report.empty()) throw Error("subgraph '" + foon_.name + "' does not validate: " + report.front().to_string());
  }

  /// Emits the units completed by this frame. Throws StreamError when `t`
  /// goes backwards; malformed frames are skipped and noted in diagnostics().
  std::vector<RecognizedUnit> feed(const DetectionFrame& frame) {
    ++frame_no_;
    if (auto problem = frame_problem(frame)) {
      diagnostics_.push_back("frame " + std::to_string(frame_no_) + " skipped: " + *problem);
      return {};
    }
    if (last_t_ && frame.t < *last_t_)
      throw StreamError("timestamp " + std::to_string(frame.t) + " at frame " + std::to_string(frame_no_) +
                        " precedes " + std::to_string(*last_t_));
    last_t_ = frame.t;

    auto matrices = distance_matrices(frame);
    auto hyps = classifier_->observe(FrameFeatures{frame, matrices}, world_);
    std::vector<RecognizedUnit> out;
    for (auto& h : hyps) {
      if (h.unit.subgraph != foon_.name || h.unit.unit_index >= foon_.units.size()) {
        diagnostics_.push_back("classifier proposed unresolvable unit " + h.unit.subgraph + "#" +
                               std::to_string(h.unit.unit_index));
        continue;
      }
      const auto& unit = foon_.units[h.unit.unit_index];
      if (!world_.satisfies(unit)) {
        diagnostics_.push_back("unit " + std::to_string(h.unit.unit_index) + " rejected: preconditions not met");
        continue;
      }
      world_.apply(unit);
      out.push_back(std::move(h));
    }
    return out;
  }

  const WorldState& world() const { return world_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  Subgraph foon_;
  WorldState world_;
  std::unique_ptr<UnitClassifier> classifier_;
  std::optional<double> last_t_;
  std::size_t frame_no_ = 0;
  std::vector<std::string> diagnostics_;
};

struct RecognitionResult {
  std::vector<RecognizedUnit> units;
  std::vector<std::string> diagnostics;
};

inline RecognitionResult recognize(const std::vector<DetectionFrame>& frames, const Subgraph& foon,
                                   const RecognizerConfig& cfg = {}) {
  Recognizer rec(foon, cfg);
  RecognitionResult res;
  for (const auto& f : frames) {
    auto units = rec.feed(f);
    res.units.insert(res.units.end(), std::make_move_iterator(units.begin()), std::make_move_iterator(units.end()));
  }
  res.diagnostics = rec.diagnostics();
  return res;
}

inline std::vector<RecognizedUnit> recognize_stream(const std::vector<DetectionFrame>& frames, const Subgraph& foon,
                                                    const RecognizerConfig& cfg = {}) {
  return recognize(frames, foon, cfg).units;
}

/// Grasp, transport and release intervals of every recognized unit, in time order.
inline std::vector<PhaseSegment> segment_stream(const std::vector<DetectionFrame>& frames, const Subgraph& foon,
                                                const RecognizerConfig& cfg = {}) {
  std::vector<PhaseSegment> out;
  for (const auto& u : recognize_stream(frames, foon, cfg)) out.insert(out.end(), u.evidence.begin(), u.evidence.end());
  return out;
}

inline nlohmann::ordered_json to_json(const RecognizedUnit& u) {
  nlohmann::ordered_json j;
  j["subgraph"] = u.unit.subgraph;
  j["unit_index"] = u.unit.unit_index;
  j["t_start"] = u.t_start;
  j["t_end"] = u.t_end;
  j["confidence"] = u.confidence;
  return j;
}

inline nlohmann::ordered_json to_json(const std::vector<RecognizedUnit>& units) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& u : units) arr.push_back(to_json(u));
  return arr;
}

inline RecognizedUnit recognized_unit_from_json(const nlohmann::json& j) {
  RecognizedUnit u;
  u.unit.subgraph = j.at("subgraph").get<std::string>();
  u.unit.unit_index = j.at("unit_index").get<std::size_t>();
  u.t_start = j.at("t_start").get<double>();
  u.t_end = j.at("t_end").get<double>();
  u.confidence = j.at("confidence").get<double>();
  if (u.t_start > u.t_end) throw Error("recognized unit has t_start after t_end");
  return u;
}

inline nlohmann::ordered_json to_json(const PhaseSegment& s) {
  nlohmann::ordered_json j;
  j["subgraph"] = s.unit.subgraph;
  j["unit_index"] = s.unit.unit_index;
  j["phase"] = std::string(to_string(s.phase));
  j["t_start"] = s.t_start;
  j["t_end"] = s.t_end;
  j["frames"] = s.frames;
  return j;
}

}  // namespace foonlink::recognition
