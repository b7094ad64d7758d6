#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foonlink/error.hpp"

namespace foonlink::recognition {

struct BoundingBox {
  double x = 0, y = 0, w = 0, h = 0;

  double cx() const { return x + w / 2; }
  double cy() const { return y + h / 2; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
  std::string label;
  double confidence = 1.0;
  BoundingBox bbox;
  bool is_hand = false;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Detector output for one video frame; `t` in seconds.
struct DetectionFrame {
  double t = 0;
  int width = 0;
  int height = 0;
  std::vector<Detection> detections;

  double diagonal() const { return std::hypot(static_cast<double>(width), static_cast<double>(height)); }

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

/// Reason the frame cannot be used, or nullopt when it is well formed.
inline std::optional<std::string> frame_problem(const DetectionFrame& f) {
  if (!std::isfinite(f.t)) return "non-finite timestamp";
  if (f.width <= 0 || f.height <= 0) return "non-positive frame size";
  for (const auto& d : f.detections) {
    if (!(d.bbox.w > 0) || !(d.bbox.h > 0)) return "detection '" + d.label + "' has a non-positive box";
    if (!std::isfinite(d.bbox.x) || !std::isfinite(d.bbox.y) || !std::isfinite(d.bbox.w) || !std::isfinite(d.bbox.h))
      return "detection '" + d.label + "' has a non-finite box";
    if (!(d.confidence >= 0 && d.confidence <= 1)) return "detection '" + d.label + "' has confidence outside [0,1]";
  }
  return std::nullopt;
}

inline nlohmann::ordered_json to_json(const DetectionFrame& f) {
  nlohmann::ordered_json j;
  j["t"] = f.t;
  j["width"] = f.width;
  j["height"] = f.height;
  auto dets = nlohmann::ordered_json::array();
  for (const auto& d : f.detections) {
    nlohmann::ordered_json dj;
    dj["label"] = d.label;
    dj["confidence"] = d.confidence;
    dj["bbox"] = {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h};
    dj["hand"] = d.is_hand;
    dets.push_back(std::move(dj));
  }
  j["detections"] = std::move(dets);
  return j;
}

inline DetectionFrame frame_from_json(const nlohmann::json& j) {
  DetectionFrame f;
  f.t = j.at("t").get<double>();
  f.width = j.at("width").get<int>();
  f.height = j.at("height").get<int>();
  for (const auto& dj : j.at("detections")) {
    Detection d;
    d.label = dj.at("label").get<std::string>();
    d.confidence = dj.value("confidence", 1.0);
    const auto& b = dj.at("bbox");
    if (!b.is_array() || b.size() != 4) throw StreamError("bbox must be [x, y, w, h]");
    d.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    d.is_hand = dj.value("hand", false);
    f.detections.push_back(std::move(d));
  }
  return f;
}

inline void write_jsonl(std::ostream& out, const std::vector<DetectionFrame>& frames) {
  for (const auto& f : frames) out << to_json(f).dump() << '\n';
}

/// Reads a JSON Lines detection stream. Blank lines are ignored; a line that
/// is not a frame object is reported through `diagnostics` and skipped.
inline std::vector<DetectionFrame> read_jsonl(std::istream& in, std::vector<std::string>* diagnostics = nullptr) {
  std::vector<DetectionFrame> frames;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      frames.push_back(frame_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      if (diagnostics) diagnostics->push_back("line " + std::to_string(ln) + ": " + e.what());
    }
  }
  return frames;
}

}  // namespace foonlink::recognition
