#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "foonlink/recognition/detection.hpp"

namespace foonlink::recognition {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Object-to-object and object-to-hand centroid distances of one frame,
/// divided by the frame diagonal.
struct DistanceMatrices {
  std::vector<std::string> object_labels;
  std::vector<std::string> hand_labels;
  Matrix o2o;  // |objects| x |objects|
  Matrix o2h;  // |objects| x |hands|
};

namespace detail {

struct Point {
  double x, y;
};

inline Point clamped_centroid(const Detection& d, const DetectionFrame& f) {
  return {std::clamp(d.bbox.cx(), 0.0, static_cast<double>(f.width)),
          std::clamp(d.bbox.cy(), 0.0, static_cast<double>(f.height))};
}

}  // namespace detail

// Centroids are clamped into the frame, so every entry lies in [0, 1].
inline DistanceMatrices distance_matrices(const DetectionFrame& frame) {
  DistanceMatrices m;
  std::vector<detail::Point> objects, hands;
  for (const auto& d : frame.detections) {
    auto c = detail::clamped_centroid(d, frame);
    if (d.is_hand) {
      m.hand_labels.push_back(d.label);
      hands.push_back(c);
    } else {
      m.object_labels.push_back(d.label);
      objects.push_back(c);
    }
  }
  const double diag = frame.diagonal();
  auto dist = [diag](detail::Point a, detail::Point b) {
    return std::min(1.0, std::hypot(a.x - b.x, a.y - b.y) / diag);
  };

  m.o2o = Matrix(objects.size(), objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i)
    for (std::size_t j = i + 1; j < objects.size(); ++j) m.o2o(i, j) = m.o2o(j, i) = dist(objects[i], objects[j]);

  m.o2h = Matrix(objects.size(), hands.size());
  for (std::size_t i = 0; i < objects.size(); ++i)
    for (std::size_t j = 0; j < hands.size(); ++j) m.o2h(i, j) = dist(objects[i], hands[j]);
  return m;
}

}  // namespace foonlink::recognition
