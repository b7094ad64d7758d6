#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "foonlink/recognition/detection.hpp"
#include "foonlink/recognition/distance.hpp"
#include "support/generators.hpp"

using namespace foonlink::recognition;

namespace {

Detection at(const std::string& label, double cx, double cy, bool hand = false) {
  return Detection{label, 0.9, BoundingBox{cx - 1, cy - 1, 2, 2}, hand};
}

}  // namespace

TEST(Distance, HandComputedCase) {
  DetectionFrame f{0.0, 100, 100, {at("a", 0, 0), at("b", 3, 4)}};
  auto m = distance_matrices(f);
  ASSERT_EQ(m.o2o.rows(), 2u);
  EXPECT_NEAR(m.o2o(0, 1), 5.0 / std::sqrt(20000.0), 1e-12);
  EXPECT_NEAR(m.o2o(1, 0), 5.0 / std::sqrt(20000.0), 1e-12);
  EXPECT_EQ(m.o2h.cols(), 0u);
}

TEST(Distance, ObjectToHand) {
  DetectionFrame f{0.0, 300, 400, {at("nut", 0, 0), at("right-hand", 300, 400, true), at("left-hand", 0, 0, true)}};
  auto m = distance_matrices(f);
  EXPECT_EQ(m.object_labels, std::vector<std::string>{"nut"});
  EXPECT_EQ(m.hand_labels, (std::vector<std::string>{"right-hand", "left-hand"}));
  ASSERT_EQ(m.o2h.rows(), 1u);
  ASSERT_EQ(m.o2h.cols(), 2u);
  EXPECT_DOUBLE_EQ(m.o2h(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.o2h(0, 1), 0.0);
}

TEST(Distance, CentroidsOutsideFrameAreClamped) {
  DetectionFrame f{0.0, 100, 100, {at("a", -500, -500), at("b", 1000, 1000)}};
  auto m = distance_matrices(f);
  EXPECT_DOUBLE_EQ(m.o2o(0, 1), 1.0);
}

TEST(Distance, EmptyFrame) {
  auto m = distance_matrices(DetectionFrame{0.0, 640, 480, {}});
  EXPECT_TRUE(m.o2o.empty());
  EXPECT_TRUE(m.o2h.empty());
}

TEST(Distance, RandomFrameProperties) {
  foonlink::fixtures::SubgraphGenerator gen(7);
  for (int i = 0; i < 1000; ++i) {
    auto f = gen.frame();
    auto m = distance_matrices(f);
    const auto n = m.o2o.rows();
    ASSERT_EQ(m.o2o.cols(), n);
    for (std::size_t a = 0; a < n; ++a) {
      ASSERT_EQ(m.o2o(a, a), 0.0);
      for (std::size_t b = 0; b < n; ++b) {
        ASSERT_EQ(m.o2o(a, b), m.o2o(b, a));
        ASSERT_GE(m.o2o(a, b), 0.0);
        ASSERT_LE(m.o2o(a, b), 1.0);
      }
      for (std::size_t h = 0; h < m.o2h.cols(); ++h) {
        ASSERT_GE(m.o2h(a, h), 0.0);
        ASSERT_LE(m.o2h(a, h), 1.0);
      }
    }
  }
}

TEST(Distance, PermutingDetectionsPermutesMatrix) {
  foonlink::fixtures::SubgraphGenerator gen(11);
  for (int i = 0; i < 200; ++i) {
    auto f = gen.frame();
    auto g = f;
    std::reverse(g.detections.begin(), g.detections.end());
    auto a = distance_matrices(f);
    auto b = distance_matrices(g);
    const auto n = a.o2o.rows();
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) ASSERT_EQ(a.o2o(x, y), b.o2o(n - 1 - x, n - 1 - y));
  }
}

TEST(Detections, JsonLinesRoundTrip) {
  foonlink::fixtures::SubgraphGenerator gen(3);
  std::vector<DetectionFrame> frames;
  for (int i = 0; i < 20; ++i) frames.push_back(gen.frame());
  std::stringstream ss;
  write_jsonl(ss, frames);
  EXPECT_EQ(read_jsonl(ss), frames);
}

TEST(Detections, BadLinesAreReported) {
  std::stringstream ss("{\"t\":0,\"width\":10,\"height\":10,\"detections\":[]}\nnot json\n\n");
  std::vector<std::string> diag;
  auto frames = read_jsonl(ss, &diag);
  EXPECT_EQ(frames.size(), 1u);
  EXPECT_EQ(diag.size(), 1u);
}

TEST(Detections, FrameProblems) {
  EXPECT_FALSE(frame_problem(DetectionFrame{0, 10, 10, {at("a", 1, 1)}}).has_value());
  EXPECT_TRUE(frame_problem(DetectionFrame{0, 0, 10, {}}).has_value());
  EXPECT_TRUE(frame_problem(DetectionFrame{NAN, 10, 10, {}}).has_value());
  DetectionFrame bad{0, 10, 10, {at("a", 1, 1)}};
  bad.detections[0].bbox.w = 0;
  EXPECT_TRUE(frame_problem(bad).has_value());
  bad.detections[0].bbox.w = 2;
  bad.detections[0].confidence = 1.5;
  EXPECT_TRUE(frame_problem(bad).has_value());
}
