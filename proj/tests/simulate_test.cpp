#include <gtest/gtest.h>

#include <set>

#include "foonlink/foon/format.hpp"
#include "foonlink/kb/industrial.hpp"
#include "foonlink/recognition/matcher.hpp"
#include "foonlink/recognition/simulate.hpp"

using namespace foonlink;
using namespace foonlink::recognition;

TEST(Simulate, Deterministic) {
  auto g = kb::load_assembly();
  EXPECT_EQ(simulate_stream(g, 30, 0.01, 42), simulate_stream(g, 30, 0.01, 42));
  EXPECT_NE(simulate_stream(g, 30, 0.01, 42), simulate_stream(g, 30, 0.01, 43));
  EXPECT_EQ(simulate_stream(g, 30, 0.0, 1), simulate_stream(g, 30, 0.0, 2));
}

TEST(Simulate, FramesAreWellFormedAndOrdered) {
  auto frames = simulate_stream(kb::load_disassembly(), 25, 0.02, 9);
  ASSERT_FALSE(frames.empty());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_FALSE(frame_problem(frames[i]).has_value());
    EXPECT_DOUBLE_EQ(frames[i].t, static_cast<double>(i) / 25);
    // Four parts and two hands in every frame.
    EXPECT_EQ(frames[i].detections.size(), 6u);
  }
}

TEST(Simulate, EnoughFramesPerUnit) {
  auto g = kb::load_assembly();
  SimulationOptions opt;
  const auto frames = simulate_stream(g, opt).size();
  EXPECT_GE(frames, g.units.size() * 3 * static_cast<std::size_t>(opt.k_confirm));
}

TEST(Simulate, DisassemblyStartsWithTheFlangeNut) {
  auto g = kb::load_disassembly();
  auto segs = segment_stream(simulate_stream(g), g);
  ASSERT_FALSE(segs.empty());
  EXPECT_EQ(segs.front().phase, Phase::grasp);
  EXPECT_EQ(segs.front().unit.unit_index, 0u);
  EXPECT_EQ(g.units[0].grasped_labels(), std::vector<std::string>{"flange nut"});
}

TEST(Simulate, SingleUnitHasThreePhases) {
  auto g = parse_foon(
      "#FOONv1 one\n"
      "O\tbracket\t0\nS\tdetached\nO\tstrut profile\t0\n"
      "M\tpick-and-place\nH\tright-hand\tbracket\n"
      "O\tbracket\t1\nS\tattached to\tstrut profile\nO\tstrut profile\t0\n//\n");
  auto segs = segment_stream(simulate_stream(g), g);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0].phase, Phase::grasp);
  EXPECT_EQ(segs[1].phase, Phase::transport);
  EXPECT_EQ(segs[2].phase, Phase::release);
  EXPECT_LE(segs[0].t_end, segs[1].t_start);
  EXPECT_LE(segs[1].t_end, segs[2].t_start);
}

TEST(Simulate, LeftHandUnits) {
  auto g = parse_foon(
      "#FOONv1 lefty\n"
      "O\tbolt\t0\nS\tdetached\nO\tplate\t0\n"
      "M\tinsert\nH\tleft-hand\tbolt\n"
      "O\tbolt\t1\nS\tinserted\tplate\nO\tplate\t0\n//\n");
  auto units = recognize_stream(simulate_stream(g), g);
  ASSERT_EQ(units.size(), 1u);
  EXPECT_EQ(units[0].unit.unit_index, 0u);
}

TEST(Simulate, UnitsWithoutGraspsOnlyDwell) {
  auto g = parse_foon("#FOONv1 idle\nO\tplate\t0\nM\tinspect\nO\tplate\t0\nS\tpainted\n//\n");
  auto frames = simulate_stream(g);
  EXPECT_EQ(frames.size(), 12u);
  EXPECT_TRUE(recognize_stream(frames, g).empty());
}
