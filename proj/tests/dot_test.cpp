#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "foonlink/foon/dot.hpp"
#include "foonlink/foon/format.hpp"
#include "foonlink/kb/industrial.hpp"

using namespace foonlink;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + needle.size())) ++n;
  return n;
}

}  // namespace

TEST(Dot, AssemblyStructure) {
  auto g = kb::load_assembly();
  auto dot = export_dot(g);
  EXPECT_EQ(dot.rfind("digraph \"industrial_assembly\" {\n", 0), 0u);
  EXPECT_EQ(dot.back(), '\n');
  EXPECT_EQ(count(dot, "shape=box"), 4u);
  EXPECT_EQ(count(dot, "shape=circle"), lift(g).object_nodes.size());
  EXPECT_EQ(count(dot, "fillcolor=\"blue\""), 1u);

  std::size_t edges = 0;
  for (const auto& u : g.units) edges += u.inputs.size() + u.outputs.size();
  EXPECT_EQ(count(dot, " -> "), edges);
}

TEST(Dot, GoalNodeCaption) {
  auto dot = export_dot(kb::load_assembly());
  auto goal = dot.find("fillcolor=\"blue\"");
  ASSERT_NE(goal, std::string::npos);
  auto line_start = dot.rfind('\n', goal);
  auto line = dot.substr(line_start + 1, goal - line_start);
  EXPECT_NE(line.find("label=\"bracket\\nsecured to strut profile\""), std::string::npos) << line;
}

TEST(Dot, EscapesQuotes) {
  Subgraph g{"q\"uote", {}};
  FunctionalUnit u;
  u.motion = MotionNode{"say \"hi\""};
  u.inputs.push_back(make_object("back\\slash"));
  g.units.push_back(u);
  auto dot = export_dot(g);
  EXPECT_NE(dot.find("digraph \"q\\\"uote\""), std::string::npos);
  EXPECT_NE(dot.find("label=\"say \\\"hi\\\"\""), std::string::npos);
  EXPECT_NE(dot.find("label=\"back\\\\slash\""), std::string::npos);
}

TEST(Dot, UniversalSharesNodes) {
  auto u = merge({kb::load_assembly(), kb::load_disassembly()});
  auto dot = export_dot(u, "universal");
  EXPECT_EQ(count(dot, "shape=circle"), 11u);
  EXPECT_EQ(count(dot, "shape=box"), 8u);
}

TEST(Dot, Deterministic) {
  EXPECT_EQ(export_dot(kb::load_disassembly()), export_dot(kb::load_disassembly()));
}
