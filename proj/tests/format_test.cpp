#include <gtest/gtest.h>

#include <string>

#include "foonlink/foon/format.hpp"
#include "foonlink/foon/universal.hpp"
#include "foonlink/kb/industrial.hpp"
#include "support/generators.hpp"

using namespace foonlink;

namespace {

const char* kTwoUnits =
    "#FOONv1 demo\n"
    "# a comment\n"
    "\n"
    "O\tbolt\t0\n"
    "S\tdetached\n"
    "O\tplate\t0\n"
    "M\tinsert\n"
    "H\tright-hand\tbolt\n"
    "H\tleft-hand\n"
    "O\tbolt\t1\n"
    "S\tinserted\tplate\n"
    "//\n"
    "M\tpress\n"
    "O\tplate\t0\n"
    "S\tpainted\n"
    "//\n";

template <typename E>
std::size_t error_line(const std::string& doc) {
  try {
    parse_foon(doc);
  } catch (const E& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected an error for:\n" << doc;
  return 0;
}

}  // namespace

TEST(Format, ParsesUnitsInOrder) {
  auto g = parse_foon(kTwoUnits);
  EXPECT_EQ(g.name, "demo");
  ASSERT_EQ(g.units.size(), 2u);
  const auto& u0 = g.units[0];
  EXPECT_EQ(u0.unit_index, 0u);
  EXPECT_EQ(u0.motion.label, "insert");
  ASSERT_EQ(u0.inputs.size(), 2u);
  EXPECT_EQ(u0.inputs[0].label, "bolt");
  EXPECT_EQ(u0.inputs[0].states, std::vector<StateDescriptor>{state("detached")});
  EXPECT_TRUE(u0.inputs[1].states.empty());
  ASSERT_EQ(u0.hands.size(), 2u);
  EXPECT_EQ(u0.hands[0].actor, Actor::right_hand);
  EXPECT_EQ(u0.hands[0].grasped_object, "bolt");
  EXPECT_FALSE(u0.hands[1].grasped_object.has_value());
  ASSERT_EQ(u0.outputs.size(), 1u);
  EXPECT_TRUE(u0.outputs[0].is_goal);
  EXPECT_EQ(u0.outputs[0].states, std::vector<StateDescriptor>{state("inserted", "plate")});

  const auto& u1 = g.units[1];
  EXPECT_EQ(u1.unit_index, 1u);
  EXPECT_TRUE(u1.inputs.empty());
  ASSERT_EQ(u1.outputs.size(), 1u);
}

TEST(Format, NormalizesLabels) {
  auto g = parse_foon("#FOONv1 n\nO\t  Flange   NUT \t0\nS\tLoose\tT-Bolt\nM\tScrew\n//\n");
  EXPECT_EQ(g.units[0].inputs[0].label, "flange nut");
  EXPECT_EQ(g.units[0].inputs[0].states[0], state("loose", "t-bolt"));
  EXPECT_EQ(g.units[0].motion.label, "screw");
}

TEST(Format, SerializeIsCanonical) {
  auto g = parse_foon(kTwoUnits);
  auto text = serialize_foon(g);
  EXPECT_EQ(text.rfind("#FOONv1 demo\n", 0), 0u);
  EXPECT_EQ(text.find("# a comment"), std::string::npos);
  EXPECT_EQ(parse_foon(text), g);
  EXPECT_EQ(serialize_foon(parse_foon(text)), text);
}

TEST(Format, EmptySubgraphIsHeaderOnly) {
  Subgraph g{"empty", {}};
  EXPECT_EQ(serialize_foon(g), "#FOONv1 empty\n");
  EXPECT_EQ(parse_foon("#FOONv1 empty\n"), g);
}

TEST(Format, SyntaxErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\nS\tloose\n"), 2u);
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\nO\tnut\t0\nH\tright-hand\n//\n"), 3u);
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\nM\ta\nM\tb\n//\n"), 3u);
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\nM\ta\nO\tnut\t0\nH\tleft-hand\n//\n"), 4u);
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\nO\tnut\t0\nX\tfoo\n"), 3u);
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\nO\tnut\t7\nM\ta\n//\n"), 2u);
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\nO\tnut\t0\n\nM\ta\n//\n"), 3u);
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\nM\ta\nH\tthird-hand\n//\n"), 3u);
  EXPECT_EQ(error_line<SyntaxError>("#FOONv1 x\n//\n"), 2u);
}

TEST(Format, StructureErrors) {
  EXPECT_GT(error_line<StructureError>("#FOONv1 x\nO\tnut\t0\n//\n"), 0u);
  EXPECT_GT(error_line<StructureError>("#FOONv1 x\nO\tnut\t0\nM\tscrew\nO\tnut\t0\n"), 0u);
}

TEST(Format, RejectsMissingOrWrongHeader) {
  EXPECT_THROW(parse_foon(""), Error);
  EXPECT_THROW(parse_foon("O\tnut\t0\nM\ta\n//\n"), Error);
  EXPECT_THROW(parse_foon("#FOONv1-U a+b\n"), Error);
}

TEST(Format, AcceptsCrLf) {
  auto g = parse_foon("#FOONv1 crlf\r\nO\tnut\t0\r\nM\tscrew\r\n//\r\n");
  ASSERT_EQ(g.units.size(), 1u);
  EXPECT_EQ(g.units[0].inputs[0].label, "nut");
}

TEST(Format, RandomRoundTrip) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    fixtures::SubgraphGenerator gen(seed);
    auto g = gen.subgraph("g" + std::to_string(seed));
    auto text = serialize_foon(g);
    ASSERT_EQ(parse_foon(text), g) << "seed " << seed << "\n" << text;
  }
}

TEST(Format, UniversalRoundTrip) {
  auto u = merge({kb::load_assembly(), kb::load_disassembly()});
  auto text = serialize_universal(u);
  EXPECT_TRUE(is_universal_document(text));
  EXPECT_FALSE(is_universal_document(kb::kAssemblyFoon));
  EXPECT_NE(text.find("# from industrial_assembly#unit/0"), std::string::npos);
  auto back = parse_universal(text);
  EXPECT_EQ(back.object_nodes, u.object_nodes);
  EXPECT_EQ(back.units, u.units);
  EXPECT_EQ(serialize_universal(back), text);
}
