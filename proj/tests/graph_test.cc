#include "crossfire/graph.h"

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace crossfire {
namespace {

TEST(PathTest, ChildPathsAndDepth) {
  const std::string f4 = ChildPath("var2", EdgeLabel::Field("f4"));
  const std::string f3 = ChildPath(f4, EdgeLabel::Field("f3"));
  EXPECT_EQ(f3, "var2.f4.f3");
  EXPECT_EQ(PathDepth("var2"), 1);
  EXPECT_EQ(PathDepth(f3), 3);
  EXPECT_EQ(ChildPath("list", EdgeLabel::Index(2)), "list[2]");
  EXPECT_EQ(PathDepth("list[2].name"), 3);
}

TEST(PathTest, EscapesSeparatorsInNames) {
  EXPECT_EQ(EscapePathSegment("a.b[0]\\"), "a\\.b\\[0\\]\\\\");
  const std::string id = ChildPath("x", EdgeLabel::Field("a.b"));
  EXPECT_EQ(id, "x.a\\.b");
  EXPECT_EQ(PathDepth(id), 2);
  EXPECT_EQ(ParentPath(id), "x");
}

TEST(PathTest, ParentPath) {
  EXPECT_EQ(ParentPath("var1"), std::nullopt);
  EXPECT_EQ(ParentPath("var1.f2"), "var1");
  EXPECT_EQ(ParentPath("l[3].f"), "l[3]");
}

TEST(PathTest, StrictPrefixRespectsSegmentBoundaries) {
  EXPECT_TRUE(IsStrictPathPrefix("var1", "var1.f2"));
  EXPECT_TRUE(IsStrictPathPrefix("l", "l[0]"));
  EXPECT_FALSE(IsStrictPathPrefix("var1", "var1"));
  EXPECT_FALSE(IsStrictPathPrefix("var1.f", "var1.f2"));
  EXPECT_FALSE(IsStrictPathPrefix("var1.f2", "var1"));
  // "x\" is an escaped-name prefix of "x\.y" but not a path ancestor.
  EXPECT_FALSE(IsStrictPathPrefix("x\\", "x\\.y"));
  EXPECT_TRUE(IsStrictPathPrefix("x\\\\", "x\\\\.y"));
}

TEST(PathTest, RejectsMalformedIds) {
  EXPECT_FALSE(ParsePath(""));
  EXPECT_FALSE(ParsePath("a."));
  EXPECT_FALSE(ParsePath("a[]"));
  EXPECT_FALSE(ParsePath("a[01]"));
  EXPECT_FALSE(ParsePath("a[-1]"));
  EXPECT_FALSE(ParsePath("a[1"));
}

TEST(PathTest, Reroot) {
  EXPECT_EQ(RerootPath("var1.f2", "var1", "alias"), "alias.f2");
  EXPECT_EQ(RerootPath("var1", "var1", "$"), "$");
}

std::string RandomName(std::mt19937_64& rng) {
  static const std::string kAlphabet = "ab.[]\\_9";
  std::string out;
  const int n = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) out.push_back(kAlphabet[rng() % kAlphabet.size()]);
  return out;
}

TEST(PathPropertyTest, ParseInvertsChildPath) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::string root = RandomName(rng);
    std::string id = EscapePathSegment(root);
    std::vector<EdgeLabel> labels;
    const int n = static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      const EdgeLabel label = rng() % 2 ? EdgeLabel::Field(RandomName(rng))
                                        : EdgeLabel::Index(static_cast<int64_t>(rng() % 20));
      const std::string parent = id;
      id = ChildPath(id, label);
      labels.push_back(label);
      ASSERT_EQ(ParentPath(id), parent);
      ASSERT_TRUE(IsStrictPathPrefix(parent, id));
    }
    const auto parsed = ParsePath(id);
    ASSERT_TRUE(parsed) << id;
    EXPECT_EQ(parsed->root, root);
    EXPECT_EQ(parsed->labels, labels);
    EXPECT_EQ(PathDepth(id), n + 1);
  }
}

TEST(EdgeLabelTest, FieldsSortBeforeIndices) {
  EXPECT_LT(EdgeLabel::Field("a"), EdgeLabel::Field("b"));
  EXPECT_LT(EdgeLabel::Field("zz"), EdgeLabel::Index(0));
  EXPECT_LT(EdgeLabel::Index(2), EdgeLabel::Index(10));
}

TEST(EnumNamesTest, RoundTrip) {
  for (NodeKind k : {NodeKind::kObject, NodeKind::kCollection, NodeKind::kPrimitive,
                     NodeKind::kNull, NodeKind::kBackReference, NodeKind::kTruncated}) {
    EXPECT_EQ(ParseNodeKind(NodeKindName(k)), k);
  }
  for (VariableKind k :
       {VariableKind::kLocal, VariableKind::kTestClassField, VariableKind::kMethodReturn,
        VariableKind::kInstantiatedObject, VariableKind::kStaticField}) {
    EXPECT_EQ(ParseVariableKind(VariableKindName(k)), k);
  }
  EXPECT_FALSE(ParseNodeKind("bogus"));
}

}  // namespace
}  // namespace crossfire
