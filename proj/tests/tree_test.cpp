#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <string>

#include "toptree/generators.hpp"
#include "toptree/tree.hpp"

namespace toptree {
namespace {

TEST(ParseTree, ReadsChildrenInTextualOrder) {
  const auto t = parse_tree("a(b,c(d))");
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t.label(t.root()).str(), "a");
  const auto& kids = t.children(t.root());
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(t.label(kids[0]).str(), "b");
  EXPECT_EQ(t.label(kids[1]).str(), "c");
  ASSERT_EQ(t.children(kids[1]).size(), 1u);
  EXPECT_EQ(t.label(t.children(kids[1])[0]).str(), "d");
}

TEST(ParseTree, SingleNode) {
  const auto t = parse_tree("a");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.edge_count(), 0u);
}

TEST(ParseTree, IgnoresWhitespaceBetweenTokens) {
  EXPECT_EQ(serialize_tree(parse_tree("  a ( b , c( d ) )\n")), "a(b,c(d))");
  EXPECT_EQ(serialize_tree(parse_tree("node_1(X2,y_3)")), "node_1(X2,y_3)");
}

TEST(ParseTree, RejectsMalformedInput) {
  EXPECT_THROW(parse_tree("a(b,c(d)"), ParseError);
  EXPECT_THROW(parse_tree(""), ParseError);
  EXPECT_THROW(parse_tree("   \n"), ParseError);
  EXPECT_THROW(parse_tree("a()"), ParseError);
  EXPECT_THROW(parse_tree("a(b))"), ParseError);
  EXPECT_THROW(parse_tree("a,b"), ParseError);
  EXPECT_THROW(parse_tree("a(b)c"), ParseError);
  EXPECT_THROW(parse_tree("a(b-c)"), ParseError);
  EXPECT_THROW(parse_tree("a(,b)"), ParseError);
}

TEST(ParseTree, ErrorCarriesPosition) {
  try {
    parse_tree("a(b,c(d)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 8u);
  }
}

TEST(ParseTree, DeepPathDoesNotRecurse) {
  std::string text;
  const int depth = 200000;
  for (int i = 0; i < depth; ++i) text += "a(";
  text += "a";
  text += std::string(depth, ')');
  const auto t = parse_tree(text);
  EXPECT_EQ(t.size(), static_cast<std::size_t>(depth + 1));
  EXPECT_EQ(tree_stats(t).depth, static_cast<std::size_t>(depth));
  EXPECT_EQ(serialize_tree(t), text);
}

TEST(SerializeTree, CanonicalForms) {
  EXPECT_EQ(serialize_tree(LabeledTree(Label("a"))), "a");
  LabeledTree t(Label("a"));
  t.add_child(t.root(), Label("b"));
  t.add_child(t.root(), Label("c"));
  EXPECT_EQ(serialize_tree(t), "a(b,c)");
}

TEST(SerializeTree, RoundTripsRandomTrees) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto t = gen_random_tree(1 + seed * 3, 1 + seed % 7, seed);
    const std::string text = serialize_tree(t);
    const auto back = parse_tree(text);
    EXPECT_TRUE(trees_equal(back, t));
    EXPECT_EQ(serialize_tree(back), text);
  }
}

TEST(TreesEqual, OrderAndShapeMatter) {
  EXPECT_TRUE(trees_equal(parse_tree("a(b,c)"), parse_tree("a(b,c)")));
  EXPECT_FALSE(trees_equal(parse_tree("a(b,c)"), parse_tree("a(c,b)")));
  EXPECT_FALSE(trees_equal(parse_tree("a(b)"), parse_tree("a(b,b)")));
  EXPECT_FALSE(trees_equal(parse_tree("a(b(c),d)"), parse_tree("a(b,c(d))")));
}

TEST(Label, RejectsInvalidTokens) {
  EXPECT_THROW(Label(""), std::invalid_argument);
  EXPECT_THROW(Label("a b"), std::invalid_argument);
  EXPECT_THROW(Label("a(b"), std::invalid_argument);
  EXPECT_NO_THROW(Label("w_17Z"));
}

TEST(TreeStats, CountsByHand) {
  const auto s = tree_stats(parse_tree("a(b,c(d))"));
  EXPECT_EQ(s.n, 4u);
  EXPECT_EQ(s.edges, 3u);
  EXPECT_EQ(s.sigma, 4u);
  EXPECT_EQ(s.depth, 2u);
}

TEST(TreeStats, UnaryAlphabetUsesBaseTwo) {
  const auto s = tree_stats(parse_tree("a(a,a)"));
  EXPECT_EQ(s.n, 3u);
  EXPECT_EQ(s.sigma, 1u);
  EXPECT_DOUBLE_EQ(s.info_bound, 3.0 / std::log2(3.0));
}

TEST(TreeStats, DeclaredSigmaOverridesCount) {
  const auto s = tree_stats(parse_tree("a(a,a)"), 16);
  EXPECT_EQ(s.sigma, 16u);
  EXPECT_DOUBLE_EQ(s.info_bound, 3.0 / (std::log(3.0) / std::log(16.0)));
}

TEST(TreeStats, FamilyTreeSize) {
  EXPECT_EQ(tree_stats(gen_family_tree({1, 2, 2, 0})).n, 27u);
}

// Depth via an independent recursive walk over parent pointers.
TEST(TreeStats, DepthMatchesParentWalk) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = gen_random_tree(300, 3, seed);
    std::size_t brute = 0;
    for (NodeId v = 0; v < t.size(); ++v) {
      std::size_t d = 0;
      for (NodeId u = v; t.parent(u) != kNoNode; u = t.parent(u)) ++d;
      brute = std::max(brute, d);
    }
    EXPECT_EQ(tree_stats(t).depth, brute);

    std::size_t child_total = 0;
    for (NodeId v = 0; v < t.size(); ++v) child_total += t.children(v).size();
    EXPECT_EQ(child_total, t.size() - 1);
  }
}

}  // namespace
}  // namespace toptree
