#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "toptree/bench.hpp"
#include "toptree/generators.hpp"

namespace toptree {
namespace {

TEST(Report, JsonRoundTrip) {
  const auto t = gen_family_tree({1, 2, 4, 0});
  const auto c = bench::compress(t, {Algorithm::kModified, {3, 2}, {}}, "in.bp", 2);
  const auto j = bench::to_json(c.report);
  const auto back = bench::report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.input, "in.bp");
  EXPECT_EQ(back.algo, Algorithm::kModified);
  EXPECT_EQ(back.alpha, (Alpha{3, 2}));
  EXPECT_EQ(back.tree.n, t.size());
  EXPECT_EQ(back.tree.sigma, 2u);
  EXPECT_EQ(back.dag.dag_nodes, c.dag.size());
  ASSERT_EQ(back.trace.size(), c.report.trace.size());
  for (std::size_t i = 0; i < back.trace.size(); ++i) {
    EXPECT_EQ(back.trace[i].t, i + 1);
    EXPECT_EQ(back.trace[i].clusters_after, c.report.trace[i].clusters_after);
    EXPECT_EQ(back.trace[i].m, back.trace[i].p + back.trace[i].q);
  }
  for (const char* key : {"input", "algo", "alpha", "tree_stats", "trace", "dag_stats", "wall_time_ms"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Compare, CsvRoundTrip) {
  const auto points = bench::compare({1, 2}, 2, 4);
  std::vector<bench::ComparisonRow> rows;
  for (const auto& p : points) rows.push_back(p.row);
  const auto back = bench::rows_from_csv(bench::to_csv(rows));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].k, 1u);
  EXPECT_EQ(back[1].k, 2u);
  EXPECT_EQ(back[1].N, gen_family_tree({2, 2, 4, 0}).size());
  EXPECT_EQ(back[0].dag_original, rows[0].dag_original);
  EXPECT_NEAR(back[0].ratio, rows[0].ratio, 1e-5 * rows[0].ratio);
  EXPECT_THROW(bench::rows_from_csv("k,x\n"), std::invalid_argument);
}

TEST(Compare, SingleGadget) {
  const auto points = bench::compare({1}, 2, 1);
  ASSERT_EQ(points.size(), 1u);
  EXPECT_EQ(points[0].row.N, 14u);
  EXPECT_EQ(points[0].path_clusters.per_gadget.size(), 1u);
}

TEST(Compare, RejectsBadRanges) {
  EXPECT_THROW(bench::compare({}, 2, 4), std::invalid_argument);
  EXPECT_THROW(bench::compare({0}, 2, 4), std::invalid_argument);
  EXPECT_THROW(bench::compare({1}, 2, 257), std::invalid_argument);
  EXPECT_THROW(bench::compare({1}, 1, 1), std::invalid_argument);
}

TEST(PathClusters, EveryGadgetPathContributes) {
  // Each gadget has its own path word, so its whole-path cluster is distinct.
  const auto p = bench::compare_point(1, 2, 16, {});
  EXPECT_GE(p.path_clusters.distinct_total, 16u);
  ASSERT_EQ(p.path_clusters.per_gadget.size(), 16u);
  for (std::size_t g : p.path_clusters.per_gadget) EXPECT_GE(g, 2u);  // w0 w0 and w0 w1 edges at least
}

TEST(FamilyPathEdges, MarksHeadEdgeAndPath) {
  const auto t = gen_family_tree({1, 2, 2, 0});
  const auto tags = bench::family_path_edges(t);
  std::size_t marked = 0;
  for (int g : tags) marked += g >= 0 ? 1 : 0;
  EXPECT_EQ(marked, 2u * 8u);
}

TEST(BoundCheck, SmallCounts) {
  const auto one = bench::bound_check(1, 2);
  ASSERT_EQ(one.levels.size(), 1u);
  EXPECT_EQ(one.levels[0].count, 9u);
  EXPECT_EQ(one.levels[0].well_formed, 4u);
  EXPECT_TRUE(one.passed());

  const auto three = bench::bound_check(3, 2);
  ASSERT_EQ(three.levels.size(), 3u);
  EXPECT_EQ(three.levels[1].count, 2u * 81u);
  EXPECT_EQ(three.levels[1].well_formed, 0u);
  EXPECT_EQ(three.levels[2].count, 5u * 729u);
  EXPECT_EQ(three.levels[2].well_formed, 5u * 4u * 4u);
  EXPECT_EQ(three.total, 9u + 162u + 3645u);
  EXPECT_EQ(three.bound, BigInt(96 * 96) * BigInt(96 * 96));
  EXPECT_TRUE(three.passed());

  EXPECT_THROW(bench::bound_check(4, 2), std::invalid_argument);
  EXPECT_THROW(bench::bound_check(0, 2), std::invalid_argument);
  EXPECT_THROW(bench::bound_check(1, 5), std::invalid_argument);
}

TEST(BoundCheck, ShapesFollowCatalanNumbers) {
  EXPECT_EQ(bench::detail::binary_shapes(1).size(), 1u);
  EXPECT_EQ(bench::detail::binary_shapes(2).size(), 2u);
  EXPECT_EQ(bench::detail::binary_shapes(3).size(), 5u);
  EXPECT_EQ(bench::detail::binary_shapes(4).size(), 14u);
}

TEST(Verify, PassesOnFamiliesAndRandomTrees) {
  std::vector<LabeledTree> trees{gen_family_tree({1, 2, 8, 0}), gen_path(kth_word(5, 64, 2)),
                                 gen_full_ternary(3, Label("w0")), gen_random_tree(700, 3, 1)};
  for (const auto& t : trees) {
    for (const BuildConfig& cfg : {BuildConfig{}, BuildConfig{Algorithm::kModified, {10, 9}, {}},
                                   BuildConfig{Algorithm::kModified, {2, 1}, {}}}) {
      const auto rep = bench::verify(t, cfg);
      for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    }
  }
}

TEST(Verify, ExternalDagMustReproduceInput) {
  const auto t = parse_tree("a(b(c),d)");
  const TopDag good = minimize(build_top_tree(t).tree);
  EXPECT_TRUE(bench::verify(t, {}, good).passed());
  const TopDag other = minimize(build_top_tree(parse_tree("a(b(c),e)")).tree);
  EXPECT_FALSE(bench::verify(t, {}, other).passed());
  const TopDag broken = read_tdag("L a b\nL b c\nI VB 0 1\n2\n");
  const auto rep = bench::verify(t, {}, broken);
  EXPECT_FALSE(rep.passed());
  EXPECT_NE(rep.checks.back().detail.find("inconsistent merge structure"), std::string::npos);
}

TEST(Verify, BuildFailureIsReported) {
  BuildConfig cfg;
  cfg.max_iterations = 1;
  const auto rep = bench::verify(gen_path(kth_word(0, 64, 2)), cfg);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.checks.front().name, "build");
}

}  // namespace
}  // namespace toptree
