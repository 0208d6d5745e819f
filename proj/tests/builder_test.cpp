#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "toptree/audit.hpp"
#include "toptree/builder.hpp"
#include "toptree/generators.hpp"
#include "toptree/tree.hpp"

namespace toptree {
namespace {

using Pair = std::pair<ClusterId, ClusterId>;

std::vector<Pair> pairs_of(const std::vector<MergeCandidate>& c) {
  std::vector<Pair> out;
  for (const auto& mc : c) out.emplace_back(mc.first, mc.second);
  return out;
}

// Auxiliary-tree view over a plain labeled tree whose edge (parent, v) is
// identified by v; edges in `fresh` count as created this iteration.
struct EdgeView {
  EdgeView(const LabeledTree& t, std::set<NodeId> fresh) : kids(t.size()), order(t.preorder()) {
    for (NodeId v = 0; v < t.size(); ++v) {
      for (NodeId c : t.children(v)) kids[v].push_back({c, c, fresh.count(c) > 0});
    }
  }
  NodeId root() const { return 0; }
  const std::vector<NodeId>& nodes() const { return order; }
  const std::vector<AuxEdge>& children(NodeId v) const { return kids[v]; }

  std::vector<std::vector<AuxEdge>> kids;
  std::vector<NodeId> order;
};

TEST(HorizontalCandidates, ThreeLeaves) {
  const AuxTree aux(parse_tree("r(a,b,c)"));
  EXPECT_EQ(pairs_of(horizontal_candidates(aux)), (std::vector<Pair>{{0, 1}}));
}

TEST(HorizontalCandidates, OddTailRule) {
  // clusters: 0=(r,a) 1=(r,b) 2=(r,c) 3=(a,x) 4=(b,y)
  const AuxTree aux(parse_tree("r(a(x),b(y),c)"));
  EXPECT_EQ(pairs_of(horizontal_candidates(aux)), (std::vector<Pair>{{1, 2}}));
}

TEST(HorizontalCandidates, SingleChildHasNone) {
  const AuxTree aux(parse_tree("r(a)"));
  EXPECT_TRUE(horizontal_candidates(aux).empty());
}

TEST(HorizontalCandidates, PairsNeedALeaf) {
  // clusters: 0=(r,a) 1=(r,b) 2=(r,c) 3=(r,d) then subtrees
  const AuxTree aux(parse_tree("r(a(x),b(y),c,d(z))"));
  EXPECT_EQ(pairs_of(horizontal_candidates(aux)), (std::vector<Pair>{{2, 3}}));
}

TEST(VerticalCandidates, EvenPathLeavesTopEdge) {
  const auto t = parse_tree("a(b(c(d)))");
  EXPECT_EQ(pairs_of(vertical_candidates(EdgeView(t, {}))), (std::vector<Pair>{{2, 3}}));
}

TEST(VerticalCandidates, OddPathSkipsFreshTopEdge) {
  const auto t = parse_tree("a(b(c))");
  EXPECT_TRUE(vertical_candidates(EdgeView(t, {1})).empty());
  EXPECT_EQ(pairs_of(vertical_candidates(EdgeView(t, {}))), (std::vector<Pair>{{1, 2}}));
}

TEST(VerticalCandidates, OddPathPairsTopEdgeLast) {
  const auto t = parse_tree("a(b(c(d(e))))");
  EXPECT_EQ(pairs_of(vertical_candidates(EdgeView(t, {}))), (std::vector<Pair>{{3, 4}, {1, 2}}));
}

TEST(VerticalCandidates, PathsEndAtBranchingNodes) {
  // r has two children, so each child hangs a separate maximal path.
  // edges: 1=(r,a) 2=(a,b) 3=(b,c) 4=(r,d) 5=(d,e)
  const auto t = parse_tree("r(a(b(c)),d(e))");
  EXPECT_EQ(pairs_of(vertical_candidates(EdgeView(t, {}))), (std::vector<Pair>{{2, 3}, {4, 5}}));
}

TEST(MergeClusters, HorizontalLeaves) {
  AuxTree aux(parse_tree("v(c1,c2)"));
  const ClusterId c = merge_clusters(aux.tree(), 0, 1, MergeRelation::kHorizontal);
  const auto& node = aux.tree().node(c);
  EXPECT_EQ(node.merged().kind, MergeKind::kHorizontalNoBottom);
  EXPECT_EQ(node.size, 2u);
  EXPECT_EQ(aux.tree().meta()[c].top, 0u);
  EXPECT_FALSE(aux.tree().meta()[c].has_bottom());
}

TEST(MergeClusters, VerticalLeaves) {
  AuxTree aux(parse_tree("a(b(c))"));
  const ClusterId c = merge_clusters(aux.tree(), 0, 1, MergeRelation::kVertical);
  EXPECT_EQ(aux.tree().node(c).merged().kind, MergeKind::kVerticalNoBottom);
  EXPECT_EQ(aux.tree().node(c).size, 2u);
  EXPECT_EQ(aux.tree().meta()[c].top, 0u);
  EXPECT_FALSE(aux.tree().meta()[c].has_bottom());
}

TEST(MergeClusters, KindsFollowBottomBoundaries) {
  // 0=(r,a) 1=(r,b) 2=(a,x)
  AuxTree aux(parse_tree("r(a(x),b)"));
  const ClusterId h = merge_clusters(aux.tree(), 0, 1, MergeRelation::kHorizontal);
  EXPECT_EQ(aux.tree().node(h).merged().kind, MergeKind::kHorizontalLeftBottom);
  EXPECT_EQ(aux.tree().meta()[h].bottom, 1u);

  // 0=(r,b) 1=(r,a) 2=(a,x)
  AuxTree aux2(parse_tree("r(b,a(x))"));
  const ClusterId h2 = merge_clusters(aux2.tree(), 0, 1, MergeRelation::kHorizontal);
  EXPECT_EQ(aux2.tree().node(h2).merged().kind, MergeKind::kHorizontalRightBottom);

  // 0=(a,b) 1=(b,c) 2=(c,d): lower keeps a bottom boundary.
  AuxTree aux3(parse_tree("a(b(c(d)))"));
  const ClusterId v = merge_clusters(aux3.tree(), 0, 1, MergeRelation::kVertical);
  EXPECT_EQ(aux3.tree().node(v).merged().kind, MergeKind::kVerticalKeepBottom);
  EXPECT_EQ(aux3.tree().meta()[v].bottom, 2u);
}

TEST(MergeClusters, RejectsNonClusters) {
  AuxTree aux(parse_tree("v(a(x),b(y))"));
  EXPECT_THROW(merge_clusters(aux.tree(), 0, 1, MergeRelation::kHorizontal), InvalidMerge);

  AuxTree aux2(parse_tree("r(a(b),c(d))"));  // 0=(r,a) 1=(r,c) 2=(a,b) 3=(c,d)
  EXPECT_THROW(merge_clusters(aux2.tree(), 0, 3, MergeRelation::kVertical), InvalidMerge);
  EXPECT_THROW(merge_clusters(aux2.tree(), 2, 3, MergeRelation::kHorizontal), InvalidMerge);
}

TEST(BuildTopTree, SingleEdge) {
  const auto r = build_top_tree(parse_tree("a(b)"));
  EXPECT_TRUE(r.trace.empty());
  ASSERT_EQ(r.tree.node_count(), 1u);
  EXPECT_EQ(r.tree.parent_label(0), "a");
  EXPECT_EQ(r.tree.child_label(0), "b");
}

TEST(BuildTopTree, FourNodePath) {
  const auto r = build_top_tree(parse_tree("a(b(c(d)))"));
  const TopTree& tt = r.tree;
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].applied, 1u);
  EXPECT_EQ(r.trace[1].applied, 1u);
  EXPECT_EQ(tt.height(), 2u);
  const auto& root = tt.node(tt.root()).merged();
  EXPECT_TRUE(tt.node(root.left).is_leaf());
  EXPECT_EQ(tt.parent_label(root.left), "a");
  const auto& lower = tt.node(root.right).merged();
  EXPECT_EQ(tt.parent_label(lower.left), "b");
  EXPECT_EQ(tt.child_label(lower.left), "c");
  EXPECT_EQ(tt.parent_label(lower.right), "c");
  EXPECT_EQ(tt.child_label(lower.right), "d");
  EXPECT_EQ(tt.meta()[root.right].iteration, 1u);
  EXPECT_EQ(tt.meta()[tt.root()].iteration, 2u);
}

TEST(BuildTopTree, PathOfEightTakesThreeIterations) {
  const auto r = build_top_tree(gen_path(kth_word(0, 8, 2)));
  ASSERT_EQ(r.trace.size(), 3u);
  EXPECT_EQ(r.trace.back().clusters_after, 1u);
}

TEST(BuildTopTree, Errors) {
  EXPECT_THROW(build_top_tree(parse_tree("a")), BuildError);
  BuildConfig cfg;
  cfg.max_iterations = 1;
  EXPECT_THROW(build_top_tree(gen_path(kth_word(0, 8, 2)), cfg), BuildError);
  cfg.alpha = Alpha{3, 3};
  EXPECT_THROW(build_top_tree(parse_tree("a(b)"), cfg), std::invalid_argument);
}

TEST(ApplyIteration, SizeCapAdmitsUnitClusters) {
  AuxTree aux(parse_tree("r(a,b)"));
  const auto tr = apply_iteration(aux, 1, {Algorithm::kModified, {10, 9}, {}});
  EXPECT_EQ(tr.candidates, 1u);
  EXPECT_EQ(tr.applied, 1u);
  EXPECT_EQ(tr.clusters_after, 1u);
}

TEST(ApplyIteration, SizeCapRejectsOversizedOperand) {
  AuxTree aux(parse_tree("r(a,b,c)"));
  aux.apply({{MergeRelation::kHorizontal, 0, 1}}, 1);  // r now has clusters of sizes 2 and 1
  const auto tr = apply_iteration(aux, 2, {Algorithm::kModified, {10, 9}, {}});
  EXPECT_EQ(tr.cap, 1u);  // floor((10/9)^2)
  EXPECT_EQ(tr.m, 2u);
  EXPECT_EQ(tr.p, 1u);
  EXPECT_EQ(tr.q, 1u);
  EXPECT_EQ(tr.candidates, 1u);
  EXPECT_EQ(tr.applied, 0u);
  EXPECT_EQ(tr.clusters_after, 2u);
}

TEST(ApplyIteration, OriginalAppliesEveryCandidate) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    AuxTree aux(gen_random_tree(200, 2, seed));
    for (unsigned t = 1; aux.cluster_count() > 1; ++t) {
      const auto tr = apply_iteration(aux, t, {});
      EXPECT_EQ(tr.applied, tr.candidates);
      EXPECT_EQ(tr.m, tr.p + tr.q);
      EXPECT_EQ(tr.clusters_after, tr.m - tr.applied);
    }
  }
}

TEST(AlphaPowers, ExactComparisons) {
  const Alpha a{10, 9};
  EXPECT_EQ(a.floor_power(1, 1000), 1u);
  EXPECT_EQ(a.floor_power(6, 1000), 1u);  // 1.88
  EXPECT_EQ(a.floor_power(7, 1000), 2u);  // 2.09
  EXPECT_EQ(a.floor_power(500, 1000), 1000u);
  EXPECT_TRUE(a.within_power(1, 1));
  EXPECT_FALSE(a.within_power(2, 6));
  EXPECT_TRUE(a.within_power(2, 7));
  EXPECT_EQ(Alpha::parse("3/2"), (Alpha{3, 2}));
  EXPECT_EQ(Alpha::parse("2"), (Alpha{2, 1}));
  EXPECT_THROW(Alpha::parse("1"), std::invalid_argument);
  EXPECT_THROW(Alpha::parse("9/10"), std::invalid_argument);
  EXPECT_THROW(Alpha::parse("x/2"), std::invalid_argument);
  EXPECT_THROW(Alpha::parse("3/0"), std::invalid_argument);
}

// --- Cluster definition, checked by brute force ------------------------------

struct SourceIndex {
  explicit SourceIndex(const LabeledTree& t) : t(t), below(t.size()) {
    const auto order = t.preorder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      for (NodeId c : t.children(*it)) {
        below[*it].insert(c);
        below[*it].insert(below[c].begin(), below[c].end());
      }
    }
  }
  const LabeledTree& t;
  std::vector<std::set<NodeId>> below;  // edges (by child id) strictly inside T(v)
};

std::set<NodeId> covered_edges(const TopTree& tt, ClusterId c) {
  std::set<NodeId> out;
  std::vector<ClusterId> stack{c};
  while (!stack.empty()) {
    const ClusterId x = stack.back();
    stack.pop_back();
    if (tt.node(x).is_leaf()) {
      out.insert(tt.meta()[x].edge);
    } else {
      stack.push_back(tt.node(x).merged().left);
      stack.push_back(tt.node(x).merged().right);
    }
  }
  return out;
}

// All (v, u) such that edges == T(v, v_s, v_r) (u = kNoNode) or
// T(v, v_s, v_r) \ F(u).
std::vector<std::pair<NodeId, NodeId>> cluster_forms(const SourceIndex& idx, const std::set<NodeId>& edges) {
  std::vector<std::pair<NodeId, NodeId>> out;
  std::set<NodeId> tops;
  for (NodeId e : edges) tops.insert(idx.t.parent(e));
  for (NodeId v : tops) {
    const auto& ch = idx.t.children(v);
    for (std::size_t s = 0; s < ch.size(); ++s) {
      std::set<NodeId> range;
      for (std::size_t r = s; r < ch.size(); ++r) {
        range.insert(ch[r]);
        range.insert(idx.below[ch[r]].begin(), idx.below[ch[r]].end());
        if (range == edges) out.emplace_back(v, kNoNode);
        for (NodeId u : range) {
          if (idx.below[u].empty()) continue;
          std::set<NodeId> cut;
          std::set_difference(range.begin(), range.end(), idx.below[u].begin(), idx.below[u].end(),
                              std::inserter(cut, cut.end()));
          if (cut == edges) out.emplace_back(v, u);
        }
      }
    }
  }
  return out;
}

TEST(BuildTopTreeProperties, EveryNodeIsACluster) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto t = gen_random_tree(2 + seed % 59, 1 + seed % 3, seed);
    const SourceIndex idx(t);
    for (Algorithm algo : {Algorithm::kOriginal, Algorithm::kModified}) {
      const auto r = build_top_tree(t, {algo, {3, 2}, {}});
      const TopTree& tt = r.tree;
      ASSERT_TRUE(tt.has_meta());
      for (ClusterId c = 0; c < tt.node_count(); ++c) {
        const auto forms = cluster_forms(idx, covered_edges(tt, c));
        ASSERT_FALSE(forms.empty()) << "seed " << seed << " cluster " << c;
        const auto& m = tt.meta()[c];
        const auto want = std::make_pair(m.top, m.bottom);
        EXPECT_NE(std::find(forms.begin(), forms.end(), want), forms.end())
            << "boundary metadata disagrees, seed " << seed << " cluster " << c;
      }
    }
  }
}

TEST(BuildTopTreeProperties, LeftOperandComesFirstInPreorder) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto t = gen_random_tree(150, 2, seed);
    std::vector<std::size_t> rank(t.size());
    const auto order = t.preorder();
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    const auto r = build_top_tree(t);
    const TopTree& tt = r.tree;
    std::vector<std::size_t> first(tt.node_count());
    for (ClusterId c = 0; c < tt.node_count(); ++c) {
      const auto& node = tt.node(c);
      if (node.is_leaf()) {
        first[c] = rank[tt.meta()[c].edge];
      } else {
        EXPECT_LT(first[node.merged().left], first[node.merged().right]);
        first[c] = first[node.merged().left];
      }
    }
  }
}

TEST(BuildTopTreeProperties, PartitionShapeAndBounds) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto t = gen_random_tree(2 + seed * 37, 1 + seed % 5, seed);
    for (Algorithm algo : {Algorithm::kOriginal, Algorithm::kModified}) {
      const BuildConfig cfg{algo, {10, 9}, {}};
      bool partitioned = true;
      const auto r = build_top_tree(t, cfg, [&](const AuxTree& aux, const IterationTrace&) {
        partitioned = partitioned && audit::partitions_edges(aux);
      });
      EXPECT_TRUE(partitioned);
      EXPECT_NO_THROW(r.tree.validate());
      EXPECT_EQ(r.tree.leaf_count(), t.size() - 1);
      EXPECT_EQ(r.tree.node_count() - r.tree.leaf_count(), t.size() - 2);
      EXPECT_LE(r.tree.height(), r.trace.size());
      if (algo == Algorithm::kOriginal) {
        EXPECT_LE(r.trace.size(), audit::original_iteration_bound(t.size()));
      } else {
        EXPECT_LE(r.trace.size(), audit::modified_iteration_bound(t.size()));
        EXPECT_TRUE(audit::shrinkage_violations(r.trace).empty());
        EXPECT_TRUE(audit::cluster_bound_violations(r.trace, t.size(), cfg.alpha).empty());
        EXPECT_TRUE(audit::size_cap_violations(r.trace, cfg.alpha).empty());
        EXPECT_TRUE(audit::size_cap_violations(r.tree, cfg.alpha).empty());
      }
      for (const auto& tr : r.trace) {
        EXPECT_EQ(tr.m, tr.p + tr.q);
        EXPECT_EQ(tr.clusters_after, tr.m - tr.applied);
      }
    }
  }
}

TEST(BuildTopTreeProperties, Deterministic) {
  const auto t = gen_random_tree(3000, 3, 77);
  for (Algorithm algo : {Algorithm::kOriginal, Algorithm::kModified}) {
    const auto a = build_top_tree(t, {algo, {10, 9}, {}});
    const auto b = build_top_tree(t, {algo, {10, 9}, {}});
    EXPECT_TRUE(top_trees_equal(a.tree, b.tree));
    ASSERT_EQ(a.trace.size(), b.trace.size());
  }
}

TEST(Audit, ShrinkageExampleAtBoundary) {
  IterationTrace tr;
  tr.m = 16;
  tr.q = 2;
  tr.clusters_after = 16;
  EXPECT_TRUE(audit::shrinkage_holds(tr));
  tr.clusters_after = 17;
  EXPECT_FALSE(audit::shrinkage_holds(tr));
}

TEST(Audit, ClusterBoundIsExact) {
  // 113 * 100 / (10/9)^2 = 9153
  EXPECT_TRUE(audit::cluster_bound_holds(9153, 100, 1, {10, 9}));
  EXPECT_FALSE(audit::cluster_bound_holds(9154, 100, 1, {10, 9}));
}

}  // namespace
}  // namespace toptree
