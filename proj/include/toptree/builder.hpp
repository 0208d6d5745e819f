#pragma once

// Bottom-up top tree construction by iterated horizontal and vertical
// merges, in two flavors:
//
//   original  every candidate merge of an iteration is applied.
//   modified  candidates are generated exactly as in the original, but a
//             merge in iteration t is applied only if both operands cover at
//             most alpha^t edges.
//
// The evolving auxiliary tree keeps one edge per current cluster. An edge
// (v, w) stands for a cluster with top boundary v; w is its bottom boundary
// iff w still has children in the auxiliary tree.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "toptree/alpha.hpp"
#include "toptree/top_tree.hpp"
#include "toptree/tree.hpp"

namespace toptree {

enum class Algorithm { kOriginal, kModified };

inline std::string_view to_string(Algorithm a) noexcept {
  return a == Algorithm::kOriginal ? "original" : "modified";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "original") return Algorithm::kOriginal;
  if (s == "modified") return Algorithm::kModified;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

struct BuildConfig {
  Algorithm algo = Algorithm::kOriginal;
  Alpha alpha{10, 9};
  /// Defaults to 64 * ceil(log2 n).
  std::optional<unsigned> max_iterations;
};

struct IterationTrace {
  unsigned t = 0;
  std::size_t m = 0;  // clusters at the start of the iteration
  std::size_t p = 0;  // of which size <= alpha^t
  std::size_t q = 0;  // of which size > alpha^t
  std::size_t candidates = 0;
  std::size_t applied = 0;
  std::size_t clusters_after = 0;
  std::uint64_t cap = 0;  // floor(alpha^t), saturated at n
  std::vector<std::pair<std::size_t, std::size_t>> applied_sizes;
};

class BuildError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class InvalidMerge : public std::logic_error {
  using std::logic_error::logic_error;
};

enum class MergeRelation { kHorizontal, kVertical };

/// A merge the original procedure would perform. For horizontal merges
/// `first` is the left sibling cluster; for vertical merges `first` is the
/// upper cluster and `second` the lower one.
struct MergeCandidate {
  MergeRelation relation;
  ClusterId first;
  ClusterId second;
  friend bool operator==(const MergeCandidate&, const MergeCandidate&) = default;
};

/// Glues two clusters of `tree` (which must carry metadata) and returns the
/// new cluster. Throws InvalidMerge if the union is not a cluster.
inline ClusterId merge_clusters(TopTree& tree, ClusterId first, ClusterId second,
                                MergeRelation relation, unsigned iteration = 0) {
  if (!tree.has_meta()) throw InvalidMerge("merge_clusters: top tree lacks boundary metadata");
  const ClusterMeta a = tree.meta().at(first);
  const ClusterMeta b = tree.meta().at(second);
  ClusterMeta out;
  out.iteration = iteration;
  MergeKind kind;
  if (relation == MergeRelation::kHorizontal) {
    if (a.top != b.top) throw InvalidMerge("horizontal merge: clusters do not share a top boundary");
    if (a.has_bottom() && b.has_bottom()) {
      throw InvalidMerge("horizontal merge: both clusters have a bottom boundary");
    }
    out.top = a.top;
    if (a.has_bottom()) {
      kind = MergeKind::kHorizontalLeftBottom;
      out.bottom = a.bottom;
    } else if (b.has_bottom()) {
      kind = MergeKind::kHorizontalRightBottom;
      out.bottom = b.bottom;
    } else {
      kind = MergeKind::kHorizontalNoBottom;
    }
  } else {
    if (!a.has_bottom() || a.bottom != b.top) {
      throw InvalidMerge("vertical merge: upper bottom boundary is not the lower top boundary");
    }
    out.top = a.top;
    out.bottom = b.bottom;
    kind = b.has_bottom() ? MergeKind::kVerticalKeepBottom : MergeKind::kVerticalNoBottom;
  }
  const ClusterId id = tree.add_merge(kind, first, second);
  tree.meta().push_back(out);
  return id;
}

struct AuxEdge {
  NodeId child;
  ClusterId cluster;
  bool fresh = false;  // produced by a horizontal merge in the current iteration
};

/// The auxiliary tree: source-tree nodes that are still boundary nodes (or
/// leaves), with one edge per current cluster.
class AuxTree {
 public:
  explicit AuxTree(const LabeledTree& source)
      : kids_(source.size()), root_(source.root()), edge_count_(source.edge_count()) {
    if (source.size() < 2) throw BuildError("tree has a single node and no edges; no top tree");
    tree_.meta().reserve(2 * source.size());
    for (NodeId v : source.preorder()) {
      for (NodeId c : source.children(v)) {
        const ClusterId id = tree_.add_leaf(source.label(v).str(), source.label(c).str());
        tree_.meta().push_back({v, source.is_leaf(c) ? kNoNode : c, c, 0});
        kids_[v].push_back({c, id});
      }
    }
    refresh();
  }

  NodeId root() const noexcept { return root_; }
  const std::vector<AuxEdge>& children(NodeId v) const { return kids_[v]; }
  bool is_leaf(NodeId v) const { return kids_[v].empty(); }
  /// Nodes of the auxiliary tree in preorder.
  const std::vector<NodeId>& nodes() const noexcept { return order_; }
  std::size_t cluster_count() const noexcept { return order_.size() - 1; }
  std::size_t source_edge_count() const noexcept { return edge_count_; }

  /// Ids of the current clusters, in preorder of their child endpoints.
  std::vector<ClusterId> clusters() const {
    std::vector<ClusterId> out;
    out.reserve(cluster_count());
    for (NodeId v : order_) {
      for (const auto& e : kids_[v]) out.push_back(e.cluster);
    }
    return out;
  }

  const TopTree& tree() const noexcept { return tree_; }
  TopTree& tree() noexcept { return tree_; }
  TopTree release() && { return std::move(tree_); }

  /// Commits `merges` (mutually edge-disjoint, all valid on the current
  /// state). Returns the number applied.
  std::size_t apply(const std::vector<MergeCandidate>& merges, unsigned iteration) {
    // Keyed by the cluster whose slot in its parent's child list changes.
    struct Rewrite {
      bool drop = false;
      AuxEdge edge{};
    };
    std::unordered_map<ClusterId, Rewrite> rewrites;
    rewrites.reserve(2 * merges.size());
    std::vector<NodeId> touched;

    std::unordered_map<ClusterId, std::pair<NodeId, NodeId>> endpoints;  // cluster -> (parent, child)
    endpoints.reserve(cluster_count());
    for (NodeId v : order_) {
      for (const auto& e : kids_[v]) endpoints.emplace(e.cluster, std::make_pair(v, e.child));
    }

    for (const auto& mc : merges) {
      const auto [p1, c1] = endpoints.at(mc.first);
      const NodeId c2 = endpoints.at(mc.second).second;
      const ClusterId merged = merge_clusters(tree_, mc.first, mc.second, mc.relation, iteration);
      if (mc.relation == MergeRelation::kHorizontal) {
        const NodeId keep = !kids_[c1].empty() ? c1 : (!kids_[c2].empty() ? c2 : c1);
        rewrites[mc.first] = {false, {keep, merged}};
        rewrites[mc.second] = {true, {}};
        touched.push_back(p1);
      } else {
        // first is the upper edge (c1 -> p1), second the lower edge (c2 -> c1).
        rewrites[mc.first] = {false, {c2, merged}};
        kids_[c1].clear();
        touched.push_back(p1);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (NodeId v : touched) {
      std::vector<AuxEdge> rebuilt;
      rebuilt.reserve(kids_[v].size());
      for (const auto& e : kids_[v]) {
        auto it = rewrites.find(e.cluster);
        if (it == rewrites.end()) {
          rebuilt.push_back(e);
        } else if (!it->second.drop) {
          rebuilt.push_back(it->second.edge);
        }
      }
      kids_[v] = std::move(rebuilt);
    }
    refresh();
    return merges.size();
  }

 private:
  void refresh() {
    order_.clear();
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      order_.push_back(v);
      const auto& ch = kids_[v];
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(it->child);
    }
  }

  TopTree tree_;
  std::vector<std::vector<AuxEdge>> kids_;
  std::vector<NodeId> order_;
  NodeId root_;
  std::size_t edge_count_;
};

/// Horizontal merge candidates: for every node with k >= 2 children, the
/// pairs (2i-1, 2i) where at least one endpoint is a leaf, plus (k-1, k)
/// when k is odd, v_k is a leaf and v_{k-2}, v_{k-1} are not.
inline std::vector<MergeCandidate> horizontal_candidates(const AuxTree& aux) {
  std::vector<MergeCandidate> out;
  for (NodeId v : aux.nodes()) {
    const auto& ch = aux.children(v);
    const std::size_t k = ch.size();
    if (k < 2) continue;
    auto leaf = [&](std::size_t i) { return aux.is_leaf(ch[i].child); };
    for (std::size_t i = 0; i + 1 < k; i += 2) {
      if (leaf(i) || leaf(i + 1)) {
        out.push_back({MergeRelation::kHorizontal, ch[i].cluster, ch[i + 1].cluster});
      }
    }
    if (k % 2 == 1 && k >= 3 && leaf(k - 1) && !leaf(k - 2) && !leaf(k - 3)) {
      out.push_back({MergeRelation::kHorizontal, ch[k - 2].cluster, ch[k - 1].cluster});
    }
  }
  return out;
}

/// The auxiliary tree as it looks after provisionally applying horizontal
/// merges. Merged pairs are collapsed into one fresh edge; no clusters are
/// created.
class HorizontalOverlay {
 public:
  HorizontalOverlay(const AuxTree& base, const std::vector<MergeCandidate>& horizontal)
      : base_(base) {
    std::unordered_map<ClusterId, bool> role;  // true: left operand, false: right
    role.reserve(2 * horizontal.size());
    for (const auto& mc : horizontal) {
      role[mc.first] = true;
      role[mc.second] = false;
    }
    if (role.empty()) return;
    for (NodeId v : base.nodes()) {
      const auto& ch = base.children(v);
      bool hit = false;
      for (const auto& e : ch) hit = hit || role.count(e.cluster) > 0;
      if (!hit) continue;
      std::vector<AuxEdge> rebuilt;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        auto it = role.find(ch[i].cluster);
        if (it == role.end()) {
          rebuilt.push_back(ch[i]);
        } else if (it->second) {
          const AuxEdge& l = ch[i];
          const AuxEdge& r = ch[i + 1];
          const NodeId keep = !base.is_leaf(l.child) ? l.child : (!base.is_leaf(r.child) ? r.child : l.child);
          rebuilt.push_back({keep, kFreshCluster, true});
        }
      }
      replaced_.emplace(v, std::move(rebuilt));
    }
  }

  static constexpr ClusterId kFreshCluster = static_cast<ClusterId>(-1);

  NodeId root() const noexcept { return base_.root(); }
  const std::vector<NodeId>& nodes() const noexcept { return base_.nodes(); }
  const std::vector<AuxEdge>& children(NodeId v) const {
    auto it = replaced_.find(v);
    return it == replaced_.end() ? base_.children(v) : it->second;
  }

 private:
  const AuxTree& base_;
  std::unordered_map<NodeId, std::vector<AuxEdge>> replaced_;
};

/// Vertical merge candidates on a (possibly overlaid) auxiliary tree. Along
/// every maximal path v_1..v_p (v_1 deepest, v_2..v_{p-1} with one child),
/// edges are paired from the bottom: (e_1,e_2), (e_3,e_4), ... For even p the
/// top edge stays unpaired; for odd p it is paired last. Pairs touching an
/// edge created by this iteration's horizontal merges are skipped.
template <class View>
std::vector<MergeCandidate> vertical_candidates(const View& view) {
  std::vector<MergeCandidate> out;
  std::vector<AuxEdge> path;  // top edge first
  for (NodeId top : view.nodes()) {
    const auto& ch = view.children(top);
    if (top != view.root() && ch.size() < 2) continue;
    for (const auto& first : ch) {
      path.clear();
      path.push_back(first);
      NodeId cur = first.child;
      while (view.children(cur).size() == 1) {
        path.push_back(view.children(cur).front());
        cur = path.back().child;
      }
      // path[L-1] is e_1 (bottom), path[0] is e_{p-1} (top).
      const std::size_t len = path.size();
      for (std::size_t i = 0; i + 1 < len; i += 2) {
        const AuxEdge& lower = path[len - 1 - i];
        const AuxEdge& upper = path[len - 2 - i];
        if (lower.fresh || upper.fresh) continue;
        out.push_back({MergeRelation::kVertical, upper.cluster, lower.cluster});
      }
    }
  }
  return out;
}

/// Runs one iteration on `aux` and returns its trace entry.
inline IterationTrace apply_iteration(AuxTree& aux, unsigned t, const BuildConfig& cfg) {
  const TopTree& tree = aux.tree();
  IterationTrace tr;
  tr.t = t;
  tr.m = aux.cluster_count();
  // No cluster covers more than all source edges, so saturating there is exact.
  tr.cap = cfg.alpha.floor_power(t, static_cast<std::uint64_t>(aux.source_edge_count()));
  for (ClusterId c : aux.clusters()) {
    (tree.node(c).size <= tr.cap ? tr.p : tr.q) += 1;
  }

  const auto horizontal = horizontal_candidates(aux);
  const auto vertical = vertical_candidates(HorizontalOverlay(aux, horizontal));
  tr.candidates = horizontal.size() + vertical.size();

  std::vector<MergeCandidate> chosen;
  chosen.reserve(tr.candidates);
  auto admit = [&](const MergeCandidate& mc) {
    const std::size_t a = tree.node(mc.first).size;
    const std::size_t b = tree.node(mc.second).size;
    if (cfg.algo == Algorithm::kModified && (a > tr.cap || b > tr.cap)) return;
    chosen.push_back(mc);
    tr.applied_sizes.emplace_back(a, b);
  };
  for (const auto& mc : horizontal) admit(mc);
  for (const auto& mc : vertical) admit(mc);

  tr.applied = aux.apply(chosen, t);
  tr.clusters_after = aux.cluster_count();
  return tr;
}

struct BuildResult {
  TopTree tree;
  std::vector<IterationTrace> trace;
};

inline unsigned default_max_iterations(std::size_t n) {
  const auto lg = static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(n, 2)))));
  return 64 * std::max(lg, 1u);
}

using IterationObserver = std::function<void(const AuxTree&, const IterationTrace&)>;

/// Builds the top tree of `t`. The observer, if given, sees the auxiliary
/// tree after every iteration (and once before the first, with t = 0).
inline BuildResult build_top_tree(const LabeledTree& t, const BuildConfig& cfg = {},
                                  const IterationObserver& observer = {}) {
  cfg.alpha.validate();
  AuxTree aux(t);
  const unsigned cap = cfg.max_iterations.value_or(default_max_iterations(t.size()));
  BuildResult result;
  if (observer) {
    IterationTrace start;
    start.m = start.clusters_after = aux.cluster_count();
    observer(aux, start);
  }
  for (unsigned it = 1; aux.cluster_count() > 1; ++it) {
    if (it > cap) {
      throw BuildError("iteration cap of " + std::to_string(cap) + " exceeded with " +
                       std::to_string(aux.cluster_count()) + " clusters left");
    }
    result.trace.push_back(apply_iteration(aux, it, cfg));
    if (observer) observer(aux, result.trace.back());
  }
  result.tree = std::move(aux).release();
  return result;
}

}  // namespace toptree
