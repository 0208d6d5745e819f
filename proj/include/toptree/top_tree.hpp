#pragma once

// Top trees: ordered binary trees whose leaves are the edges of a labeled
// tree and whose internal nodes record how two clusters were merged.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "toptree/tree.hpp"

namespace toptree {

using ClusterId = std::uint32_t;
using SymbolId = std::uint32_t;

/// The five ways two clusters can be glued into a cluster.
enum class MergeKind : std::uint8_t {
  kVerticalKeepBottom,     // upper over lower; lower has a bottom boundary, result keeps it
  kVerticalNoBottom,       // upper over lower; lower has none, result has top only
  kHorizontalLeftBottom,   // siblings; left operand carries the bottom boundary
  kHorizontalRightBottom,  // siblings; right operand carries the bottom boundary
  kHorizontalNoBottom,     // siblings; neither has a bottom boundary
};

inline constexpr MergeKind kAllMergeKinds[] = {
    MergeKind::kVerticalKeepBottom, MergeKind::kVerticalNoBottom,
    MergeKind::kHorizontalLeftBottom, MergeKind::kHorizontalRightBottom,
    MergeKind::kHorizontalNoBottom};

inline bool is_vertical(MergeKind k) noexcept {
  return k == MergeKind::kVerticalKeepBottom || k == MergeKind::kVerticalNoBottom;
}

/// Whether a cluster produced by a merge of this kind has a bottom boundary.
inline bool result_has_bottom(MergeKind k) noexcept {
  return k == MergeKind::kVerticalKeepBottom || k == MergeKind::kHorizontalLeftBottom ||
         k == MergeKind::kHorizontalRightBottom;
}

inline std::string_view to_token(MergeKind k) noexcept {
  switch (k) {
    case MergeKind::kVerticalKeepBottom: return "VB";
    case MergeKind::kVerticalNoBottom: return "VN";
    case MergeKind::kHorizontalLeftBottom: return "HL";
    case MergeKind::kHorizontalRightBottom: return "HR";
    case MergeKind::kHorizontalNoBottom: return "HN";
  }
  return "??";
}

inline std::optional<MergeKind> merge_kind_from_token(std::string_view s) noexcept {
  for (MergeKind k : kAllMergeKinds) {
    if (to_token(k) == s) return k;
  }
  return std::nullopt;
}

/// Interned label strings.
class SymbolTable {
 public:
  SymbolId intern(const std::string& s) {
    auto [it, inserted] = index_.try_emplace(s, static_cast<SymbolId>(symbols_.size()));
    if (inserted) symbols_.push_back(s);
    return it->second;
  }
  const std::string& str(SymbolId id) const { return symbols_.at(id); }
  std::size_t size() const noexcept { return symbols_.size(); }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, SymbolId> index_;
};

struct LeafCluster {
  SymbolId parent_label;
  SymbolId child_label;
  friend bool operator==(const LeafCluster&, const LeafCluster&) = default;
};

struct MergedCluster {
  MergeKind kind;
  ClusterId left;
  ClusterId right;
  friend bool operator==(const MergedCluster&, const MergedCluster&) = default;
};

struct ClusterNode {
  std::variant<LeafCluster, MergedCluster> content;
  /// Number of edges of the source tree covered by the cluster.
  std::size_t size = 1;

  bool is_leaf() const noexcept { return std::holds_alternative<LeafCluster>(content); }
  const LeafCluster& leaf() const { return std::get<LeafCluster>(content); }
  const MergedCluster& merged() const { return std::get<MergedCluster>(content); }
};

/// Construction-time facts about a cluster, in source-tree node ids.
struct ClusterMeta {
  NodeId top = kNoNode;
  NodeId bottom = kNoNode;  // kNoNode when the cluster has no bottom boundary
  NodeId edge = kNoNode;    // leaves only: child endpoint of the covered edge
  unsigned iteration = 0;   // 0 for leaves; otherwise the iteration that merged it

  bool has_bottom() const noexcept { return bottom != kNoNode; }
};

/// Arena-backed top tree. Operands always precede the cluster they form, so
/// the root is the last node and index order is a valid bottom-up order.
class TopTree {
 public:
  ClusterId add_leaf(const std::string& parent_label, const std::string& child_label) {
    nodes_.push_back({LeafCluster{symbols_.intern(parent_label), symbols_.intern(child_label)}, 1});
    return static_cast<ClusterId>(nodes_.size() - 1);
  }

  ClusterId add_merge(MergeKind kind, ClusterId left, ClusterId right) {
    if (left >= nodes_.size() || right >= nodes_.size() || left == right) {
      throw std::invalid_argument("add_merge: bad operand ids");
    }
    const std::size_t size = nodes_[left].size + nodes_[right].size;
    nodes_.push_back({MergedCluster{kind, left, right}, size});
    return static_cast<ClusterId>(nodes_.size() - 1);
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  ClusterId root() const {
    if (nodes_.empty()) throw std::logic_error("empty top tree");
    return static_cast<ClusterId>(nodes_.size() - 1);
  }
  const ClusterNode& node(ClusterId c) const { return nodes_.at(c); }
  const std::vector<ClusterNode>& nodes() const noexcept { return nodes_; }

  const SymbolTable& symbols() const noexcept { return symbols_; }
  const std::string& parent_label(ClusterId c) const { return symbols_.str(node(c).leaf().parent_label); }
  const std::string& child_label(ClusterId c) const { return symbols_.str(node(c).leaf().child_label); }

  std::size_t leaf_count() const {
    std::size_t n = 0;
    for (const auto& c : nodes_) n += c.is_leaf() ? 1 : 0;
    return n;
  }

  /// Source edge count (size of the root cluster).
  std::size_t n_edges() const { return nodes_.empty() ? 0 : nodes_.back().size; }

  /// Height in merge levels: 0 for a single leaf.
  std::size_t height() const {
    std::vector<std::size_t> h(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!nodes_[i].is_leaf()) {
        const auto& m = nodes_[i].merged();
        h[i] = 1 + std::max(h[m.left], h[m.right]);
      }
    }
    return nodes_.empty() ? 0 : h.back();
  }

  /// Optional per-cluster construction metadata (filled by the builder only).
  std::vector<ClusterMeta>& meta() noexcept { return meta_; }
  const std::vector<ClusterMeta>& meta() const noexcept { return meta_; }
  bool has_meta() const noexcept { return !nodes_.empty() && meta_.size() == nodes_.size(); }

  /// Checks arena ordering, size additivity and that every node except the
  /// root is used exactly once as an operand.
  void validate() const {
    if (nodes_.empty()) throw std::logic_error("top tree: empty");
    std::vector<unsigned> uses(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& c = nodes_[i];
      if (c.is_leaf()) {
        if (c.size != 1) throw std::logic_error("top tree: leaf size != 1");
        continue;
      }
      const auto& m = c.merged();
      if (m.left >= i || m.right >= i) throw std::logic_error("top tree: operand after parent");
      if (c.size != nodes_[m.left].size + nodes_[m.right].size) {
        throw std::logic_error("top tree: size not additive");
      }
      ++uses[m.left];
      ++uses[m.right];
    }
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
      if (uses[i] != 1) throw std::logic_error("top tree: node not used exactly once");
    }
    if (uses.back() != 0) throw std::logic_error("top tree: root used as operand");
  }

 private:
  std::vector<ClusterNode> nodes_;
  std::vector<ClusterMeta> meta_;
  SymbolTable symbols_;
};

/// Structural equality of two top trees (labels compared as strings).
inline bool top_trees_equal(const TopTree& a, const TopTree& b) {
  if (a.node_count() != b.node_count()) return false;
  if (a.empty()) return true;
  std::vector<std::pair<ClusterId, ClusterId>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    const auto& cx = a.node(x);
    const auto& cy = b.node(y);
    if (cx.is_leaf() != cy.is_leaf() || cx.size != cy.size) return false;
    if (cx.is_leaf()) {
      if (a.parent_label(x) != b.parent_label(y) || a.child_label(x) != b.child_label(y)) {
        return false;
      }
      continue;
    }
    const auto& mx = cx.merged();
    const auto& my = cy.merged();
    if (mx.kind != my.kind) return false;
    stack.emplace_back(mx.left, my.left);
    stack.emplace_back(mx.right, my.right);
  }
  return true;
}

}  // namespace toptree
