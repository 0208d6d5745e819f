#pragma once

// Top DAG: the minimal DAG of a top tree, with identical subtrees shared.
// Also decompression of a top tree back into the labeled tree it encodes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "toptree/top_tree.hpp"
#include "toptree/tree.hpp"

namespace toptree {

using DagId = std::uint32_t;

class InconsistentMerge : public std::runtime_error {
 public:
  explicit InconsistentMerge(const std::string& detail)
      : std::runtime_error("inconsistent merge structure: " + detail) {}
};

class ExpandBudgetExceeded : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line + 1) + ")"), line_(line) {}
  /// 0-based line index.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct DagNode {
  std::variant<LeafCluster, MergedCluster> content;
  bool is_leaf() const noexcept { return std::holds_alternative<LeafCluster>(content); }
  const LeafCluster& leaf() const { return std::get<LeafCluster>(content); }
  const MergedCluster& merged() const { return std::get<MergedCluster>(content); }
};

/// Nodes are stored operands-first; the root is the last node.
class TopDag {
 public:
  DagId add_leaf(const std::string& parent_label, const std::string& child_label) {
    nodes_.push_back({LeafCluster{symbols_.intern(parent_label), symbols_.intern(child_label)}});
    return static_cast<DagId>(nodes_.size() - 1);
  }
  DagId add_merge(MergeKind kind, DagId left, DagId right) {
    if (left >= nodes_.size() || right >= nodes_.size()) {
      throw std::invalid_argument("add_merge: operand id not yet defined");
    }
    nodes_.push_back({MergedCluster{kind, left, right}});
    return static_cast<DagId>(nodes_.size() - 1);
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  DagId root() const {
    if (nodes_.empty()) throw std::logic_error("empty top DAG");
    return static_cast<DagId>(nodes_.size() - 1);
  }
  const DagNode& node(DagId id) const { return nodes_.at(id); }
  const SymbolTable& symbols() const noexcept { return symbols_; }
  const std::string& parent_label(DagId id) const { return symbols_.str(node(id).leaf().parent_label); }
  const std::string& child_label(DagId id) const { return symbols_.str(node(id).leaf().child_label); }

  std::size_t internal_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const DagNode& d) { return !d.is_leaf(); }));
  }

  /// True iff every node is reachable from the root.
  bool all_reachable() const {
    if (nodes_.empty()) return false;
    std::vector<bool> seen(nodes_.size(), false);
    seen.back() = true;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      if (!seen[i] || nodes_[i].is_leaf()) continue;
      seen[nodes_[i].merged().left] = true;
      seen[nodes_[i].merged().right] = true;
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }

  /// True iff no two nodes have identical content.
  bool is_minimal() const {
    std::map<std::tuple<int, std::string, std::string, DagId, DagId>, DagId> seen;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& d = nodes_[i];
      auto key = d.is_leaf()
                     ? std::make_tuple(-1, parent_label(static_cast<DagId>(i)), child_label(static_cast<DagId>(i)), DagId{0}, DagId{0})
                     : std::make_tuple(static_cast<int>(d.merged().kind), std::string{}, std::string{},
                                       d.merged().left, d.merged().right);
      if (!seen.emplace(std::move(key), static_cast<DagId>(i)).second) return false;
    }
    return true;
  }

 private:
  std::vector<DagNode> nodes_;
  SymbolTable symbols_;
};

namespace detail {

struct DagKey {
  std::uint32_t tag;  // 0 for leaves, 1 + kind for merges
  std::uint32_t a;
  std::uint32_t b;
  friend bool operator==(const DagKey&, const DagKey&) = default;
};

struct DagKeyHash {
  std::size_t operator()(const DagKey& k) const noexcept {
    std::uint64_t h = k.tag;
    h = h * 0x9E3779B97F4A7C15ULL ^ k.a;
    h = h * 0x9E3779B97F4A7C15ULL ^ k.b;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Post-order (left subtree, right subtree, node) of a top tree.
inline std::vector<ClusterId> postorder(const TopTree& tt) {
  std::vector<ClusterId> order;
  order.reserve(tt.node_count());
  std::vector<std::pair<ClusterId, bool>> stack{{tt.root(), false}};
  while (!stack.empty()) {
    auto [c, expanded] = stack.back();
    stack.pop_back();
    const auto& node = tt.node(c);
    if (expanded || node.is_leaf()) {
      order.push_back(c);
      continue;
    }
    stack.emplace_back(c, true);
    stack.emplace_back(node.merged().right, false);
    stack.emplace_back(node.merged().left, false);
  }
  return order;
}

}  // namespace detail

struct Minimized {
  TopDag dag;
  /// DAG node of every top tree node.
  std::vector<DagId> dag_of;
};

/// Hash-consing in post-order: DAG ids follow first occurrence, so the
/// result is deterministic and its root is the last node.
inline Minimized minimize_with_map(const TopTree& tt) {
  Minimized out;
  out.dag_of.assign(tt.node_count(), 0);
  std::unordered_map<detail::DagKey, DagId, detail::DagKeyHash> index;
  index.reserve(tt.node_count());
  for (ClusterId c : detail::postorder(tt)) {
    const auto& node = tt.node(c);
    detail::DagKey key;
    DagId id;
    if (node.is_leaf()) {
      key = {0, node.leaf().parent_label, node.leaf().child_label};
      auto it = index.find(key);
      id = it != index.end() ? it->second : out.dag.add_leaf(tt.parent_label(c), tt.child_label(c));
    } else {
      const auto& m = node.merged();
      key = {1u + static_cast<std::uint32_t>(m.kind), out.dag_of[m.left], out.dag_of[m.right]};
      auto it = index.find(key);
      id = it != index.end() ? it->second : out.dag.add_merge(m.kind, key.a, key.b);
    }
    index.emplace(key, id);
    out.dag_of[c] = id;
  }
  return out;
}

inline TopDag minimize(const TopTree& tt) { return minimize_with_map(tt).dag; }

inline constexpr std::uint64_t kDefaultExpandBudget = 100'000'000;

/// Number of top tree nodes the DAG unfolds to, saturated at `limit`.
inline std::uint64_t expanded_size(const TopDag& d, std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()) {
  std::vector<std::uint64_t> count(d.size(), 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& node = d.node(static_cast<DagId>(i));
    if (node.is_leaf()) continue;
    const std::uint64_t l = count[node.merged().left];
    const std::uint64_t r = count[node.merged().right];
    count[i] = (l >= limit || r >= limit || l + r + 1 >= limit) ? limit : l + r + 1;
  }
  return d.empty() ? 0 : count.back();
}

/// Unfolds the DAG into a top tree (post-order arena).
inline TopTree expand(const TopDag& d, std::uint64_t budget = kDefaultExpandBudget) {
  if (d.empty()) throw std::invalid_argument("expand: empty top DAG");
  const std::uint64_t total = expanded_size(d, budget + 1);
  if (total > budget) {
    throw ExpandBudgetExceeded("expand: unfolding exceeds the budget of " + std::to_string(budget) +
                               " nodes");
  }
  TopTree tt;
  std::vector<ClusterId> results;  // stack of finished subtrees
  std::vector<std::pair<DagId, bool>> stack{{d.root(), false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    const auto& node = d.node(id);
    if (node.is_leaf()) {
      results.push_back(tt.add_leaf(d.parent_label(id), d.child_label(id)));
      continue;
    }
    if (!expanded) {
      stack.emplace_back(id, true);
      stack.emplace_back(node.merged().right, false);
      stack.emplace_back(node.merged().left, false);
      continue;
    }
    const ClusterId right = results.back();
    results.pop_back();
    const ClusterId left = results.back();
    results.pop_back();
    results.push_back(tt.add_merge(node.merged().kind, left, right));
  }
  return tt;
}

/// Rebuilds the labeled tree encoded by a top tree. Clusters are glued at
/// boundary positions implied by the merge kinds; labels at glue points must
/// agree.
inline LabeledTree decompress(const TopTree& tt) {
  if (tt.empty()) throw std::invalid_argument("decompress: empty top tree");
  const auto& nodes = tt.nodes();
  const std::size_t count = nodes.size();
  for (std::size_t i = 0; i < count; ++i) {
    if (!nodes[i].is_leaf() && (nodes[i].merged().left >= i || nodes[i].merged().right >= i)) {
      throw InconsistentMerge("operand defined after its merge");
    }
  }

  // Top-down: does each cluster have a bottom boundary?
  std::vector<std::int8_t> bottom(count, -1);
  bottom.back() = 0;
  for (std::size_t i = count; i-- > 0;) {
    if (bottom[i] < 0) throw InconsistentMerge("cluster is not an operand of any merge");
    if (nodes[i].is_leaf()) continue;
    const auto& m = nodes[i].merged();
    if (result_has_bottom(m.kind) != (bottom[i] == 1)) {
      throw InconsistentMerge(std::string("merge kind ") + std::string(to_token(m.kind)) +
                              " disagrees with its context");
    }
    std::int8_t left = 0, right = 0;
    switch (m.kind) {
      case MergeKind::kVerticalKeepBottom: left = 1; right = 1; break;
      case MergeKind::kVerticalNoBottom: left = 1; right = 0; break;
      case MergeKind::kHorizontalLeftBottom: left = 1; right = 0; break;
      case MergeKind::kHorizontalRightBottom: left = 0; right = 1; break;
      case MergeKind::kHorizontalNoBottom: break;
    }
    if (bottom[m.left] >= 0 || bottom[m.right] >= 0) {
      throw InconsistentMerge("cluster used as operand more than once");
    }
    bottom[m.left] = left;
    bottom[m.right] = right;
  }

  // Bottom-up gluing into a scratch forest.
  struct Scratch {
    SymbolId label;
    std::vector<std::uint32_t> kids;
  };
  struct Fragment {
    std::uint32_t top;
    std::uint32_t bottom;
  };
  constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);
  std::vector<Scratch> forest;
  forest.reserve(count + 1);
  std::vector<Fragment> frag(count);
  const auto& sym = tt.symbols();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& c = nodes[i];
    if (c.is_leaf()) {
      const auto top = static_cast<std::uint32_t>(forest.size());
      forest.push_back({c.leaf().parent_label, {top + 1}});
      forest.push_back({c.leaf().child_label, {}});
      frag[i] = {top, bottom[i] == 1 ? top + 1 : kNone};
      continue;
    }
    const auto& m = c.merged();
    const Fragment a = frag[m.left];
    const Fragment b = frag[m.right];
    if (is_vertical(m.kind)) {
      if (a.bottom == kNone) throw InconsistentMerge("upper cluster has no bottom boundary");
      if (forest[a.bottom].label != forest[b.top].label) {
        throw InconsistentMerge("labels disagree at vertical glue point: '" +
                                sym.str(forest[a.bottom].label) + "' vs '" +
                                sym.str(forest[b.top].label) + "'");
      }
      if (!forest[a.bottom].kids.empty()) throw InconsistentMerge("bottom boundary already has children");
      forest[a.bottom].kids = std::move(forest[b.top].kids);
      forest[b.top].kids.clear();
      frag[i] = {a.top, b.bottom};
    } else {
      if (forest[a.top].label != forest[b.top].label) {
        throw InconsistentMerge("labels disagree at horizontal glue point: '" +
                                sym.str(forest[a.top].label) + "' vs '" +
                                sym.str(forest[b.top].label) + "'");
      }
      auto& dst = forest[a.top].kids;
      auto& src = forest[b.top].kids;
      dst.insert(dst.end(), src.begin(), src.end());
      src.clear();
      frag[i] = {a.top, a.bottom != kNone ? a.bottom : b.bottom};
    }
  }

  const Fragment whole = frag.back();
  LabeledTree out{Label(sym.str(forest[whole.top].label))};
  std::vector<std::pair<std::uint32_t, NodeId>> stack{{whole.top, out.root()}};
  while (!stack.empty()) {
    const auto [s, v] = stack.back();
    stack.pop_back();
    std::vector<NodeId> created;
    created.reserve(forest[s].kids.size());
    for (std::uint32_t k : forest[s].kids) created.push_back(out.add_child(v, Label(sym.str(forest[k].label))));
    for (std::size_t j = forest[s].kids.size(); j-- > 0;) stack.emplace_back(forest[s].kids[j], created[j]);
  }
  if (out.edge_count() != tt.n_edges()) throw InconsistentMerge("edge count mismatch after gluing");
  return out;
}

/// Number of distinct subtrees of a top tree, computed independently of
/// minimize(): subtrees are ranked level by level (by height) by sorting
/// their string/child-rank signatures.
inline std::size_t count_distinct_clusters(const TopTree& tt) {
  const auto& nodes = tt.nodes();
  std::vector<std::size_t> height(nodes.size(), 0);
  std::size_t max_height = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_leaf()) {
      const auto& m = nodes[i].merged();
      height[i] = 1 + std::max(height[m.left], height[m.right]);
    }
    max_height = std::max(max_height, height[i]);
  }
  std::vector<std::vector<std::size_t>> levels(max_height + 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) levels[height[i]].push_back(i);

  std::vector<std::size_t> rank(nodes.size(), 0);
  std::size_t distinct = 0;
  using Signature = std::tuple<std::string, std::string, int, std::size_t, std::size_t>;
  for (const auto& level : levels) {
    std::vector<std::pair<Signature, std::size_t>> sigs;
    sigs.reserve(level.size());
    for (std::size_t i : level) {
      const auto c = static_cast<ClusterId>(i);
      if (nodes[i].is_leaf()) {
        sigs.push_back({{tt.parent_label(c), tt.child_label(c), -1, 0, 0}, i});
      } else {
        const auto& m = nodes[i].merged();
        sigs.push_back({{"", "", static_cast<int>(m.kind), rank[m.left], rank[m.right]}, i});
      }
    }
    std::sort(sigs.begin(), sigs.end());
    for (std::size_t j = 0; j < sigs.size(); ++j) {
      if (j == 0 || sigs[j].first != sigs[j - 1].first) ++distinct;
      rank[sigs[j].second] = distinct;
    }
  }
  return distinct;
}

/// Structural equality of the trees two DAGs denote, ignoring node numbering.
inline bool dags_equal(const TopDag& a, const TopDag& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  std::map<std::pair<DagId, DagId>, bool> memo;
  std::vector<std::pair<DagId, DagId>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    if (!memo.emplace(std::make_pair(x, y), true).second) continue;
    const auto& nx = a.node(x);
    const auto& ny = b.node(y);
    if (nx.is_leaf() != ny.is_leaf()) return false;
    if (nx.is_leaf()) {
      if (a.parent_label(x) != b.parent_label(y) || a.child_label(x) != b.child_label(y)) return false;
      continue;
    }
    if (nx.merged().kind != ny.merged().kind) return false;
    stack.emplace_back(nx.merged().left, ny.merged().left);
    stack.emplace_back(nx.merged().right, ny.merged().right);
  }
  return true;
}

/// Node-for-node identity (same ids, same content).
inline bool dags_identical(const TopDag& a, const TopDag& b) {
  if (a.size() != b.size()) return false;
  for (DagId i = 0; i < a.size(); ++i) {
    const auto& x = a.node(i);
    const auto& y = b.node(i);
    if (x.is_leaf() != y.is_leaf()) return false;
    if (x.is_leaf()) {
      if (a.parent_label(i) != b.parent_label(i) || a.child_label(i) != b.child_label(i)) return false;
    } else if (!(x.merged() == y.merged())) {
      return false;
    }
  }
  return true;
}

struct DagStats {
  std::size_t dag_nodes = 0;
  std::size_t dag_edges = 0;
  std::size_t toptree_nodes = 0;
  double ratio_info = 0.0;  // dag_nodes / (n / log_sigma n)
  double ratio_hsr = 0.0;   // dag_nodes / ((n / log_sigma n) * log2 log_sigma n)
};

/// The log log factor is floored at 1 so that small trees get a positive
/// denominator.
inline double hsr_bound(std::size_t n, std::size_t sigma) {
  const double info = info_theoretic_bound(n, sigma);
  if (n < 2) return info;
  const double loglog = std::log2(std::max(log_sigma(static_cast<double>(n), sigma), 1.0));
  return info * std::max(loglog, 1.0);
}

inline DagStats dag_stats(const TopDag& d, const TreeStats& source) {
  DagStats s;
  s.dag_nodes = d.size();
  s.dag_edges = 2 * d.internal_count();
  s.toptree_nodes = static_cast<std::size_t>(expanded_size(d));
  s.ratio_info = static_cast<double>(s.dag_nodes) / info_theoretic_bound(source.n, source.sigma);
  s.ratio_hsr = static_cast<double>(s.dag_nodes) / hsr_bound(source.n, source.sigma);
  return s;
}

// .tdag text format: one node per line, "L parent_label child_label" or
// "I kind left_id right_id" (ids are 0-based line numbers of earlier nodes),
// followed by a final line holding the root id.

inline std::string write_tdag(const TopDag& d) {
  std::string out;
  for (DagId i = 0; i < d.size(); ++i) {
    const auto& node = d.node(i);
    if (node.is_leaf()) {
      out += "L " + d.parent_label(i) + " " + d.child_label(i) + "\n";
    } else {
      const auto& m = node.merged();
      out += "I " + std::string(to_token(m.kind)) + " " + std::to_string(m.left) + " " +
             std::to_string(m.right) + "\n";
    }
  }
  out += std::to_string(d.root()) + "\n";
  return out;
}

inline TopDag read_tdag(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) lines.pop_back();
  if (lines.size() < 2) throw FormatError("tdag: expected at least one node and a root line", lines.size());

  auto parse_id = [](const std::string& tok, std::size_t line) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9) {
      throw FormatError("tdag: bad node id '" + tok + "'", line);
    }
    return static_cast<DagId>(std::stoul(tok));
  };

  TopDag d;
  const std::size_t node_lines = lines.size() - 1;
  for (std::size_t i = 0; i < node_lines; ++i) {
    std::istringstream in(lines[i]);
    std::string tag, x, y, z, extra;
    in >> tag >> x >> y;
    if (tag == "L") {
      if (!is_valid_label(x) || !is_valid_label(y) || (in >> extra)) {
        throw FormatError("tdag: malformed leaf line", i);
      }
      d.add_leaf(x, y);
    } else if (tag == "I") {
      in >> z;
      if (in >> extra) throw FormatError("tdag: trailing tokens", i);
      const auto kind = merge_kind_from_token(x);
      if (!kind) throw FormatError("tdag: unknown merge kind '" + x + "'", i);
      const DagId l = parse_id(y, i);
      const DagId r = parse_id(z, i);
      if (l >= i || r >= i) throw FormatError("tdag: operand id must refer to an earlier line", i);
      d.add_merge(*kind, l, r);
    } else {
      throw FormatError("tdag: unknown line tag '" + tag + "'", i);
    }
  }
  std::istringstream last(lines.back());
  std::string root_tok, extra;
  last >> root_tok;
  if (last >> extra) throw FormatError("tdag: malformed root line", node_lines);
  if (parse_id(root_tok, node_lines) != node_lines - 1) {
    throw FormatError("tdag: root must be the last node", node_lines);
  }
  if (!d.all_reachable()) throw FormatError("tdag: unreachable nodes", node_lines);
  return d;
}

}  // namespace toptree
