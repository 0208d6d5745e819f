#pragma once

// Ordered, labeled, rooted trees and their parenthesis text format.
//
//   Tree  := Label | Label '(' Tree (',' Tree)* ')'
//   Label := [A-Za-z0-9_]+
//
// Whitespace between tokens is ignored on input and never produced on output.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace toptree {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline bool is_label_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_';
}

inline bool is_valid_label(std::string_view s) noexcept {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_label_char);
}

/// A node label: a non-empty token over [A-Za-z0-9_].
class Label {
 public:
  explicit Label(std::string symbol) : symbol_(std::move(symbol)) {
    if (!is_valid_label(symbol_)) {
      throw std::invalid_argument("invalid label '" + symbol_ + "'");
    }
  }

  const std::string& str() const noexcept { return symbol_; }

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;

 private:
  std::string symbol_;
};

/// Ordered rooted tree with a label on every node. Node ids are dense and
/// assigned in insertion order; the root is always node 0.
class LabeledTree {
 public:
  explicit LabeledTree(Label root_label) { nodes_.push_back({std::move(root_label), kNoNode, {}}); }

  NodeId add_child(NodeId parent, Label label) {
    if (parent >= nodes_.size()) throw std::out_of_range("add_child: no such parent");
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({std::move(label), parent, {}});
    nodes_[parent].children.push_back(id);
    return id;
  }

  /// Appends a copy of `sub` as the last child of `parent`; returns the id of
  /// the copied root.
  NodeId graft(NodeId parent, const LabeledTree& sub) {
    const NodeId offset = static_cast<NodeId>(nodes_.size());
    nodes_.reserve(nodes_.size() + sub.size());
    for (NodeId v = 0; v < sub.size(); ++v) {
      const auto& src = sub.nodes_[v];
      Node copy{src.label, src.parent == kNoNode ? parent : src.parent + offset, {}};
      copy.children.reserve(src.children.size());
      for (NodeId c : src.children) copy.children.push_back(c + offset);
      nodes_.push_back(std::move(copy));
    }
    nodes_[parent].children.push_back(offset);
    return offset;
  }

  NodeId root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return nodes_.size() - 1; }

  const Label& label(NodeId v) const { return nodes_.at(v).label; }
  NodeId parent(NodeId v) const { return nodes_.at(v).parent; }
  const std::vector<NodeId>& children(NodeId v) const { return nodes_.at(v).children; }
  bool is_leaf(NodeId v) const { return nodes_.at(v).children.empty(); }

  /// Node ids in preorder (iterative; safe for very deep trees).
  std::vector<NodeId> preorder() const {
    std::vector<NodeId> order;
    order.reserve(nodes_.size());
    std::vector<NodeId> stack{root()};
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      order.push_back(v);
      const auto& ch = nodes_[v].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return order;
  }

 private:
  struct Node {
    Label label;
    NodeId parent;
    std::vector<NodeId> children;
  };
  std::vector<Node> nodes_;
};

namespace detail {

inline void skip_ws(std::string_view text, std::size_t& pos) {
  while (pos < text.size() &&
         (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r')) {
    ++pos;
  }
}

inline Label read_label(std::string_view text, std::size_t& pos) {
  skip_ws(text, pos);
  const std::size_t start = pos;
  while (pos < text.size() && is_label_char(text[pos])) ++pos;
  if (pos == start) {
    if (pos == text.size()) throw ParseError("unexpected end of input, expected label", pos);
    throw ParseError(std::string("unexpected '") + text[pos] + "', expected label", pos);
  }
  return Label(std::string(text.substr(start, pos - start)));
}

}  // namespace detail

inline LabeledTree parse_tree(std::string_view text) {
  std::size_t pos = 0;
  detail::skip_ws(text, pos);
  if (pos == text.size()) throw ParseError("empty input", pos);

  LabeledTree tree(detail::read_label(text, pos));
  // Stack of nodes whose child list is still open.
  std::vector<NodeId> open;
  NodeId last = tree.root();
  for (;;) {
    detail::skip_ws(text, pos);
    if (pos == text.size()) break;
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      open.push_back(last);
      last = tree.add_child(open.back(), detail::read_label(text, pos));
    } else if (c == ',') {
      if (open.empty()) throw ParseError("',' outside of a child list", pos);
      ++pos;
      last = tree.add_child(open.back(), detail::read_label(text, pos));
    } else if (c == ')') {
      if (open.empty()) throw ParseError("unbalanced ')'", pos);
      ++pos;
      last = open.back();
      open.pop_back();
    } else {
      throw ParseError(std::string("unexpected '") + c + "'", pos);
    }
    if (open.empty()) {
      detail::skip_ws(text, pos);
      if (pos != text.size()) throw ParseError("trailing characters after tree", pos);
      break;
    }
  }
  if (!open.empty()) throw ParseError("unbalanced parenthesis, missing ')'", pos);
  return tree;
}

inline std::string serialize_tree(const LabeledTree& t) {
  std::string out;
  // Entries are (node, next child index); closing parens are emitted when a
  // node's child list is exhausted.
  std::vector<std::pair<NodeId, std::size_t>> stack{{t.root(), 0}};
  out += t.label(t.root()).str();
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& ch = t.children(v);
    if (next == ch.size()) {
      if (!ch.empty()) out += ')';
      stack.pop_back();
      continue;
    }
    out += next == 0 ? '(' : ',';
    const NodeId c = ch[next++];
    out += t.label(c).str();
    stack.emplace_back(c, 0);
  }
  return out;
}

/// Ordered, labeled isomorphism.
inline bool trees_equal(const LabeledTree& a, const LabeledTree& b) {
  if (a.size() != b.size()) return false;
  std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    const auto [u, v] = stack.back();
    stack.pop_back();
    if (a.label(u) != b.label(v)) return false;
    const auto& cu = a.children(u);
    const auto& cv = b.children(v);
    if (cu.size() != cv.size()) return false;
    for (std::size_t i = 0; i < cu.size(); ++i) stack.emplace_back(cu[i], cv[i]);
  }
  return true;
}

struct TreeStats {
  std::size_t n = 0;
  std::size_t edges = 0;
  std::size_t sigma = 0;
  std::size_t depth = 0;
  /// n / log_{max(sigma,2)} n; equals n when n = 1.
  double info_bound = 0.0;
};

/// log_{max(sigma,2)} n.
inline double log_sigma(double n, std::size_t sigma) {
  return std::log(n) / std::log(static_cast<double>(std::max<std::size_t>(sigma, 2)));
}

inline double info_theoretic_bound(std::size_t n, std::size_t sigma) {
  if (n < 2) return static_cast<double>(n);
  return static_cast<double>(n) / log_sigma(static_cast<double>(n), sigma);
}

/// `declared_sigma` overrides the count of distinct labels present, for
/// generated trees that use only part of their alphabet.
inline TreeStats tree_stats(const LabeledTree& t,
                            std::optional<std::size_t> declared_sigma = std::nullopt) {
  TreeStats s;
  s.n = t.size();
  s.edges = t.edge_count();

  std::unordered_set<std::string> distinct;
  std::vector<std::size_t> depth(t.size(), 0);
  for (NodeId v : t.preorder()) {
    distinct.insert(t.label(v).str());
    if (v != t.root()) depth[v] = depth[t.parent(v)] + 1;
    s.depth = std::max(s.depth, depth[v]);
  }
  s.sigma = declared_sigma.value_or(distinct.size());
  s.info_bound = info_theoretic_bound(s.n, s.sigma);
  return s;
}

}  // namespace toptree
