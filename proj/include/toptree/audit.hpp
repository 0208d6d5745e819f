#pragma once

// Executable forms of the construction's structural invariants and of the
// per-iteration bounds for the size-capped builder.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "toptree/alpha.hpp"
#include "toptree/builder.hpp"
#include "toptree/top_tree.hpp"

namespace toptree::audit {

struct Violation {
  unsigned t = 0;
  std::string detail;
};

/// clusters_after <= ceil(7m/8) + q
inline bool shrinkage_holds(const IterationTrace& tr) {
  return tr.clusters_after <= (7 * tr.m + 7) / 8 + tr.q;
}

/// count <= c * n / alpha^(t+1), exactly.
inline bool cluster_bound_holds(std::size_t count, std::size_t n, unsigned t, const Alpha& alpha,
                                std::uint64_t c = 113) {
  return BigInt(count) * pow(BigInt(alpha.num), t + 1) <=
         BigInt(c) * BigInt(n) * pow(BigInt(alpha.den), t + 1);
}

inline std::vector<Violation> shrinkage_violations(const std::vector<IterationTrace>& trace) {
  std::vector<Violation> out;
  for (const auto& tr : trace) {
    if (!shrinkage_holds(tr)) {
      out.push_back({tr.t, "clusters_after=" + std::to_string(tr.clusters_after) + " > ceil(7/8*" +
                               std::to_string(tr.m) + ")+" + std::to_string(tr.q)});
    }
  }
  return out;
}

inline std::vector<Violation> cluster_bound_violations(const std::vector<IterationTrace>& trace,
                                                       std::size_t n, const Alpha& alpha) {
  std::vector<Violation> out;
  for (const auto& tr : trace) {
    if (!cluster_bound_holds(tr.clusters_after, n, tr.t, alpha)) {
      out.push_back({tr.t, "clusters_after=" + std::to_string(tr.clusters_after) +
                               " > 113*n/alpha^(t+1) with n=" + std::to_string(n)});
    }
  }
  return out;
}

/// Every applied merge at iteration t has both operand sizes <= alpha^t,
/// read from the trace and compared exactly.
inline std::vector<Violation> size_cap_violations(const std::vector<IterationTrace>& trace,
                                                  const Alpha& alpha) {
  std::vector<Violation> out;
  for (const auto& tr : trace) {
    for (const auto& [a, b] : tr.applied_sizes) {
      if (!alpha.within_power(a, tr.t) || !alpha.within_power(b, tr.t)) {
        out.push_back({tr.t, "merged operands of sizes " + std::to_string(a) + " and " +
                                 std::to_string(b) + " above alpha^" + std::to_string(tr.t)});
      }
    }
  }
  return out;
}

/// Same property read from the top tree's per-cluster iteration stamps.
inline std::vector<Violation> size_cap_violations(const TopTree& tt, const Alpha& alpha) {
  std::vector<Violation> out;
  if (!tt.has_meta()) return out;
  for (ClusterId c = 0; c < tt.node_count(); ++c) {
    const auto& node = tt.node(c);
    if (node.is_leaf()) continue;
    const unsigned t = tt.meta()[c].iteration;
    const auto& m = node.merged();
    if (!alpha.within_power(tt.node(m.left).size, t) || !alpha.within_power(tt.node(m.right).size, t)) {
      out.push_back({t, "cluster " + std::to_string(c) + " merged oversized operands"});
    }
  }
  return out;
}

/// The current clusters of `aux` cover every source edge exactly once.
inline bool partitions_edges(const AuxTree& aux) {
  const TopTree& tt = aux.tree();
  if (!tt.has_meta()) return false;
  std::vector<unsigned> owners(aux.source_edge_count() + 1, 0);
  std::vector<ClusterId> stack;
  for (ClusterId c : aux.clusters()) {
    stack.push_back(c);
    while (!stack.empty()) {
      const ClusterId x = stack.back();
      stack.pop_back();
      const auto& node = tt.node(x);
      if (node.is_leaf()) {
        const NodeId e = tt.meta()[x].edge;
        if (e == kNoNode || e == 0 || e > aux.source_edge_count()) return false;
        ++owners[e];
      } else {
        stack.push_back(node.merged().left);
        stack.push_back(node.merged().right);
      }
    }
  }
  for (std::size_t e = 1; e < owners.size(); ++e) {
    if (owners[e] != 1) return false;
  }
  return true;
}

inline unsigned ceil_log(double base, std::size_t n) {
  if (n < 2) return 0;
  return static_cast<unsigned>(std::ceil(std::log(static_cast<double>(n)) / std::log(base) - 1e-12));
}

/// ceil(log_{8/7} n) + 3
inline unsigned original_iteration_bound(std::size_t n) { return ceil_log(8.0 / 7.0, n) + 3; }

/// ceil(log_{10/9} n) + ceil(log_{8/7} n) + 3
inline unsigned modified_iteration_bound(std::size_t n) {
  return ceil_log(10.0 / 9.0, n) + ceil_log(8.0 / 7.0, n) + 3;
}

}  // namespace toptree::audit
