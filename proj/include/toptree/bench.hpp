#pragma once

// Experiment harness behind the command-line tool: compression reports,
// pipeline verification, the original-vs-modified comparison on the
// adversarial family, and the label-counting bound check.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "toptree/audit.hpp"
#include "toptree/builder.hpp"
#include "toptree/generators.hpp"
#include "toptree/top_dag.hpp"
#include "toptree/tree.hpp"

namespace toptree::bench {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Compression report

struct CompressReport {
  std::string input;
  Algorithm algo = Algorithm::kOriginal;
  Alpha alpha;
  TreeStats tree;
  std::vector<IterationTrace> trace;
  DagStats dag;
  double wall_time_ms = 0.0;
};

inline json trace_to_json(const std::vector<IterationTrace>& trace) {
  json arr = json::array();
  for (const auto& tr : trace) {
    arr.push_back({{"t", tr.t},
                   {"m", tr.m},
                   {"p", tr.p},
                   {"q", tr.q},
                   {"applied", tr.applied},
                   {"clusters_after", tr.clusters_after}});
  }
  return arr;
}

inline std::vector<IterationTrace> trace_from_json(const json& arr) {
  std::vector<IterationTrace> out;
  for (const auto& j : arr) {
    IterationTrace tr;
    tr.t = j.at("t").get<unsigned>();
    tr.m = j.at("m").get<std::size_t>();
    tr.p = j.at("p").get<std::size_t>();
    tr.q = j.at("q").get<std::size_t>();
    tr.applied = j.at("applied").get<std::size_t>();
    tr.clusters_after = j.at("clusters_after").get<std::size_t>();
    out.push_back(tr);
  }
  return out;
}

inline json to_json(const CompressReport& r) {
  return {{"input", r.input},
          {"algo", std::string(to_string(r.algo))},
          {"alpha", r.alpha.str()},
          {"tree_stats",
           {{"n", r.tree.n},
            {"edges", r.tree.edges},
            {"sigma", r.tree.sigma},
            {"depth", r.tree.depth},
            {"info_bound", r.tree.info_bound}}},
          {"trace", trace_to_json(r.trace)},
          {"dag_stats",
           {{"dag_nodes", r.dag.dag_nodes},
            {"dag_edges", r.dag.dag_edges},
            {"toptree_nodes", r.dag.toptree_nodes},
            {"ratio_info", r.dag.ratio_info},
            {"ratio_hsr", r.dag.ratio_hsr}}},
          {"wall_time_ms", r.wall_time_ms}};
}

inline CompressReport report_from_json(const json& j) {
  CompressReport r;
  r.input = j.at("input").get<std::string>();
  r.algo = parse_algorithm(j.at("algo").get<std::string>());
  r.alpha = Alpha::parse(j.at("alpha").get<std::string>());
  const auto& ts = j.at("tree_stats");
  r.tree.n = ts.at("n").get<std::size_t>();
  r.tree.edges = ts.at("edges").get<std::size_t>();
  r.tree.sigma = ts.at("sigma").get<std::size_t>();
  r.tree.depth = ts.at("depth").get<std::size_t>();
  r.tree.info_bound = ts.at("info_bound").get<double>();
  r.trace = trace_from_json(j.at("trace"));
  const auto& ds = j.at("dag_stats");
  r.dag.dag_nodes = ds.at("dag_nodes").get<std::size_t>();
  r.dag.dag_edges = ds.at("dag_edges").get<std::size_t>();
  r.dag.toptree_nodes = ds.at("toptree_nodes").get<std::size_t>();
  r.dag.ratio_info = ds.at("ratio_info").get<double>();
  r.dag.ratio_hsr = ds.at("ratio_hsr").get<double>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  return r;
}

struct Compressed {
  TopDag dag;
  CompressReport report;
};

inline Compressed compress(const LabeledTree& t, const BuildConfig& cfg, std::string input_name = {},
                           std::optional<std::size_t> declared_sigma = std::nullopt) {
  const auto start = std::chrono::steady_clock::now();
  auto built = build_top_tree(t, cfg);
  TopDag dag = minimize(built.tree);
  const auto stop = std::chrono::steady_clock::now();

  CompressReport r;
  r.input = std::move(input_name);
  r.algo = cfg.algo;
  r.alpha = cfg.alpha;
  r.tree = tree_stats(t, declared_sigma);
  r.trace = std::move(built.trace);
  r.dag = dag_stats(dag, r.tree);
  r.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return {std::move(dag), std::move(r)};
}

// ---------------------------------------------------------------------------
// Verification

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

inline void add_violations(VerifyReport& rep, const std::string& name,
                           const std::vector<audit::Violation>& v, std::size_t iterations) {
  std::string detail = std::to_string(iterations) + " iterations checked";
  if (!v.empty()) detail = "t=" + std::to_string(v.front().t) + ": " + v.front().detail;
  rep.checks.push_back({name, v.empty(), detail});
}

/// build -> minimize -> expand -> decompress, with every invariant audited.
/// If `external` is given, that DAG is also expanded and decompressed and
/// must reproduce `t`.
inline VerifyReport verify(const LabeledTree& t, const BuildConfig& cfg,
                           const std::optional<TopDag>& external = std::nullopt) {
  VerifyReport rep;
  const std::size_t n = t.size();

  bool partition_ok = true;
  unsigned partition_bad_at = 0;
  BuildResult built;
  try {
    built = build_top_tree(t, cfg, [&](const AuxTree& aux, const IterationTrace& tr) {
      if (partition_ok && !audit::partitions_edges(aux)) {
        partition_ok = false;
        partition_bad_at = tr.t;
      }
    });
  } catch (const std::exception& e) {
    rep.checks.push_back({"build", false, e.what()});
    return rep;
  }
  const std::size_t iterations = built.trace.size();
  rep.checks.push_back({"build", true, std::to_string(iterations) + " iterations"});

  const TopTree& tt = built.tree;
  {
    Check c{"top tree shape", true, ""};
    try {
      tt.validate();
    } catch (const std::exception& e) {
      c = {c.name, false, e.what()};
    }
    if (c.passed && (tt.leaf_count() != n - 1 || tt.node_count() != 2 * (n - 1) - 1)) {
      c = {c.name, false, "leaf/internal counts differ from n-1/n-2"};
    }
    if (c.passed) c.detail = std::to_string(tt.leaf_count()) + " leaves";
    rep.checks.push_back(c);
  }
  rep.checks.push_back({"edge partition", partition_ok,
                        partition_ok ? "every iteration"
                                     : "broken after iteration " + std::to_string(partition_bad_at)});
  rep.checks.push_back({"height <= iterations", tt.height() <= iterations,
                        "height " + std::to_string(tt.height())});
  {
    const unsigned bound = cfg.algo == Algorithm::kOriginal ? audit::original_iteration_bound(n)
                                                            : audit::modified_iteration_bound(n);
    const bool applies = cfg.algo == Algorithm::kOriginal || cfg.alpha.num * 9 >= cfg.alpha.den * 10;
    rep.checks.push_back({"iteration bound", !applies || iterations <= bound,
                          applies ? std::to_string(iterations) + " <= " + std::to_string(bound)
                                  : "not applicable for alpha < 10/9"});
  }

  const TopDag dag = minimize(tt);
  rep.checks.push_back({"dag minimal", dag.is_minimal() && dag.all_reachable(),
                        std::to_string(dag.size()) + " nodes"});
  const std::size_t oracle = count_distinct_clusters(tt);
  rep.checks.push_back({"distinct-cluster oracle", oracle == dag.size(),
                        std::to_string(oracle) + " vs " + std::to_string(dag.size())});

  try {
    const TopTree unfolded = expand(dag);
    rep.checks.push_back({"expand(minimize) = top tree", top_trees_equal(unfolded, tt), ""});
    rep.checks.push_back({"minimize(expand) = dag", dags_identical(minimize(unfolded), dag), ""});
    rep.checks.push_back({"decompress = input", trees_equal(decompress(unfolded), t), ""});
  } catch (const std::exception& e) {
    rep.checks.push_back({"decompress = input", false, e.what()});
  }
  try {
    rep.checks.push_back({"tdag text roundtrip", dags_identical(read_tdag(write_tdag(dag)), dag), ""});
  } catch (const std::exception& e) {
    rep.checks.push_back({"tdag text roundtrip", false, e.what()});
  }

  if (cfg.algo == Algorithm::kModified) {
    add_violations(rep, "shrinkage 7/8m+q", audit::shrinkage_violations(built.trace), iterations);
    auto cap = audit::size_cap_violations(built.trace, cfg.alpha);
    const auto from_tree = audit::size_cap_violations(tt, cfg.alpha);
    cap.insert(cap.end(), from_tree.begin(), from_tree.end());
    add_violations(rep, "size cap alpha^t", cap, iterations);
    if (cfg.alpha == Alpha{10, 9}) {
      add_violations(rep, "cluster bound 113n/alpha^(t+1)",
                     audit::cluster_bound_violations(built.trace, n, cfg.alpha), iterations);
    }
  }

  if (external) {
    try {
      const bool same = trees_equal(decompress(expand(*external)), t);
      rep.checks.push_back({"external tdag decompress = input", same, same ? "" : "trees differ"});
    } catch (const std::exception& e) {
      rep.checks.push_back({"external tdag decompress = input", false, e.what()});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Path-derived clusters in the adversarial family

/// For a tree produced by gen_family_tree: the gadget index of every path
/// edge (the edge into the path head and the edges along the path), or -1.
/// Indexed by the edge's child node id.
inline std::vector<int> family_path_edges(const LabeledTree& t) {
  std::vector<int> gadget_of(t.size(), -1);
  const auto& gadgets = t.children(t.root());
  for (std::size_t g = 0; g < gadgets.size(); ++g) {
    const auto& parts = t.children(gadgets[g]);
    if (parts.empty()) continue;
    NodeId v = parts.back();
    gadget_of[v] = static_cast<int>(g);
    while (!t.children(v).empty()) {
      v = t.children(v).front();
      gadget_of[v] = static_cast<int>(g);
    }
  }
  return gadget_of;
}

struct PathClusterCount {
  std::size_t distinct_total = 0;              // distinct DAG nodes covering any path edge
  std::vector<std::size_t> per_gadget;         // distinct DAG nodes within one gadget's path
};

inline PathClusterCount count_path_clusters(const LabeledTree& t, const TopTree& tt,
                                            const Minimized& mini) {
  const auto gadget_of = family_path_edges(t);
  constexpr int kNone = -1, kMixed = -2;
  std::vector<int> tag(tt.node_count(), kNone);
  for (ClusterId c = 0; c < tt.node_count(); ++c) {
    const auto& node = tt.node(c);
    if (node.is_leaf()) {
      tag[c] = gadget_of.at(tt.meta().at(c).edge);
      continue;
    }
    const int l = tag[node.merged().left];
    const int r = tag[node.merged().right];
    tag[c] = l == kNone ? r : (r == kNone || r == l ? l : kMixed);
  }
  PathClusterCount out;
  out.per_gadget.assign(t.children(t.root()).size(), 0);
  std::set<DagId> all;
  std::vector<std::set<DagId>> each(out.per_gadget.size());
  for (ClusterId c = 0; c < tt.node_count(); ++c) {
    if (tag[c] == kNone) continue;
    all.insert(mini.dag_of[c]);
    if (tag[c] >= 0) each[static_cast<std::size_t>(tag[c])].insert(mini.dag_of[c]);
  }
  out.distinct_total = all.size();
  for (std::size_t g = 0; g < each.size(); ++g) out.per_gadget[g] = each[g].size();
  return out;
}

// ---------------------------------------------------------------------------
// Original vs modified on T_k

struct ComparisonRow {
  unsigned k = 0;
  std::size_t sigma = 0;
  std::size_t m = 0;
  std::size_t N = 0;
  std::size_t dag_original = 0;
  std::size_t dag_modified = 0;
  double ratio = 0.0;
  double hsr_ratio_original = 0.0;
  double info_ratio_modified = 0.0;
};

inline constexpr const char* kComparisonHeader =
    "k,sigma,m,N,dag_original,dag_modified,ratio,hsr_ratio_original,info_ratio_modified";

struct ComparisonPoint {
  ComparisonRow row;
  PathClusterCount path_clusters;  // original algorithm
};

inline ComparisonPoint compare_point(unsigned k, std::size_t sigma, std::size_t m, const Alpha& alpha) {
  const LabeledTree t = gen_family_tree({k, sigma, m, 0});
  BuildConfig original;
  BuildConfig modified{Algorithm::kModified, alpha, std::nullopt};

  const auto built_o = build_top_tree(t, original);
  const Minimized mini_o = minimize_with_map(built_o.tree);
  const TopDag dag_m = minimize(build_top_tree(t, modified).tree);

  const TreeStats stats = tree_stats(t, sigma);
  ComparisonPoint p;
  p.row.k = k;
  p.row.sigma = sigma;
  p.row.m = m;
  p.row.N = t.size();
  p.row.dag_original = mini_o.dag.size();
  p.row.dag_modified = dag_m.size();
  p.row.ratio = static_cast<double>(p.row.dag_original) / static_cast<double>(p.row.dag_modified);
  p.row.hsr_ratio_original = dag_stats(mini_o.dag, stats).ratio_hsr;
  p.row.info_ratio_modified = dag_stats(dag_m, stats).ratio_info;
  p.path_clusters = count_path_clusters(t, built_o.tree, mini_o);
  return p;
}

/// One point per k, computed concurrently; results keep the order of `ks`.
inline std::vector<ComparisonPoint> compare(const std::vector<unsigned>& ks, std::size_t sigma,
                                            std::size_t m, const Alpha& alpha = {}) {
  if (ks.empty()) throw std::invalid_argument("compare: empty k range");
  for (unsigned k : ks) {
    if (k < 1) throw std::invalid_argument("compare: k must be >= 1");
    if (!fits_in_words(m - 1, path_length(k), sigma) || m < 1 || sigma < 2) {
      throw std::invalid_argument("compare: invalid (k, sigma, m)");
    }
  }
  std::vector<std::future<ComparisonPoint>> jobs;
  jobs.reserve(ks.size());
  for (unsigned k : ks) {
    jobs.push_back(std::async(std::launch::async, compare_point, k, sigma, m, alpha));
  }
  std::vector<ComparisonPoint> out;
  out.reserve(ks.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline std::string to_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = std::string(kComparisonHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + std::to_string(r.sigma) + "," + std::to_string(r.m) + "," +
           std::to_string(r.N) + "," + std::to_string(r.dag_original) + "," +
           std::to_string(r.dag_modified) + "," + format_double(r.ratio) + "," +
           format_double(r.hsr_ratio_original) + "," + format_double(r.info_ratio_modified) + "\n";
  }
  return out;
}

inline std::vector<ComparisonRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kComparisonHeader) {
    throw std::invalid_argument("comparison csv: unexpected header");
  }
  std::vector<ComparisonRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw std::invalid_argument("comparison csv: expected 9 fields");
    ComparisonRow r;
    r.k = static_cast<unsigned>(std::stoul(f[0]));
    r.sigma = std::stoul(f[1]);
    r.m = std::stoul(f[2]);
    r.N = std::stoul(f[3]);
    r.dag_original = std::stoul(f[4]);
    r.dag_modified = std::stoul(f[5]);
    r.ratio = std::stod(f[6]);
    r.hsr_ratio_original = std::stod(f[7]);
    r.info_ratio_modified = std::stod(f[8]);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Counting bound: labeled binary trees of size <= x over sigma^2 + 5 labels

struct BoundLevel {
  std::size_t size = 0;
  std::uint64_t count = 0;       // distinct labeled binary trees of exactly this size
  std::uint64_t well_formed = 0; // of which are valid top tree shapes
};

struct BoundCheck {
  std::size_t x = 0;
  std::size_t sigma = 0;
  std::vector<BoundLevel> levels;
  std::uint64_t total = 0;
  BigInt catalan_sum;  // sum_i (4(sigma^2+5))^i
  BigInt relaxed_sum;  // sum_i (24 sigma^2)^i
  BigInt bound;        // (24 sigma^2)^(x+1)
  bool passed() const { return BigInt(total) <= catalan_sum && catalan_sum <= relaxed_sum && relaxed_sum <= bound; }
};

namespace detail {

/// Every ordered binary tree (each child slot optional) with `size` nodes,
/// written as "(" left label right ")" with "." for an empty slot and "#" as
/// a label placeholder.
inline std::vector<std::string> binary_shapes(std::size_t size) {
  std::vector<std::vector<std::string>> by_size(size + 1);
  by_size[0] = {"."};
  for (std::size_t s = 1; s <= size; ++s) {
    for (std::size_t l = 0; l < s; ++l) {
      for (const auto& left : by_size[l]) {
        for (const auto& right : by_size[s - 1 - l]) by_size[s].push_back("(" + left + "#" + right + ")");
      }
    }
  }
  return by_size[size];
}

}  // namespace detail

inline BoundCheck bound_check(std::size_t x, std::size_t sigma) {
  if (x < 1 || x > 3) throw std::invalid_argument("bound-check: x must be in [1, 3]");
  if (sigma < 1 || sigma > 4) throw std::invalid_argument("bound-check: sigma must be in [1, 4]");

  // Labels: sigma^2 edge-label pairs followed by the five merge kinds.
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < sigma; ++a) {
    for (std::size_t b = 0; b < sigma; ++b) labels.push_back("L" + std::to_string(a) + "_" + std::to_string(b));
  }
  const std::size_t pair_labels = labels.size();
  for (MergeKind k : kAllMergeKinds) labels.push_back(std::string(to_token(k)));

  BoundCheck out;
  out.x = x;
  out.sigma = sigma;
  for (std::size_t size = 1; size <= x; ++size) {
    std::set<std::string> distinct;
    std::uint64_t well_formed = 0;
    for (const auto& shape : detail::binary_shapes(size)) {
      std::vector<std::size_t> slots;
      for (std::size_t i = 0; i < shape.size(); ++i) {
        if (shape[i] == '#') slots.push_back(i);
      }
      // A node is internal iff both slots are filled; valid top trees have
      // no node with exactly one child.
      std::vector<int> arity(slots.size(), 0);
      bool full = true;
      for (std::size_t j = 0; j < slots.size(); ++j) {
        const std::size_t pos = slots[j];
        const bool has_left = shape[pos - 1] != '.';
        const bool has_right = shape[pos + 1] != '.';
        arity[j] = (has_left ? 1 : 0) + (has_right ? 1 : 0);
        full = full && arity[j] != 1;
      }
      std::vector<std::size_t> choice(slots.size(), 0);
      for (;;) {
        std::string tree;
        std::size_t last = 0;
        bool valid = full;
        for (std::size_t j = 0; j < slots.size(); ++j) {
          tree += shape.substr(last, slots[j] - last);
          tree += labels[choice[j]];
          last = slots[j] + 1;
          const bool is_pair = choice[j] < pair_labels;
          valid = valid && (arity[j] == 0) == is_pair;
        }
        tree += shape.substr(last);
        distinct.insert(std::move(tree));
        well_formed += valid ? 1 : 0;
        std::size_t j = 0;
        while (j < choice.size() && ++choice[j] == labels.size()) choice[j++] = 0;
        if (j == choice.size()) break;
      }
    }
    out.levels.push_back({size, distinct.size(), well_formed});
    out.total += distinct.size();
    out.catalan_sum += pow(BigInt(4 * (sigma * sigma + 5)), static_cast<unsigned>(size));
    out.relaxed_sum += pow(BigInt(24 * sigma * sigma), static_cast<unsigned>(size));
  }
  out.bound = pow(BigInt(24 * sigma * sigma), static_cast<unsigned>(x + 1));
  return out;
}

}  // namespace toptree::bench
