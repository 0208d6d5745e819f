// toptree: generate trees, compress them to top DAGs, verify the pipeline,
// compare the original and size-capped builders, and check the counting
// bound.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "toptree/bench.hpp"
#include "toptree/toptree.hpp"

namespace {

using namespace toptree;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << content;
}

nlohmann::json stats_json(const TreeStats& s) {
  return {{"n", s.n}, {"edges", s.edges}, {"sigma", s.sigma}, {"depth", s.depth}, {"info_bound", s.info_bound}};
}

struct GenArgs {
  std::string family;
  unsigned k = 1;
  std::size_t sigma = 2;
  std::size_t m = 1;
  std::size_t n = 100;
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  std::optional<std::size_t> declared;
  LabeledTree t = [&] {
    if (a.family == "path") return gen_path(kth_word(a.index, path_length(a.k), a.sigma));
    if (a.family == "ternary") return gen_full_ternary(a.k, alphabet_symbol(0));
    if (a.family == "gadget") {
      return gen_gadget(a.k, kth_word(a.index, path_length(a.k), a.sigma), alphabet_symbol(0),
                        alphabet_symbol(0));
    }
    if (a.family == "tk") {
      declared = a.sigma;
      return gen_family_tree({a.k, a.sigma, a.m, a.seed});
    }
    if (a.family == "random") {
      declared = a.sigma;
      return gen_random_tree(a.n, a.sigma, a.seed);
    }
    throw UsageError("unknown family '" + a.family + "'");
  }();
  const std::string text = serialize_tree(t) + "\n";
  const auto stats = stats_json(tree_stats(t, declared)).dump();
  if (a.out.empty()) {
    std::cout << text;
    std::cerr << stats << "\n";
  } else {
    write_file(a.out, text);
    std::cout << stats << "\n";
  }
  return 0;
}

struct BuildArgs {
  std::string input;
  std::string algo = "original";
  std::string alpha = "10/9";
  std::optional<std::size_t> sigma;

  BuildConfig config() const {
    BuildConfig cfg;
    cfg.algo = parse_algorithm(algo);
    cfg.alpha = Alpha::parse(alpha);
    return cfg;
  }
};

LabeledTree load_tree(const std::string& path) {
  LabeledTree t = parse_tree(read_file(path));
  if (t.size() < 2) throw UsageError("input tree has a single node; nothing to compress");
  return t;
}

int run_compress(const BuildArgs& b, const std::string& out, const std::string& report,
                 const std::string& trace) {
  const LabeledTree t = load_tree(b.input);
  auto result = bench::compress(t, b.config(), b.input, b.sigma);
  if (!out.empty()) write_file(out, write_tdag(result.dag));
  const auto j = bench::to_json(result.report);
  if (!report.empty()) write_file(report, j.dump(2) + "\n");
  if (!trace.empty()) write_file(trace, bench::trace_to_json(result.report.trace).dump(2) + "\n");
  std::cout << "n=" << result.report.tree.n << " iterations=" << result.report.trace.size()
            << " toptree_nodes=" << result.report.dag.toptree_nodes
            << " dag_nodes=" << result.report.dag.dag_nodes
            << " ratio_info=" << bench::format_double(result.report.dag.ratio_info) << "\n";
  return 0;
}

int run_verify(const BuildArgs& b, const std::string& tdag_path) {
  const LabeledTree t = load_tree(b.input);
  std::optional<TopDag> external;
  if (!tdag_path.empty()) external = read_tdag(read_file(tdag_path));
  const auto rep = bench::verify(t, b.config(), external);
  for (const auto& c : rep.checks) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  if (!rep.passed()) {
    for (const auto& c : rep.checks) {
      if (!c.passed) std::cerr << "violated: " << c.name << ": " << c.detail << "\n";
    }
    return kExitFail;
  }
  return 0;
}

int run_compare(const std::vector<unsigned>& ks, std::size_t sigma, std::size_t m,
                const std::string& alpha, const std::string& out, const std::string& gadgets) {
  if (ks.empty()) throw UsageError("compare: empty k range");
  const auto points = bench::compare(ks, sigma, m, Alpha::parse(alpha));
  std::vector<bench::ComparisonRow> rows;
  std::string gadget_csv = "k,gadget,distinct_path_clusters\n";
  for (const auto& p : points) {
    rows.push_back(p.row);
    for (std::size_t g = 0; g < p.path_clusters.per_gadget.size(); ++g) {
      gadget_csv += std::to_string(p.row.k) + "," + std::to_string(g) + "," +
                    std::to_string(p.path_clusters.per_gadget[g]) + "\n";
    }
    std::cout << "k=" << p.row.k << " distinct_path_clusters_original=" << p.path_clusters.distinct_total
              << " (m*k=" << p.row.m * p.row.k << ")\n";
  }
  const std::string csv = bench::to_csv(rows);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  if (!gadgets.empty()) write_file(gadgets, gadget_csv);
  return 0;
}

int run_bound_check(std::size_t x, std::size_t sigma) {
  const auto bc = bench::bound_check(x, sigma);
  std::cout << "size,count,well_formed\n";
  for (const auto& l : bc.levels) std::cout << l.size << "," << l.count << "," << l.well_formed << "\n";
  std::cout << "total=" << bc.total << " sum(4(s^2+5))^i=" << bc.catalan_sum
            << " sum(24s^2)^i=" << bc.relaxed_sum << " bound(24s^2)^(x+1)=" << bc.bound << "\n";
  std::cout << (bc.passed() ? "PASS" : "FAIL") << "\n";
  return bc.passed() ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top tree compression toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a tree (.bp)");
  gen_cmd->add_option("--family", gen.family, "path | ternary | gadget | tk | random")
      ->required()
      ->check(CLI::IsMember({"path", "ternary", "gadget", "tk", "random"}));
  gen_cmd->add_option("--k", gen.k, "Gadget order / ternary height");
  gen_cmd->add_option("--sigma", gen.sigma, "Alphabet size");
  gen_cmd->add_option("--m", gen.m, "Gadget count (tk)");
  gen_cmd->add_option("--n", gen.n, "Node count (random)");
  gen_cmd->add_option("--index", gen.index, "Path word index (path, gadget)");
  gen_cmd->add_option("--seed", gen.seed, "Seed (random)");
  gen_cmd->add_option("-o,--out", gen.out, "Output .bp file (stdout if omitted)");

  auto add_build = [](CLI::App* cmd, BuildArgs& b) {
    cmd->add_option("input", b.input, "Input .bp file")->required();
    cmd->add_option("--algo", b.algo, "original | modified")
        ->check(CLI::IsMember({"original", "modified"}));
    cmd->add_option("--alpha", b.alpha, "Size-cap growth factor P/Q (> 1)");
  };

  BuildArgs comp;
  std::string comp_out, comp_report, comp_trace;
  auto* comp_cmd = app.add_subcommand("compress", "Build the top DAG of a tree");
  add_build(comp_cmd, comp);
  comp_cmd->add_option("--sigma", comp.sigma, "Declared alphabet size for statistics");
  comp_cmd->add_option("-o,--out", comp_out, "Output .tdag file");
  comp_cmd->add_option("--report", comp_report, "Output JSON report");
  comp_cmd->add_option("--trace", comp_trace, "Output JSON iteration trace");

  BuildArgs ver;
  std::string ver_tdag;
  auto* ver_cmd = app.add_subcommand("verify", "Audit the compression pipeline on a tree");
  add_build(ver_cmd, ver);
  ver_cmd->add_option("--tdag", ver_tdag, "Also decompress this .tdag and compare with the input");

  std::vector<unsigned> cmp_k;
  std::size_t cmp_sigma = 2, cmp_m = 64;
  std::string cmp_alpha = "10/9", cmp_out, cmp_gadgets;
  auto* cmp_cmd = app.add_subcommand("compare", "Original vs modified on the adversarial family");
  cmp_cmd->add_option("--k", cmp_k, "Gadget orders, e.g. 1,2,3")->delimiter(',');
  cmp_cmd->add_option("--sigma", cmp_sigma, "Alphabet size");
  cmp_cmd->add_option("--m", cmp_m, "Gadget count");
  cmp_cmd->add_option("--alpha", cmp_alpha, "Size-cap growth factor for the modified run");
  cmp_cmd->add_option("-o,--out", cmp_out, "Output CSV (stdout if omitted)");
  cmp_cmd->add_option("--gadgets", cmp_gadgets, "Output CSV of per-gadget path-cluster counts");

  std::size_t bc_x = 3, bc_sigma = 2;
  auto* bc_cmd = app.add_subcommand("bound-check", "Enumerate labeled cluster trees against the counting bound");
  bc_cmd->add_option("--x", bc_x, "Maximum tree size (<= 3)");
  bc_cmd->add_option("--sigma", bc_sigma, "Alphabet size (<= 4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (comp_cmd->parsed()) return run_compress(comp, comp_out, comp_report, comp_trace);
    if (ver_cmd->parsed()) return run_verify(ver, ver_tdag);
    if (cmp_cmd->parsed()) return run_compare(cmp_k, cmp_sigma, cmp_m, cmp_alpha, cmp_out, cmp_gadgets);
    if (bc_cmd->parsed()) return run_bound_check(bc_x, bc_sigma);
  } catch (const InconsistentMerge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
