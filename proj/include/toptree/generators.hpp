#pragma once

// Generators for the adversarial tree family (paths P_k, full ternary trees
// S_k, gadgets G_k and the trees T_k built from them) plus random trees.
//
// Alphabet symbols are "w0" < "w1" < ... < "w{sigma-1}".

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "toptree/tree.hpp"

namespace toptree {

inline Label alphabet_symbol(std::size_t index) { return Label("w" + std::to_string(index)); }

/// True iff index < sigma^length, without overflow.
inline bool fits_in_words(std::uint64_t index, std::uint64_t length, std::uint64_t sigma) {
  if (sigma == 0) return false;
  if (sigma == 1) return index < 1;
  std::uint64_t power = 1;
  for (std::uint64_t j = 0; j < length; ++j) {
    if (power > index) return true;
    if (power > std::numeric_limits<std::uint64_t>::max() / sigma) return true;
    power *= sigma;
  }
  return index < power;
}

/// The i-th word (0-based, lexicographic) of the given length over the
/// first `sigma` symbols: base-sigma digits of i, most significant first.
inline std::vector<Label> kth_word(std::uint64_t index, std::size_t length, std::size_t sigma) {
  if (sigma < 1) throw std::invalid_argument("kth_word: sigma must be >= 1");
  if (!fits_in_words(index, length, sigma)) {
    throw std::out_of_range("kth_word: index " + std::to_string(index) + " >= " +
                            std::to_string(sigma) + "^" + std::to_string(length));
  }
  std::vector<std::size_t> digits(length, 0);
  for (std::size_t pos = length; pos-- > 0 && index > 0;) {
    digits[pos] = static_cast<std::size_t>(index % sigma);
    index /= sigma;
  }
  std::vector<Label> word;
  word.reserve(length);
  for (std::size_t d : digits) word.push_back(alphabet_symbol(d));
  return word;
}

inline LabeledTree gen_path(const std::vector<Label>& word) {
  if (word.empty()) throw std::invalid_argument("gen_path: empty word");
  LabeledTree t(word.front());
  NodeId last = t.root();
  for (std::size_t i = 1; i < word.size(); ++i) last = t.add_child(last, word[i]);
  return t;
}

/// Complete ternary tree of height k: (3^(k+1)-1)/2 nodes, 3^k leaves.
inline LabeledTree gen_full_ternary(unsigned k, const Label& label) {
  if (k > 12) throw std::invalid_argument("gen_full_ternary: height too large");
  LabeledTree t(label);
  std::vector<NodeId> level{t.root()};
  for (unsigned d = 0; d < k; ++d) {
    std::vector<NodeId> next;
    next.reserve(level.size() * 3);
    for (NodeId v : level) {
      for (int c = 0; c < 3; ++c) next.push_back(t.add_child(v, label));
    }
    level = std::move(next);
  }
  return t;
}

inline std::size_t path_length(unsigned k) {
  if (k > 7) throw std::invalid_argument("gadget order k too large (8^k nodes per path)");
  return std::size_t{1} << (3 * k);
}

/// Root with 2^k - 1 copies of S_k followed by the path P_k as last child.
inline LabeledTree gen_gadget(unsigned k, const std::vector<Label>& path_word,
                              const Label& tree_label, const Label& root_label) {
  if (k < 1) throw std::invalid_argument("gen_gadget: k must be >= 1");
  const std::size_t t = path_length(k);
  if (path_word.size() != t) {
    throw std::invalid_argument("gen_gadget: path word has length " +
                                std::to_string(path_word.size()) + ", expected " +
                                std::to_string(t));
  }
  LabeledTree g(root_label);
  const LabeledTree ternary = gen_full_ternary(k, tree_label);
  const std::size_t copies = (std::size_t{1} << k) - 1;
  for (std::size_t i = 0; i < copies; ++i) g.graft(g.root(), ternary);
  g.graft(g.root(), gen_path(path_word));
  return g;
}

struct FamilyParams {
  unsigned k = 1;
  std::size_t sigma = 2;
  std::size_t m = 1;
  std::uint64_t seed = 0;
};

/// T_k: a common root over m gadgets; gadget i spells the i-th word of
/// length 8^k on its path.
inline LabeledTree gen_family_tree(const FamilyParams& p) {
  if (p.k < 1) throw std::invalid_argument("family: k must be >= 1");
  if (p.sigma < 2) throw std::invalid_argument("family: sigma must be >= 2");
  if (p.m < 1) throw std::invalid_argument("family: m must be >= 1");
  const std::size_t t = path_length(p.k);
  if (!fits_in_words(p.m - 1, t, p.sigma)) {
    throw std::invalid_argument("family: m = " + std::to_string(p.m) + " exceeds sigma^t = " +
                                std::to_string(p.sigma) + "^" + std::to_string(t) +
                                " distinct path words");
  }
  const Label first = alphabet_symbol(0);
  LabeledTree tree(first);
  for (std::size_t i = 0; i < p.m; ++i) {
    tree.graft(tree.root(), gen_gadget(p.k, kth_word(i, t, p.sigma), first, first));
  }
  return tree;
}

/// Uniform random recursive tree: node i attaches to a uniformly chosen
/// earlier node; labels are uniform over sigma symbols.
inline LabeledTree gen_random_tree(std::size_t n, std::size_t sigma, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_random_tree: n must be >= 1");
  if (sigma < 1) throw std::invalid_argument("gen_random_tree: sigma must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_label(0, sigma - 1);
  std::vector<Label> alphabet;
  alphabet.reserve(sigma);
  for (std::size_t i = 0; i < sigma; ++i) alphabet.push_back(alphabet_symbol(i));

  LabeledTree t(alphabet[pick_label(rng)]);
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick_parent(0, i - 1);
    const auto parent = static_cast<NodeId>(pick_parent(rng));
    t.add_child(parent, alphabet[pick_label(rng)]);
  }
  return t;
}

}  // namespace toptree
