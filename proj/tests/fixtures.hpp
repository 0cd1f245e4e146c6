#pragma once

// Shared test machinery: random tree generators, a brute-force parse
// enumerator, and canned parser stubs. Everything here is deliberately
// independent of the library's own algorithms so it can serve as an oracle.

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ensemble/grammar.hpp"
#include "ensemble/rng.hpp"
#include "ensemble/treebank.hpp"

namespace fixtures {

inline ensemble::Tree tree_of(const std::string& text) {
  auto trees = ensemble::parse_bracketed(text);
  if (trees.size() != 1) throw std::logic_error("tree_of wants exactly one tree");
  return trees[0];
}

inline ensemble::Corpus corpus_of(const std::vector<std::string>& texts) {
  ensemble::Corpus c;
  for (const auto& t : texts) c.add(tree_of(t));
  return c;
}

inline const std::string& phrase_label(ensemble::Rng& rng) {
  static const std::vector<std::string> pool = {"S",    "NP", "VP", "PP",
                                                "ADJP", "SQ", "X",  "FRAG"};
  return pool[rng.bounded(pool.size())];
}

inline const std::string& tag_label(ensemble::Rng& rng) {
  static const std::vector<std::string> pool = {"DT", "NN", "VB", "IN", "JJ", "CD"};
  return pool[rng.bounded(pool.size())];
}

inline const std::string& word(ensemble::Rng& rng) {
  static const std::vector<std::string> pool = {"the", "a",   "cat",  "dog", "saw", "ran",
                                                "big", "123", "7/8",  "Fees", "in", "with",
                                                "It",  "x",   "jump", "old"};
  return pool[rng.bounded(pool.size())];
}

inline ensemble::Tree random_preterminal(ensemble::Rng& rng) {
  return ensemble::Tree::node(tag_label(rng), {ensemble::Tree::leaf(word(rng))});
}

// Random tree of bounded depth. Trainable trees keep every leaf under its own
// preterminal (what binarize requires); otherwise bare tokens may sit directly
// under phrasal nodes, which the bracketed format allows.
inline ensemble::Tree random_tree(ensemble::Rng& rng, int depth, bool trainable) {
  using ensemble::Tree;
  if (depth <= 0) return random_preterminal(rng);
  std::size_t width = 1 + rng.bounded(3);
  std::vector<Tree> kids;
  kids.reserve(width);
  for (std::size_t i = 0; i < width; ++i) {
    std::uint64_t kind = rng.bounded(trainable ? 4 : 5);
    if (kind <= 1)
      kids.push_back(random_tree(rng, depth - 1 - int(rng.bounded(2)), trainable));
    else if (kind <= 3 || width == 1)
      kids.push_back(random_preterminal(rng));
    else
      kids.push_back(Tree::leaf(word(rng)));
  }
  return Tree::node(phrase_label(rng), std::move(kids));
}

inline std::vector<std::string> random_sentence(ensemble::Rng& rng, std::size_t max_len = 8) {
  std::vector<std::string> toks(1 + rng.bounded(max_len), "");
  for (auto& t : toks) t = word(rng);
  return toks;
}

// Random tree whose yield is exactly toks[lo, hi): random cut points, each
// multi-word segment a recursive subtree, each single word a preterminal.
inline ensemble::Tree random_tree_over(ensemble::Rng& rng, const std::vector<std::string>& toks,
                                       std::size_t lo, std::size_t hi) {
  using ensemble::Tree;
  if (hi - lo == 1) return Tree::node(tag_label(rng), {Tree::leaf(toks[lo])});
  std::size_t len = hi - lo;
  std::size_t parts = 2 + rng.bounded(std::min<std::size_t>(3, len - 1));
  std::set<std::size_t> cuts;
  while (cuts.size() < parts - 1) cuts.insert(lo + 1 + rng.bounded(len - 1));
  std::vector<Tree> kids;
  std::size_t prev = lo;
  auto segment = [&](std::size_t a, std::size_t b) {
    return b - a == 1 ? Tree::node(tag_label(rng), {Tree::leaf(toks[a])})
                      : random_tree_over(rng, toks, a, b);
  };
  for (std::size_t cut : cuts) {
    kids.push_back(segment(prev, cut));
    prev = cut;
  }
  kids.push_back(segment(prev, hi));
  return Tree::node(phrase_label(rng), std::move(kids));
}

inline ensemble::Tree random_parse_over(ensemble::Rng& rng, const std::vector<std::string>& toks,
                                        const std::string& root = "TOP") {
  using ensemble::Tree;
  if (toks.size() == 1)
    return Tree::node(root, {Tree::node(tag_label(rng), {Tree::leaf(toks[0])})});
  return Tree::node(root, {random_tree_over(rng, toks, 0, toks.size())});
}

// Highest log10 parse score over all derivations, by memoized top-down search
// on the model's public rule and lexicon views. Shares nothing with the chart
// decoder. Returns -inf when the sentence has no derivation. Induced models
// never contain unary rules, and this oracle refuses to guess about them.
inline double enumerate_best_log10(const ensemble::PcfgModel& model,
                                   const std::vector<std::string>& sentence) {
  struct Expansion {
    std::string rhs1, rhs2;
    double lp;
  };
  std::map<std::string, std::vector<Expansion>> by_lhs;
  for (const auto& r : model.rules_view()) {
    if (r.rhs2.empty()) throw std::logic_error("enumeration oracle: unary rule in model");
    by_lhs[r.lhs].push_back({r.rhs1, r.rhs2, r.log10p});
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::map<std::tuple<std::size_t, std::size_t, std::string>, double> memo;
  auto best = [&](auto&& self, std::size_t i, std::size_t j, const std::string& label) -> double {
    auto key = std::make_tuple(i, j, label);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;
    double out = kNegInf;
    if (j - i == 1) {
      for (const auto& [tag, lp] : model.lexical_candidates(sentence[i]))
        if (tag == label && lp > out) out = lp;
    } else {
      auto it = by_lhs.find(label);
      if (it != by_lhs.end()) {
        for (const auto& e : it->second) {
          for (std::size_t k = i + 1; k < j; ++k) {
            double l = self(self, i, k, e.rhs1);
            if (l == kNegInf) continue;
            double r = self(self, k, j, e.rhs2);
            if (r == kNegInf) continue;
            double cand = e.lp + l + r;
            if (cand > out) out = cand;
          }
        }
      }
    }
    memo.emplace(key, out);
    return out;
  };
  double total = kNegInf;
  for (const auto& [root, lp] : model.roots_view()) {
    double v = best(best, 0, sentence.size(), root);
    if (v != kNegInf && lp + v > total) total = lp + v;
  }
  return total;
}

inline std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ' ';
    out += toks[i];
  }
  return out;
}

// Parser stub with a fixed answer per sentence, so ensemble tests can pin
// member outputs exactly.
class CannedModel final : public ensemble::ParserModel {
 public:
  explicit CannedModel(std::map<std::string, ensemble::Tree> by_sentence)
      : by_sentence_(std::move(by_sentence)) {}

  ensemble::ParseResult parse(const std::vector<std::string>& sentence) const override {
    auto it = by_sentence_.find(join_tokens(sentence));
    if (it == by_sentence_.end())
      throw ensemble::DataError("canned model: unexpected sentence");
    return ensemble::ParseResult{it->second, false};
  }
  void save(std::ostream& out) const override { out << "canned\n"; }

 private:
  std::map<std::string, ensemble::Tree> by_sentence_;
};

// Always parses to a right-branching tree over labels no gold tree uses, so
// every constituent disagrees.
class DisagreeingModel final : public ensemble::ParserModel {
 public:
  ensemble::ParseResult parse(const std::vector<std::string>& sentence) const override {
    using ensemble::Tree;
    auto preterm = [&](std::size_t i) {
      return Tree::node("ZZTAG", {Tree::leaf(sentence[i])});
    };
    Tree cur = preterm(sentence.size() - 1);
    for (std::size_t i = sentence.size() - 1; i-- > 0;)
      cur = Tree::node("ZZ", {preterm(i), std::move(cur)});
    return ensemble::ParseResult{Tree::node("TOP", {std::move(cur)}), false};
  }
  void save(std::ostream& out) const override { out << "disagreeing\n"; }
};

class DisagreeingInduction final : public ensemble::ParserInduction {
 public:
  std::shared_ptr<const ensemble::ParserModel> induce(const ensemble::Corpus&,
                                                      std::uint64_t) const override {
    return std::make_shared<DisagreeingModel>();
  }
};

}  // namespace fixtures
