#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ensemble/errors.hpp"

namespace ensemble {

// Labeled ordered tree over a token sequence. Internal nodes carry a label
// and at least one child; leaves carry exactly one token and nothing else.
// Labels and tokens are byte-transparent but may not contain whitespace or
// brackets (rejected, no escaping). Value type, immutable after construction.
class Tree {
 public:
  static Tree leaf(std::string token);
  static Tree node(std::string label, std::vector<Tree> children);

  bool is_leaf() const { return leaf_; }
  // Single child which is a leaf, i.e. a part-of-speech node.
  bool is_preterminal() const {
    return !leaf_ && children_.size() == 1 && children_[0].leaf_;
  }
  const std::string& label() const { return text_; }
  const std::string& token() const { return text_; }
  const std::vector<Tree>& children() const { return children_; }

  std::size_t leaf_count() const;
  std::vector<std::string> yield() const;
  void yield_into(std::vector<std::string>& out) const;

  bool operator==(const Tree& other) const;

 private:
  Tree() = default;
  std::string text_;  // label for internal nodes, token for leaves
  std::vector<Tree> children_;
  bool leaf_ = false;
};

// Labeled span, half-open [start, end) over 0-based word indexes.
struct Constituent {
  std::string label;
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  auto operator<=>(const Constituent&) const = default;
};

// Which constituents of a tree count for scoring and voting.
struct ScoringPolicy {
  std::string root_label = "TOP";
  bool exclude_root = true;        // drop nodes labeled root_label
  bool count_preterminals = false;
  // Preterminal labels whose words are deleted before spans are computed
  // (scorer-compatibility hook). Default empty.
  std::set<std::string> punct_labels;

  bool is_punct(const std::string& label) const {
    return !punct_labels.empty() && punct_labels.count(label) > 0;
  }
  static ScoringPolicy count_everything() {
    ScoringPolicy p;
    p.exclude_root = false;
    p.count_preterminals = true;
    return p;
  }
  // Everything except the given root label; used by the memorization test.
  static ScoringPolicy everything_but_root(std::string root) {
    ScoringPolicy p;
    p.root_label = std::move(root);
    p.count_preterminals = true;
    return p;
  }
  // Voting needs spans over real sentence positions, so punctuation deletion
  // (a scoring-only transform) is cleared.
  ScoringPolicy for_voting() const {
    ScoringPolicy p = *this;
    p.punct_labels.clear();
    return p;
  }
};

// Parses zero or more bracketed trees: "(" label child+ ")", children are
// subtrees or bare tokens. Throws BracketParseError with a 1-based character
// offset on unbalanced brackets, empty or label-less or childless nodes, and
// stray text.
std::vector<Tree> parse_bracketed(std::string_view text);

// Inverse of parse_bracketed for a single tree; single-space separated, no
// trailing whitespace. parse(serialize(t)) == t.
std::string serialize(const Tree& tree);

// The constituent set of a tree under a policy. Duplicate (label, span)
// pairs collapse. Zero-width spans (all words punctuation-deleted) drop.
std::set<Constituent> constituents(const Tree& tree, const ScoringPolicy& policy);

struct CorpusEntry {
  std::vector<std::string> sentence;  // yield of gold
  Tree gold;
};

struct Corpus {
  std::vector<CorpusEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  void add(Tree gold);  // derives the sentence from the tree's yield
  // FNV-1a 64 over serialized trees, 16 hex digits. Identifies the exact
  // training data in run metadata.
  std::string fingerprint() const;
};

// One serialized tree per line, UTF-8, blank lines ignored. Errors name the
// 1-based line number.
Corpus corpus_load(const std::string& path);
void corpus_save(const Corpus& corpus, const std::string& path);

}  // namespace ensemble
