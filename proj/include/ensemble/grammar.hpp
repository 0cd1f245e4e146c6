#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ensemble/treebank.hpp"

namespace ensemble {

struct ParseResult {
  Tree tree;
  // True when the chart was empty and a right-branching tree of kJunkLabel
  // nodes was substituted. Callers surface this in diagnostics.
  bool fallback = false;
};

class ParserModel {
 public:
  virtual ~ParserModel() = default;
  virtual ParseResult parse(const std::vector<std::string>& sentence) const = 0;
  virtual void save(std::ostream& out) const = 0;
};

// Parser induction: corpus (+ seed) -> model. Implementations must be
// deterministic given (corpus, seed) and must treat duplicated entries as
// independent counts.
class ParserInduction {
 public:
  virtual ~ParserInduction() = default;
  virtual std::shared_ptr<const ParserModel> induce(const Corpus& corpus,
                                                    std::uint64_t seed) const = 0;
};

// Label of fallback nodes when the chart is empty.
inline constexpr const char* kJunkLabel = "@JUNK";

// --- tree normal-form transforms -------------------------------------------
//
// Training trees are normalized in two steps: unary chains collapse into
// composite labels joined with '+' (A over single child B becomes A+B over
// B's children), then nodes with three or more children are right-binarized
// with intermediate labels "~<parent>|<remaining child labels>". debinarize
// inverts both steps exactly. The characters '~', '+', '|' are reserved and
// rejected in input labels; a tree whose root is an intermediate label is
// rejected as dangling.

Tree collapse_unary_chains(const Tree& tree);
Tree expand_unary_chains(const Tree& tree);
Tree binarize(const Tree& tree);    // collapse + right-binarize; validates labels
Tree debinarize(const Tree& tree);  // exact inverse

struct PcfgOptions {
  double lambda = 1e-3;          // additive smoothing over observed rule shapes
  long long rare_max_count = 1;  // tokens at or below this train signatures
  double unknown_floor_log10 = -10.0;  // OOV floor under every open tag
};

// Relative-frequency PCFG over binarized trees. Probabilities are stored and
// persisted as log10. Decoding is exact CKY with deterministic tie-breaking:
// candidates are scanned split-ascending then rule-ascending under the
// lexicographically sorted rule table, and only a strictly better score
// replaces the incumbent.
class PcfgModel final : public ParserModel {
 public:
  ParseResult parse(const std::vector<std::string>& sentence) const override;
  void save(std::ostream& out) const override;
  static std::shared_ptr<const PcfgModel> load(std::istream& in);

  // Probability-space accessors (binarized label space). Unknown shapes -> 0.
  double rule_prob(const std::string& lhs, const std::string& rhs1,
                   const std::string& rhs2 = "") const;
  double lexical_prob(const std::string& preterminal, const std::string& word) const;
  double root_prob(const std::string& label) const;

  // Lexical candidates for a word, including signature back-off and the OOV
  // floor, exactly as the decoder sees them. Sorted by label.
  std::vector<std::pair<std::string, double>> lexical_candidates(
      const std::string& word) const;

  struct RuleView {
    std::string lhs, rhs1, rhs2;  // rhs2 empty for unary
    double log10p;
  };
  std::vector<RuleView> rules_view() const;
  std::vector<std::pair<std::string, double>> roots_view() const;  // label, log10p

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& root_symbol() const { return root_symbol_; }

  // log10 probability of the tree under this model, -inf when not derivable.
  double tree_log10prob(const Tree& tree) const;

 private:
  friend std::shared_ptr<const PcfgModel> induce_pcfg(const Corpus&, std::uint64_t,
                                                      const PcfgOptions&);
  void build_indexes();
  ParseResult fallback_parse(const std::vector<std::string>& sentence) const;

  struct Rule {
    int lhs = 0, rhs1 = 0, rhs2 = -1;  // rhs2 < 0: unary
    double lp = 0;
  };

  std::vector<std::string> labels_;  // sorted, index = id
  std::map<std::string, int> label_id_;
  std::vector<Rule> rules_;  // sorted by (lhs, rhs1, rhs2)
  std::map<std::pair<int, std::string>, double> lex_;
  std::map<std::pair<int, std::string>, double> sig_;
  std::map<int, double> root_lp_;
  std::string root_symbol_ = "TOP";
  double lambda_ = 1e-3;
  double unk_floor_lp_ = -10.0;

  // derived
  std::map<std::string, std::vector<std::pair<int, double>>> word_tags_;
  std::map<std::string, std::vector<std::pair<int, double>>> sig_tags_;
  std::vector<int> open_tags_;  // labels with any lexical or signature mass
  std::set<std::string> vocab_;
};

std::shared_ptr<const PcfgModel> induce_pcfg(const Corpus& corpus, std::uint64_t seed,
                                             const PcfgOptions& options = {});

std::shared_ptr<const PcfgModel> load_pcfg_file(const std::string& path);
void save_pcfg_file(const ParserModel& model, const std::string& path);

class PcfgInduction final : public ParserInduction {
 public:
  explicit PcfgInduction(PcfgOptions options = {}) : options_(options) {}
  std::shared_ptr<const ParserModel> induce(const Corpus& corpus,
                                            std::uint64_t seed) const override;
  const PcfgOptions& options() const { return options_; }

 private:
  PcfgOptions options_;
};

// Unknown-word signature: capitalization flag, digit flag, last two chars
// lowercased. Trained on rare tokens, queried for out-of-vocabulary words.
std::string word_signature(const std::string& word);

}  // namespace ensemble
