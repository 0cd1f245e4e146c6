#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ensemble/eval.hpp"
#include "ensemble/grammar.hpp"
#include "ensemble/rng.hpp"
#include "ensemble/treebank.hpp"

namespace ensemble {

// Generator PCFG for synthetic corpora. Symbols are either nonterminals
// (rule productions only) or preterminals (word productions only), never
// both. Probabilities per lhs sum to 1; expected sentence length must be
// finite (checked by fixed-point iteration at validation time).
class SynthGrammar {
 public:
  struct Rule {
    double prob = 0;
    std::vector<std::string> rhs;
  };
  struct Word {
    double prob = 0;
    std::string word;
  };

  static SynthGrammar from_stream(std::istream& in);
  static SynthGrammar from_file(const std::string& path);
  // Small ambiguous English-like grammar: PP attachment can hang off NP or
  // VP, and several words work as both noun and verb. Mean sentence length
  // is about six words.
  static SynthGrammar builtin();

  const std::string& root() const { return root_; }
  // Internal labels (rule lhs), sorted; the label pool for noise planting.
  std::vector<std::string> internal_labels() const;
  double expected_length() const { return expected_length_; }

  // One tree drawn top-down. Draws whose yield exceeds max_words are
  // discarded and redrawn from the same stream, so the cap changes which
  // draws survive but not how each is made.
  Tree sample(Rng& rng, int max_words = 40) const;

  void save(std::ostream& out) const;

 private:
  SynthGrammar() = default;
  void validate();  // sums, partition, reachability, finite expected length

  std::string root_;
  std::map<std::string, std::vector<Rule>> rules_;
  std::map<std::string, std::vector<Word>> words_;
  double expected_length_ = 0;
};

struct SynthResult {
  Corpus corpus;
  // Entries whose gold tree got a planted label conflict, ascending.
  std::vector<std::size_t> planted;
};

// n trees sampled from the grammar; each entry is, with probability
// noise_rate, perturbed by relabeling one non-root constituent to a
// conflicting internal label (structure and yield unchanged).
SynthResult synth_corpus(const SynthGrammar& grammar, std::size_t n, double noise_rate,
                         std::uint64_t seed, int max_words = 40);

struct LearningCurveRow {
  std::size_t size = 0;
  ScoreReport train;  // on the size-many sentences the model saw
  ScoreReport test;
};

// Shuffles the training corpus once (seed-derived), then trains on nested
// prefixes of each requested size and scores both that prefix and the test
// corpus. Sizes must be strictly ascending and at most the corpus size.
std::vector<LearningCurveRow> learning_curve(const Corpus& train, const Corpus& test,
                                             const std::vector<std::size_t>& sizes,
                                             const ParserInduction& learner, std::uint64_t seed,
                                             const ScoringPolicy& policy = {});

// {50, 100, 500, 1000, 5000, 10000, 20000} truncated below m, then m itself.
std::vector<std::size_t> default_size_ladder(std::size_t m);

}  // namespace ensemble
