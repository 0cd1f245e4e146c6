#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ensemble/eval.hpp"
#include "ensemble/grammar.hpp"
#include "ensemble/rng.hpp"
#include "ensemble/treebank.hpp"

namespace ensemble {

// One bootstrap replicate: |corpus| uniform draws with replacement.
Corpus bootstrap_replicate(const Corpus& corpus, Rng& rng);

struct BagParams {
  int k = 15;
  std::uint64_t master_seed = 0;
  ScoringPolicy policy;  // which constituents vote / are scored
};

struct BagEnsemble {
  std::vector<std::shared_ptr<const ParserModel>> members;
  std::vector<std::uint64_t> member_seeds;
  std::string corpus_fingerprint;
  BagParams params;
  // Hash over the training fingerprint, parameters, and serialized member
  // models. Equal fingerprints mean an identical retrainable ensemble.
  std::string fingerprint() const;
};

// Member i (1-based) trains on a replicate drawn with derive_seed(master, i),
// which also seeds its induction. Members do not depend on k, so a smaller
// ensemble is a prefix of a larger one with the same seed.
BagEnsemble train_bagged(const Corpus& corpus, int k, const ParserInduction& learner,
                         std::uint64_t master_seed);

struct EnsemblePrediction {
  Tree tree;
  int member_fallbacks = 0;  // members that produced a junk-label tree
};

// Majority vote over the first `prefix` members (prefix = 0 means all).
EnsemblePrediction bag_predict(const BagEnsemble& ensemble,
                               const std::vector<std::string>& sentence,
                               std::size_t prefix = 0);

// One voting step over already-computed member parses. Empty weights =
// unweighted. Punctuation deletion is suspended for the vote itself
// (policy.for_voting()); the root label comes from the policy.
EnsemblePrediction combine_members(const std::vector<ParseResult>& parses,
                                   const std::vector<double>& weights,
                                   const std::vector<std::string>& sentence,
                                   const ScoringPolicy& policy);

struct CurveRow {
  std::size_t prefix = 0;
  ScoreReport train;
  ScoreReport test;
};

// Per-prefix scores plus the summary rows the run report prints. Ties on
// best F resolve to the smallest prefix.
struct EnsembleCurve {
  std::vector<CurveRow> rows;
  std::size_t initial_prefix = 1;
  std::size_t final_prefix = 1;
  std::size_t best_train_prefix = 1;  // argmax of train F
  std::size_t best_test_prefix = 1;   // argmax of test F
  long long train_fallbacks = 0;      // member parse fallbacks, diagnostics
  long long test_fallbacks = 0;

  const CurveRow& initial() const { return rows[initial_prefix - 1]; }
  const CurveRow& final_row() const { return rows[final_prefix - 1]; }
  const CurveRow& best_f() const { return rows[best_test_prefix - 1]; }
  // Test-set reports at the prefix chosen on train / on test.
  const ScoreReport& train_best_f_test() const { return rows[best_train_prefix - 1].test; }
  const ScoreReport& test_best_f_test() const { return rows[best_test_prefix - 1].test; }
};

// Every member's parse of every entry, indexed [member][entry]; the input
// prefix evaluation works from.
std::vector<std::vector<ParseResult>> parse_all_members(
    const std::vector<std::shared_ptr<const ParserModel>>& members, const Corpus& corpus);

// Generic prefix-voting evaluation shared by bagging (unit weights) and
// boosting (round weights): member_*_trees[m][i] is member m's parse of
// entry i. weights empty = unweighted.
EnsembleCurve prefix_curve(const std::vector<std::vector<ParseResult>>& member_train_trees,
                           const std::vector<std::vector<ParseResult>>& member_test_trees,
                           const Corpus& train, const Corpus& test,
                           const std::vector<double>& weights, const ScoringPolicy& policy);

// Parses both corpora with every member once, then evaluates every prefix.
EnsembleCurve evaluate_curve(const BagEnsemble& ensemble, const Corpus& train,
                             const Corpus& test);

}  // namespace ensemble
