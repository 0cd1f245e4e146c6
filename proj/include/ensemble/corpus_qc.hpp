#pragma once

#include <string>
#include <vector>

#include "ensemble/boosting.hpp"
#include "ensemble/grammar.hpp"
#include "ensemble/treebank.hpp"

namespace ensemble {

// True iff a parser induced from `replication` copies of the entry alone
// parses the entry's sentence back to its gold tree exactly (all labeled
// spans below the root, preterminals included). Induction failures and
// fallback parses count as not memorizable; `learner_failed`, when given,
// reports the failure case.
bool memorization_test(const CorpusEntry& entry, const ParserInduction& learner,
                       int replication = 10, bool* learner_failed = nullptr);

struct TrimResult {
  Corpus stable;
  Corpus removed;
  std::vector<std::size_t> removed_indices;  // into the original corpus
  std::vector<std::string> reasons;          // aligned with removed_indices
};

// Partitions a corpus into memorizable and non-memorizable entries; the two
// parts are an exact partition of the input in original order.
TrimResult trim_corpus(const Corpus& corpus, const ParserInduction& learner,
                       int replication = 10);

// Sorts weights descending and averages them over `bins` contiguous
// equal-count rank bins (the last bin absorbs the remainder). bins is
// clamped to the number of weights; bins < 1 is an error.
std::vector<double> rank_bin_means(const std::vector<double>& weights, int bins);

struct WeightRankRow {
  int iteration = 0;    // which D_t: 1 is the uniform start
  int bin = 0;          // 0-based rank bin
  double mean_weight = 0;
};

// Rank-vs-weight curve data for every distribution in a boosting trace.
// Iteration 1 is the uniform initial distribution; the trace's round-t
// snapshot appears as iteration t+1.
std::vector<WeightRankRow> weight_rank_curves(const BoostTrace& trace, int bins = 1000);

struct RankedEntry {
  std::size_t index = 0;  // into the training corpus
  double weight = 0;      // final-round distribution weight
  std::string tree_text;  // serialized gold tree for human review
};

// Entries ordered by final-round weight (descending, ties by index),
// truncated to top_k. The corpus supplies the gold trees and must match the
// trace's entry count.
std::vector<RankedEntry> rank_inconsistencies(const BoostTrace& trace, const Corpus& corpus,
                                              std::size_t top_k = 100);

}  // namespace ensemble
