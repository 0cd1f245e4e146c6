#pragma once

#include <string>
#include <vector>

#include "ensemble/treebank.hpp"

namespace ensemble {

// Constituent overlap between a gold and a hypothesis set:
//   a = in both, b = hypothesis only, c = gold only.
struct PairCounts {
  long long a = 0;
  long long b = 0;
  long long c = 0;
  long long union_size() const { return a + b + c; }
  bool exact() const { return b == 0 && c == 0; }
};

PairCounts score_sets(const std::set<Constituent>& gold, const std::set<Constituent>& hyp);

// Requires equal yields (throws DataError otherwise).
PairCounts score_pair(const Tree& gold, const Tree& hyp, const ScoringPolicy& policy);

// a / (a+b+c); an empty union counts as perfect (1.0).
double constituent_accuracy(const PairCounts& counts);

// Harmonic mean of precision and recall (same units as its inputs);
// 0 when both are 0.
double f_measure(double precision, double recall);

// Micro-averaged corpus scores, percentages in [0,100].
struct ScoreReport {
  double precision = 0;
  double recall = 0;
  double f = 0;
  double exact = 0;  // % of entries with b == c == 0
  PairCounts totals;
  long long exact_matches = 0;
  long long entries = 0;
};

// Pairs gold.entries[i] with hyps[i]. Throws on size or yield mismatch and on
// an empty corpus. An entry with an empty union scores as an exact match.
ScoreReport score_corpus(const Corpus& gold, const std::vector<Tree>& hyps,
                         const ScoringPolicy& policy);

// Fixed-width percentage with 2 decimals, half-up. All human tables and CSVs
// use this, which keeps reruns byte-identical.
std::string format_percent(double value);

}  // namespace ensemble
