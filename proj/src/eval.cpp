#include "ensemble/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ensemble {

PairCounts score_sets(const std::set<Constituent>& gold, const std::set<Constituent>& hyp) {
  PairCounts counts;
  auto gi = gold.begin();
  auto hi = hyp.begin();
  while (gi != gold.end() && hi != hyp.end()) {
    if (*gi < *hi) {
      ++counts.c;
      ++gi;
    } else if (*hi < *gi) {
      ++counts.b;
      ++hi;
    } else {
      ++counts.a;
      ++gi;
      ++hi;
    }
  }
  counts.c += std::distance(gi, gold.end());
  counts.b += std::distance(hi, hyp.end());
  return counts;
}

PairCounts score_pair(const Tree& gold, const Tree& hyp, const ScoringPolicy& policy) {
  if (gold.yield() != hyp.yield()) throw DataError("score_pair: yields differ");
  return score_sets(constituents(gold, policy), constituents(hyp, policy));
}

double constituent_accuracy(const PairCounts& counts) {
  long long u = counts.union_size();
  if (u == 0) return 1.0;
  return static_cast<double>(counts.a) / static_cast<double>(u);
}

double f_measure(double precision, double recall) {
  double s = precision + recall;
  if (s == 0) return 0.0;
  return 2.0 * precision * recall / s;
}

ScoreReport score_corpus(const Corpus& gold, const std::vector<Tree>& hyps,
                         const ScoringPolicy& policy) {
  if (gold.empty()) throw DataError("score_corpus: empty corpus");
  if (gold.size() != hyps.size())
    throw DataError("score_corpus: " + std::to_string(gold.size()) + " gold entries vs " +
                    std::to_string(hyps.size()) + " hypotheses");
  ScoreReport r;
  r.entries = static_cast<long long>(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    PairCounts counts;
    try {
      counts = score_pair(gold.entries[i].gold, hyps[i], policy);
    } catch (const DataError& e) {
      throw DataError("entry " + std::to_string(i) + ": " + e.what());
    }
    r.totals.a += counts.a;
    r.totals.b += counts.b;
    r.totals.c += counts.c;
    if (counts.exact()) ++r.exact_matches;
  }
  auto pct = [](long long num, long long den) {
    return den == 0 ? 100.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = pct(r.totals.a, r.totals.a + r.totals.b);
  r.recall = pct(r.totals.a, r.totals.a + r.totals.c);
  r.f = f_measure(r.precision, r.recall);
  r.exact = 100.0 * static_cast<double>(r.exact_matches) / static_cast<double>(r.entries);
  return r;
}

std::string format_percent(double value) {
  long long cents = static_cast<long long>(std::floor(value * 100.0 + 0.5));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", cents / 100, std::llabs(cents % 100));
  return buf;
}

}  // namespace ensemble
