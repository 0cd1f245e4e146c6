#include "ensemble/corpus_qc.hpp"

#include <algorithm>
#include <numeric>

#include "ensemble/errors.hpp"
#include "ensemble/eval.hpp"
#include "ensemble/parallel.hpp"

namespace ensemble {

namespace {

// The test is about the entry alone, so the seed is fixed: results must not
// depend on any run-level seed.
constexpr std::uint64_t kMemorizationSeed = 0x6d656d6f72697a65ull;  // "memorize"

}  // namespace

bool memorization_test(const CorpusEntry& entry, const ParserInduction& learner,
                       int replication, bool* learner_failed) {
  if (replication < 1) throw DataError("memorization replication must be >= 1");
  if (learner_failed) *learner_failed = false;

  Corpus solo;
  solo.entries.assign(std::size_t(replication), entry);
  std::shared_ptr<const ParserModel> model;
  try {
    model = learner.induce(solo, kMemorizationSeed);
  } catch (const DataError&) {
    if (learner_failed) *learner_failed = true;
    return false;
  }

  ParseResult pr{Tree::leaf("x"), false};
  try {
    pr = model->parse(entry.sentence);
  } catch (const DataError&) {
    if (learner_failed) *learner_failed = true;
    return false;
  }
  if (pr.fallback) return false;

  ScoringPolicy policy = ScoringPolicy::everything_but_root(entry.gold.label());
  PairCounts counts = score_pair(entry.gold, pr.tree, policy);
  return counts.exact();
}

TrimResult trim_corpus(const Corpus& corpus, const ParserInduction& learner, int replication) {
  TrimResult result;
  if (corpus.empty()) return result;

  std::vector<char> keep(corpus.size(), 0);
  std::vector<char> failed(corpus.size(), 0);
  parallel_for(corpus.size(), [&](std::size_t i) {
    bool lf = false;
    keep[i] = memorization_test(corpus.entries[i], learner, replication, &lf) ? 1 : 0;
    failed[i] = lf ? 1 : 0;
  });

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) {
      result.stable.entries.push_back(corpus.entries[i]);
    } else {
      result.removed.entries.push_back(corpus.entries[i]);
      result.removed_indices.push_back(i);
      result.reasons.push_back(failed[i] ? "learner failed on the isolated entry"
                                         : "not memorizable in isolation");
    }
  }
  return result;
}

std::vector<double> rank_bin_means(const std::vector<double>& weights, int bins) {
  if (weights.empty()) throw DataError("rank bins need at least one weight");
  if (bins < 1) throw DataError("rank bin count must be >= 1");
  std::size_t m = weights.size();
  std::size_t b = std::min<std::size_t>(std::size_t(bins), m);

  std::vector<double> sorted = weights;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  std::vector<double> means;
  means.reserve(b);
  std::size_t base = m / b;  // last bin takes base + (m % b)
  std::size_t pos = 0;
  for (std::size_t i = 0; i < b; ++i) {
    std::size_t count = i + 1 == b ? m - pos : base;
    double sum = std::accumulate(sorted.begin() + std::ptrdiff_t(pos),
                                 sorted.begin() + std::ptrdiff_t(pos + count), 0.0);
    means.push_back(sum / double(count));
    pos += count;
  }
  return means;
}

std::vector<WeightRankRow> weight_rank_curves(const BoostTrace& trace, int bins) {
  if (trace.rounds.empty()) throw DataError("trace has no rounds");
  if (trace.m == 0) throw DataError("trace has no entries");

  std::vector<WeightRankRow> rows;
  auto emit = [&](int iteration, const std::vector<double>& dist) {
    std::vector<double> means = rank_bin_means(dist, bins);
    for (std::size_t i = 0; i < means.size(); ++i)
      rows.push_back(WeightRankRow{iteration, int(i), means[i]});
  };

  std::vector<double> uniform(trace.m, 1.0 / double(trace.m));
  emit(1, uniform);
  for (const BoostTrace::Round& r : trace.rounds) emit(r.t + 1, r.dist);
  return rows;
}

std::vector<RankedEntry> rank_inconsistencies(const BoostTrace& trace, const Corpus& corpus,
                                              std::size_t top_k) {
  if (trace.rounds.empty()) throw DataError("trace has no rounds");
  if (corpus.size() != trace.m)
    throw DataError("corpus entry count does not match the trace");

  const std::vector<double>& final_dist = trace.rounds.back().dist;
  std::vector<std::size_t> order(final_dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (final_dist[a] != final_dist[b]) return final_dist[a] > final_dist[b];
    return a < b;
  });

  std::size_t n = std::min(top_k, order.size());
  std::vector<RankedEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = order[i];
    out.push_back(RankedEntry{idx, final_dist[idx], serialize(corpus.entries[idx].gold)});
  }
  return out;
}

}  // namespace ensemble
