#include "ensemble/bagging.hpp"

#include <sstream>

#include "ensemble/combine.hpp"
#include "ensemble/parallel.hpp"

namespace ensemble {

Corpus bootstrap_replicate(const Corpus& corpus, Rng& rng) {
  if (corpus.empty()) throw DataError("bootstrap_replicate: empty corpus");
  const std::size_t m = corpus.size();
  Corpus out;
  out.entries.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    out.entries.push_back(corpus.entries[rng.bounded(m)]);
  return out;
}

BagEnsemble train_bagged(const Corpus& corpus, int k, const ParserInduction& learner,
                         std::uint64_t master_seed) {
  if (k < 1) throw DataError("train_bagged: k must be >= 1");
  if (corpus.empty()) throw DataError("train_bagged: empty corpus");
  BagEnsemble ensemble;
  ensemble.params.k = k;
  ensemble.params.master_seed = master_seed;
  ensemble.corpus_fingerprint = corpus.fingerprint();
  ensemble.members.resize(k);
  ensemble.member_seeds.resize(k);
  for (int i = 1; i <= k; ++i)
    ensemble.member_seeds[i - 1] = derive_seed(master_seed, static_cast<std::uint64_t>(i));
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t idx) {
    std::uint64_t seed = ensemble.member_seeds[idx];
    Rng rng(seed);
    Corpus replicate = bootstrap_replicate(corpus, rng);
    try {
      ensemble.members[idx] = learner.induce(replicate, seed);
    } catch (const DataError& e) {
      throw DataError("replicate " + std::to_string(idx + 1) + ": " + e.what());
    }
  });
  return ensemble;
}

std::string BagEnsemble::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char b : s) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  mix(corpus_fingerprint);
  mix(std::to_string(params.k));
  mix(std::to_string(params.master_seed));
  for (const auto& m : members) {
    std::ostringstream os;
    m->save(os);
    mix(os.str());
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

EnsemblePrediction combine_members(const std::vector<ParseResult>& parses,
                                   const std::vector<double>& weights,
                                   const std::vector<std::string>& sentence,
                                   const ScoringPolicy& policy) {
  ScoringPolicy voting = policy.for_voting();
  std::vector<std::set<Constituent>> sets;
  std::vector<Tree> trees;
  sets.reserve(parses.size());
  trees.reserve(parses.size());
  int fallbacks = 0;
  for (const auto& p : parses) {
    sets.push_back(constituents(p.tree, voting));
    trees.push_back(p.tree);
    if (p.fallback) ++fallbacks;
  }
  VoteTally tally = tally_votes(sets, weights);
  std::set<Constituent> winning = majority_winners(tally);
  Tree combined =
      build_tree(winning, tally, sentence, trees, weights, policy.root_label);
  return EnsemblePrediction{std::move(combined), fallbacks};
}

EnsemblePrediction bag_predict(const BagEnsemble& ensemble,
                               const std::vector<std::string>& sentence, std::size_t prefix) {
  if (ensemble.members.empty()) throw DataError("bag_predict: empty ensemble");
  std::size_t p = prefix == 0 ? ensemble.members.size() : prefix;
  if (p > ensemble.members.size())
    throw DataError("bag_predict: prefix exceeds ensemble size");
  std::vector<ParseResult> parses;
  parses.reserve(p);
  for (std::size_t m = 0; m < p; ++m)
    parses.push_back(ensemble.members[m]->parse(sentence));
  return combine_members(parses, {}, sentence, ensemble.params.policy);
}

EnsembleCurve prefix_curve(const std::vector<std::vector<ParseResult>>& member_train_trees,
                           const std::vector<std::vector<ParseResult>>& member_test_trees,
                           const Corpus& train, const Corpus& test,
                           const std::vector<double>& weights, const ScoringPolicy& policy) {
  const std::size_t k = member_train_trees.size();
  if (k == 0) throw DataError("prefix_curve: no members");
  if (member_test_trees.size() != k)
    throw DataError("prefix_curve: member lists differ between corpora");
  if (!weights.empty() && weights.size() != k)
    throw DataError("prefix_curve: weight list must match member list");

  EnsembleCurve curve;
  for (const auto& per_entry : member_train_trees)
    for (const auto& p : per_entry) curve.train_fallbacks += p.fallback ? 1 : 0;
  for (const auto& per_entry : member_test_trees)
    for (const auto& p : per_entry) curve.test_fallbacks += p.fallback ? 1 : 0;

  auto eval_prefix = [&](const std::vector<std::vector<ParseResult>>& member_trees,
                         const Corpus& gold, std::size_t p) {
    std::vector<Tree> hyps(gold.size(), Tree::leaf("x"));
    std::vector<double> w;
    if (!weights.empty()) w.assign(weights.begin(), weights.begin() + p);
    parallel_for(gold.size(), [&](std::size_t i) {
      std::vector<ParseResult> parses;
      parses.reserve(p);
      for (std::size_t m = 0; m < p; ++m) parses.push_back(member_trees[m][i]);
      hyps[i] =
          combine_members(parses, w, gold.entries[i].sentence, policy).tree;
    });
    return score_corpus(gold, hyps, policy);
  };

  for (std::size_t p = 1; p <= k; ++p) {
    CurveRow row;
    row.prefix = p;
    row.train = eval_prefix(member_train_trees, train, p);
    row.test = eval_prefix(member_test_trees, test, p);
    curve.rows.push_back(std::move(row));
  }
  curve.initial_prefix = 1;
  curve.final_prefix = k;
  for (std::size_t p = 1; p <= k; ++p) {
    if (curve.rows[p - 1].train.f > curve.rows[curve.best_train_prefix - 1].train.f)
      curve.best_train_prefix = p;
    if (curve.rows[p - 1].test.f > curve.rows[curve.best_test_prefix - 1].test.f)
      curve.best_test_prefix = p;
  }
  return curve;
}

std::vector<std::vector<ParseResult>> parse_all_members(
    const std::vector<std::shared_ptr<const ParserModel>>& members, const Corpus& corpus) {
  std::vector<std::vector<ParseResult>> out(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    out[m].assign(corpus.size(), ParseResult{Tree::leaf("x"), false});
    parallel_for(corpus.size(), [&, m](std::size_t i) {
      out[m][i] = members[m]->parse(corpus.entries[i].sentence);
    });
  }
  return out;
}

EnsembleCurve evaluate_curve(const BagEnsemble& ensemble, const Corpus& train,
                             const Corpus& test) {
  if (ensemble.members.empty()) throw DataError("evaluate_curve: empty ensemble");
  auto train_trees = parse_all_members(ensemble.members, train);
  auto test_trees = parse_all_members(ensemble.members, test);
  return prefix_curve(train_trees, test_trees, train, test, {}, ensemble.params.policy);
}

}  // namespace ensemble
