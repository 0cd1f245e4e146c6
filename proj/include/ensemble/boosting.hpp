#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ensemble/bagging.hpp"
#include "ensemble/eval.hpp"
#include "ensemble/grammar.hpp"
#include "ensemble/rng.hpp"
#include "ensemble/treebank.hpp"

namespace ensemble {

// Probability distribution over corpus entries.
struct Distribution {
  std::vector<double> w;

  static Distribution uniform(std::size_t m);
  // Non-negative entries summing to 1 within 1e-9.
  void validate() const;
  std::size_t size() const { return w.size(); }
};

// m draws from D by inverse-CDF sampling. A point mass on entry j yields m
// copies of entry j; the uniform D matches bootstrap_replicate statistically.
Corpus weighted_resample(const Corpus& corpus, const Distribution& dist, Rng& rng);

// Per-entry constituent agreement between gold and hypothesis:
// union_size = |gold set ∪ hyp set|, agreements = both, disagreements = rest.
struct AgreementStats {
  long long union_size = 0;
  long long agreements = 0;
  long long disagreements = 0;
};

AgreementStats agreement_stats(const Tree& gold, const Tree& hyp, const ScoringPolicy& policy);

inline constexpr double kAlphaClampMin = 1e-6;
inline constexpr double kAlphaClampMax = 1.0 - 1e-6;

// Constituent-accuracy alpha:
//   alpha = sum_i D(i)/|T_i| * disagreements_i  /  sum_i D(i)/|T_i| * agreements_i
// over entries with non-empty unions, clamped to [1e-6, 1-1e-6]. A zero
// denominator (no weighted agreement at all) throws UnboostableRoundError.
// `clamped`, when given, reports whether clamping fired.
double compute_alpha_ca(const std::vector<AgreementStats>& stats, const Distribution& dist,
                        bool* clamped = nullptr, int round = 0);

struct UpdateResult {
  Distribution next;
  double z = 0;  // normalizer
};

// Multiplies D(i) by alpha*|T_i| + (1-alpha)*disagreements_i (entries with an
// empty union get factor alpha) and renormalizes.
UpdateResult update_distribution(const Distribution& dist, double alpha,
                                 const std::vector<AgreementStats>& stats);

struct BoostOptions {
  ScoringPolicy policy;
  // Default vote weight is ln(1/alpha_t), so accurate rounds weigh more.
  // literal_alpha_vote uses alpha_t itself as the weight instead.
  bool literal_alpha_vote = false;
  std::string alpha_rule = "ca";  // config hook; "ca" is the only shipped rule
};

struct BoostRound {
  int t = 0;
  double alpha = 0;
  double vote_weight = 0;
  double z = 0;
  bool clamped = false;
  std::vector<AgreementStats> stats;  // on the original corpus
  std::vector<double> dist_after;     // D_{t+1}
};

struct BoostEnsemble {
  std::vector<std::shared_ptr<const ParserModel>> members;
  std::vector<double> alphas;
  std::vector<double> vote_weights;
  std::vector<BoostRound> rounds;
  std::string corpus_fingerprint;
  std::uint64_t master_seed = 0;
  BoostOptions options;
};

struct BoostOutcome {
  BoostEnsemble ensemble;
  bool aborted = false;  // unboostable round hit; rounds hold the partial trace
  int aborted_round = 0;
};

// Round t resamples the corpus by D_t with derive_seed(master, t), induces a
// member, parses the ORIGINAL corpus for stats, computes alpha_t and the next
// distribution. An unboostable round stops early with the partial trace.
BoostOutcome boost(const Corpus& corpus, int rounds, const ParserInduction& learner,
                   std::uint64_t master_seed, const BoostOptions& options = {});

// Weighted vote of the first `prefix` members (0 = all).
EnsemblePrediction boost_predict(const BoostEnsemble& ensemble,
                                 const std::vector<std::string>& sentence,
                                 std::size_t prefix = 0);

// Per-round scalars plus distribution snapshots; what trace.csv holds.
struct BoostTrace {
  struct Round {
    int t = 0;
    double alpha = 0, vote_weight = 0, z = 0;
    bool clamped = false;
    std::vector<double> dist;
  };
  std::size_t m = 0;
  std::vector<Round> rounds;
};

BoostTrace to_trace(const BoostEnsemble& ensemble);
// CSV schema: t,alpha,w,Z,clamped,entry,weight — m rows per round.
void save_trace_csv(const BoostTrace& trace, std::ostream& out);
BoostTrace load_trace_csv(std::istream& in);
BoostTrace load_trace_file(const std::string& path);

}  // namespace ensemble
