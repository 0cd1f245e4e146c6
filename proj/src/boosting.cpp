#include "ensemble/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ensemble/errors.hpp"
#include "ensemble/parallel.hpp"

namespace ensemble {

Distribution Distribution::uniform(std::size_t m) {
  if (m == 0) throw DataError("distribution over empty corpus");
  Distribution d;
  d.w.assign(m, 1.0 / double(m));
  return d;
}

void Distribution::validate() const {
  if (w.empty()) throw DataError("empty distribution");
  double sum = 0;
  for (double x : w) {
    if (!(x >= 0)) throw DataError("distribution has a negative or NaN weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("distribution does not sum to 1");
}

Corpus weighted_resample(const Corpus& corpus, const Distribution& dist, Rng& rng) {
  dist.validate();
  if (dist.size() != corpus.size()) throw DataError("distribution size does not match corpus");
  std::vector<double> cdf(dist.w.size());
  double acc = 0;
  for (std::size_t i = 0; i < dist.w.size(); ++i) {
    acc += dist.w[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;  // guard against rounding shortfall at the top

  Corpus out;
  out.entries.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    double u = rng.uniform01();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t pick = std::size_t(it - cdf.begin());
    if (pick >= corpus.size()) pick = corpus.size() - 1;
    out.entries.push_back(corpus.entries[pick]);
  }
  return out;
}

AgreementStats agreement_stats(const Tree& gold, const Tree& hyp, const ScoringPolicy& policy) {
  PairCounts c = score_pair(gold, hyp, policy);
  AgreementStats s;
  s.union_size = c.union_size();
  s.agreements = c.a;
  s.disagreements = c.b + c.c;
  return s;
}

double compute_alpha_ca(const std::vector<AgreementStats>& stats, const Distribution& dist,
                        bool* clamped, int round) {
  if (stats.size() != dist.size()) throw DataError("stats/distribution size mismatch");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const AgreementStats& s = stats[i];
    if (s.union_size <= 0) continue;  // nothing to agree or disagree about
    double scale = dist.w[i] / double(s.union_size);
    num += scale * double(s.disagreements);
    den += scale * double(s.agreements);
  }
  if (den <= 0) throw UnboostableRoundError(round);
  double alpha = num / den;
  bool hit = false;
  if (alpha < kAlphaClampMin) {
    alpha = kAlphaClampMin;
    hit = true;
  } else if (alpha > kAlphaClampMax) {
    alpha = kAlphaClampMax;
    hit = true;
  }
  if (clamped) *clamped = hit;
  return alpha;
}

UpdateResult update_distribution(const Distribution& dist, double alpha,
                                 const std::vector<AgreementStats>& stats) {
  if (stats.size() != dist.size()) throw DataError("stats/distribution size mismatch");
  UpdateResult r;
  r.next.w.resize(dist.size());
  double z = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const AgreementStats& s = stats[i];
    double factor = s.union_size > 0
                        ? alpha * double(s.union_size) + (1.0 - alpha) * double(s.disagreements)
                        : alpha;
    double u = dist.w[i] * factor;
    r.next.w[i] = u;
    z += u;
  }
  if (!(z > 0)) throw DataError("distribution update collapsed to zero mass");
  for (double& x : r.next.w) x /= z;
  r.z = z;
  return r;
}

BoostOutcome boost(const Corpus& corpus, int rounds, const ParserInduction& learner,
                   std::uint64_t master_seed, const BoostOptions& options) {
  if (corpus.entries.empty()) throw DataError("cannot boost on an empty corpus");
  if (rounds < 1) throw DataError("boosting needs at least one round");
  if (options.alpha_rule != "ca")
    throw DataError("unknown alpha rule: " + options.alpha_rule);

  BoostOutcome outcome;
  BoostEnsemble& ens = outcome.ensemble;
  ens.corpus_fingerprint = corpus.fingerprint();
  ens.master_seed = master_seed;
  ens.options = options;

  const std::size_t m = corpus.size();
  Distribution dist = Distribution::uniform(m);

  for (int t = 1; t <= rounds; ++t) {
    std::uint64_t round_seed = derive_seed(master_seed, std::uint64_t(t));
    Rng rng(round_seed);
    Corpus sample = weighted_resample(corpus, dist, rng);
    std::shared_ptr<const ParserModel> model;
    try {
      model = learner.induce(sample, round_seed);
    } catch (const DataError& e) {
      throw DataError("boost round " + std::to_string(t) + ": " + e.what());
    }

    std::vector<AgreementStats> stats(m);
    parallel_for(m, [&](std::size_t i) {
      const CorpusEntry& entry = corpus.entries[i];
      ParseResult pr = model->parse(entry.sentence);
      stats[i] = agreement_stats(entry.gold, pr.tree, options.policy);
    });

    double alpha = 0;
    bool clamped = false;
    try {
      alpha = compute_alpha_ca(stats, dist, &clamped, t);
    } catch (const UnboostableRoundError&) {
      outcome.aborted = true;
      outcome.aborted_round = t;
      return outcome;
    }

    UpdateResult upd = update_distribution(dist, alpha, stats);
    double w = options.literal_alpha_vote ? alpha : std::log(1.0 / alpha);

    BoostRound round;
    round.t = t;
    round.alpha = alpha;
    round.vote_weight = w;
    round.z = upd.z;
    round.clamped = clamped;
    round.stats = std::move(stats);
    round.dist_after = upd.next.w;

    ens.members.push_back(std::move(model));
    ens.alphas.push_back(alpha);
    ens.vote_weights.push_back(w);
    ens.rounds.push_back(std::move(round));
    dist = std::move(upd.next);
  }
  return outcome;
}

EnsemblePrediction boost_predict(const BoostEnsemble& ensemble,
                                 const std::vector<std::string>& sentence, std::size_t prefix) {
  if (ensemble.members.empty()) throw DataError("ensemble has no members");
  std::size_t k = prefix == 0 ? ensemble.members.size() : prefix;
  if (k > ensemble.members.size()) throw DataError("prefix exceeds ensemble size");

  std::vector<ParseResult> parses;
  parses.reserve(k);
  std::vector<double> weights(ensemble.vote_weights.begin(),
                              ensemble.vote_weights.begin() + std::ptrdiff_t(k));
  for (std::size_t i = 0; i < k; ++i) parses.push_back(ensemble.members[i]->parse(sentence));
  return combine_members(parses, weights, sentence, ensemble.options.policy);
}

BoostTrace to_trace(const BoostEnsemble& ensemble) {
  BoostTrace trace;
  for (const BoostRound& r : ensemble.rounds) {
    trace.m = r.dist_after.size();
    BoostTrace::Round row;
    row.t = r.t;
    row.alpha = r.alpha;
    row.vote_weight = r.vote_weight;
    row.z = r.z;
    row.clamped = r.clamped;
    row.dist = r.dist_after;
    trace.rounds.push_back(std::move(row));
  }
  return trace;
}

namespace {

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void save_trace_csv(const BoostTrace& trace, std::ostream& out) {
  out << "t,alpha,w,Z,clamped,entry,weight\n";
  for (const BoostTrace::Round& r : trace.rounds) {
    for (std::size_t i = 0; i < r.dist.size(); ++i) {
      out << r.t << ',' << fmt_g17(r.alpha) << ',' << fmt_g17(r.vote_weight) << ','
          << fmt_g17(r.z) << ',' << (r.clamped ? 1 : 0) << ',' << i << ','
          << fmt_g17(r.dist[i]) << '\n';
    }
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_field(const std::string& s, const char* what, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError("trace line " + std::to_string(line_no) + ": bad " + std::string(what));
  }
}

long long parse_int_field(const std::string& s, const char* what, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError("trace line " + std::to_string(line_no) + ": bad " + std::string(what));
  }
}

}  // namespace

BoostTrace load_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("trace file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,alpha,w,Z,clamped,entry,weight")
    throw DataError("trace file has an unexpected header");

  BoostTrace trace;
  BoostTrace::Round* cur = nullptr;
  std::size_t line_no = 1;
  long long expect_entry = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 7)
      throw DataError("trace line " + std::to_string(line_no) + ": expected 7 fields");
    long long t = parse_int_field(f[0], "round", line_no);
    double alpha = parse_double_field(f[1], "alpha", line_no);
    double w = parse_double_field(f[2], "vote weight", line_no);
    double z = parse_double_field(f[3], "Z", line_no);
    long long clamped = parse_int_field(f[4], "clamped flag", line_no);
    long long entry = parse_int_field(f[5], "entry", line_no);
    double weight = parse_double_field(f[6], "weight", line_no);
    if (clamped != 0 && clamped != 1)
      throw DataError("trace line " + std::to_string(line_no) + ": clamped must be 0 or 1");

    if (cur == nullptr || t != cur->t) {
      long long expect_t = trace.rounds.empty() ? 1 : trace.rounds.back().t + 1;
      if (t != expect_t)
        throw DataError("trace line " + std::to_string(line_no) + ": rounds out of order");
      if (cur != nullptr && trace.m != cur->dist.size())
        throw DataError("trace round " + std::to_string(cur->t) + " has wrong entry count");
      trace.rounds.emplace_back();
      cur = &trace.rounds.back();
      cur->t = int(t);
      cur->alpha = alpha;
      cur->vote_weight = w;
      cur->z = z;
      cur->clamped = clamped == 1;
      expect_entry = 0;
    } else if (alpha != cur->alpha || w != cur->vote_weight || z != cur->z ||
               (clamped == 1) != cur->clamped) {
      throw DataError("trace line " + std::to_string(line_no) +
                      ": round scalars change mid-round");
    }
    if (entry != expect_entry)
      throw DataError("trace line " + std::to_string(line_no) + ": entries out of order");
    ++expect_entry;
    cur->dist.push_back(weight);
    if (trace.rounds.size() == 1) trace.m = cur->dist.size();
  }
  if (trace.rounds.empty()) throw DataError("trace file has no rounds");
  if (cur != nullptr && trace.m != cur->dist.size())
    throw DataError("trace round " + std::to_string(cur->t) + " has wrong entry count");
  for (const BoostTrace::Round& r : trace.rounds) {
    Distribution d{r.dist};
    d.validate();
  }
  return trace;
}

BoostTrace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace file: " + path);
  return load_trace_csv(in);
}

}  // namespace ensemble
