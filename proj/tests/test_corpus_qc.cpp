#include "doctest.h"

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ensemble/corpus_qc.hpp"
#include "fixtures.hpp"

using namespace ensemble;

namespace {

// Two same-span siblings with identical words but different expansions: a
// deterministic argmax parser can reproduce at most one of them, so the
// entry cannot be memorized even in isolation.
const char* kSelfConflicting = "(TOP (A (B (P x) (Q y)) (B (P x) (R y))))";

std::string plain_entry(int i) {
  std::string n = std::to_string(i);
  return "(TOP (S (N cat" + n + ") (V run" + n + ")))";
}

struct FailingInduction final : ParserInduction {
  std::shared_ptr<const ParserModel> induce(const Corpus&, std::uint64_t) const override {
    throw DataError("no model today");
  }
};

}  // namespace

TEST_CASE("an internally consistent entry is memorizable") {
  Corpus c = fixtures::corpus_of({plain_entry(0)});
  PcfgInduction learner;
  bool failed = true;
  CHECK(memorization_test(c.entries[0], learner, 10, &failed));
  CHECK(!failed);
  // the outcome is a pure function of the entry
  CHECK(memorization_test(c.entries[0], learner) ==
        memorization_test(c.entries[0], learner));
}

TEST_CASE("a self-conflicting entry is not memorizable") {
  Corpus c = fixtures::corpus_of({kSelfConflicting});
  PcfgInduction learner;
  bool failed = true;
  CHECK(!memorization_test(c.entries[0], learner, 10, &failed));
  CHECK(!failed);  // the learner worked; the entry itself is inconsistent
}

TEST_CASE("learner failures are reported as such") {
  Corpus c = fixtures::corpus_of({plain_entry(1)});
  FailingInduction bad;
  bool failed = false;
  CHECK(!memorization_test(c.entries[0], bad, 10, &failed));
  CHECK(failed);
  CHECK_THROWS_AS(memorization_test(c.entries[0], PcfgInduction{}, 0), DataError);
}

TEST_CASE("trimming removes exactly the inconsistent entries") {
  std::vector<std::string> texts;
  for (int i = 0; i < 50; ++i) texts.push_back(plain_entry(i));
  texts[13] = "(TOP (A (B (P xa) (Q ya)) (B (P xa) (R ya))))";
  texts[37] = "(TOP (A (B (P xb) (Q yb)) (B (P xb) (R yb))))";
  Corpus c = fixtures::corpus_of(texts);

  PcfgInduction learner;
  TrimResult r = trim_corpus(c, learner);
  REQUIRE((r.removed_indices == std::vector<std::size_t>{13, 37}));
  REQUIRE(r.reasons.size() == 2);
  for (const auto& reason : r.reasons) CHECK(reason == "not memorizable in isolation");
  REQUIRE(r.stable.size() == 48);
  REQUIRE(r.removed.size() == 2);

  // the two parts partition the input in original order
  std::size_t si = 0, ri = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (ri < r.removed_indices.size() && r.removed_indices[ri] == i) {
      CHECK(r.removed.entries[ri].gold == c.entries[i].gold);
      ++ri;
    } else {
      CHECK(r.stable.entries[si].gold == c.entries[i].gold);
      ++si;
    }
  }
  CHECK(si == r.stable.size());
  CHECK(ri == r.removed.size());
}

TEST_CASE("trimming an empty corpus yields empty parts") {
  TrimResult r = trim_corpus(Corpus{}, PcfgInduction{});
  CHECK(r.stable.empty());
  CHECK(r.removed.empty());
  CHECK(r.removed_indices.empty());
}

TEST_CASE("trimming blames the learner when induction dies") {
  Corpus c = fixtures::corpus_of({plain_entry(2), plain_entry(3)});
  FailingInduction bad;
  TrimResult r = trim_corpus(c, bad);
  CHECK(r.stable.empty());
  REQUIRE(r.reasons.size() == 2);
  for (const auto& reason : r.reasons)
    CHECK(reason == "learner failed on the isolated entry");
}

TEST_CASE("conflicting entries can each be fine alone but clash together") {
  Corpus c = fixtures::corpus_of({"(TOP (SA (K m) (L n)))", "(TOP (SB (K m) (L n)))"});
  PcfgInduction learner;
  CHECK(memorization_test(c.entries[0], learner));
  CHECK(memorization_test(c.entries[1], learner));

  // jointly the shared sentence has one argmax parse, so at most one entry
  // survives a model trained on both
  auto joint = induce_pcfg(c, 1);
  int reproduced = 0;
  for (const auto& e : c.entries) {
    ParseResult pr = joint->parse(e.sentence);
    if (!pr.fallback && pr.tree == e.gold) ++reproduced;
  }
  CHECK(reproduced <= 1);
}

TEST_CASE("rank bin means average the sorted weights per bin") {
  std::vector<double> w = {0.4, 0.3, 0.2, 0.1};
  std::vector<double> two = rank_bin_means(w, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(0.15).epsilon(1e-15));

  // input order is irrelevant
  std::vector<double> shuffled = {0.1, 0.4, 0.2, 0.3};
  CHECK(rank_bin_means(shuffled, 2) == two);

  // one bin per weight reproduces the sorted weights
  std::vector<double> each = rank_bin_means(shuffled, 4);
  CHECK((each == std::vector<double>{0.4, 0.3, 0.2, 0.1}));

  // more bins than weights clamps down
  CHECK(rank_bin_means(shuffled, 100) == each);

  // the last bin absorbs the remainder
  std::vector<double> five = {10, 8, 6, 4, 2};
  std::vector<double> bins2 = rank_bin_means(five, 2);
  REQUIRE(bins2.size() == 2);
  CHECK(bins2[0] == doctest::Approx(9.0));       // 10, 8
  CHECK(bins2[1] == doctest::Approx(4.0));       // 6, 4, 2

  CHECK_THROWS_AS(rank_bin_means({}, 2), DataError);
  CHECK_THROWS_AS(rank_bin_means(w, 0), DataError);
}

TEST_CASE("uniform weights give flat rank bins") {
  std::vector<double> w(5000, 1.0 / 5000);
  std::vector<double> bins = rank_bin_means(w, 10);
  for (double b : bins) CHECK(std::abs(b - 0.0002) <= 1e-15);
}

TEST_CASE("rank bin means are non-increasing") {
  Rng rng(88);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(1 + rng.bounded(200));
    for (auto& x : w) x = rng.uniform01();
    std::vector<double> bins = rank_bin_means(w, 1 + int(rng.bounded(12)));
    for (std::size_t i = 1; i < bins.size(); ++i) CHECK(bins[i] <= bins[i - 1] + 1e-15);
  }
}

TEST_CASE("weight rank curves start uniform and follow the trace") {
  BoostTrace trace;
  trace.m = 4;
  trace.rounds.push_back({1, 0.5, 0.7, 1.0, false, {0.4, 0.3, 0.2, 0.1}});
  trace.rounds.push_back({2, 0.25, 1.4, 1.0, false, {0.7, 0.1, 0.1, 0.1}});

  std::vector<WeightRankRow> rows = weight_rank_curves(trace, 2);
  REQUIRE(rows.size() == 6);  // 3 iterations x 2 bins

  // iteration 1 is the synthesized uniform start
  CHECK(rows[0].iteration == 1);
  CHECK(rows[0].bin == 0);
  CHECK(rows[0].mean_weight == doctest::Approx(0.25));
  CHECK(rows[1].bin == 1);
  CHECK(rows[1].mean_weight == doctest::Approx(0.25));

  // round t appears as iteration t+1
  CHECK(rows[2].iteration == 2);
  CHECK(rows[2].mean_weight == doctest::Approx(0.35));
  CHECK(rows[3].mean_weight == doctest::Approx(0.15));
  CHECK(rows[4].iteration == 3);
  CHECK(rows[4].mean_weight == doctest::Approx(0.4));
  CHECK(rows[5].mean_weight == doctest::Approx(0.1));

  // per-iteration bins never increase
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (i > 0 && rows[i].iteration == rows[i - 1].iteration)
      CHECK(rows[i].mean_weight <= rows[i - 1].mean_weight + 1e-15);

  CHECK_THROWS_AS(weight_rank_curves(BoostTrace{}, 2), DataError);
  BoostTrace no_entries;
  no_entries.m = 0;
  no_entries.rounds.push_back({1, 0.5, 0.7, 1.0, false, {}});
  CHECK_THROWS_AS(weight_rank_curves(no_entries, 2), DataError);
}

TEST_CASE("inconsistency ranking orders entries by final weight") {
  Corpus c = fixtures::corpus_of({plain_entry(0), plain_entry(1), plain_entry(2),
                                  plain_entry(3)});
  BoostTrace trace;
  trace.m = 4;
  trace.rounds.push_back({1, 0.5, 0.7, 1.0, false, {0.25, 0.25, 0.25, 0.25}});
  trace.rounds.push_back({2, 0.25, 1.4, 1.0, false, {0.1, 0.4, 0.1, 0.4}});

  std::vector<RankedEntry> ranked = rank_inconsistencies(trace, c);
  REQUIRE(ranked.size() == 4);
  // descending weight, ties broken by the lower index
  CHECK(ranked[0].index == 1);
  CHECK(ranked[1].index == 3);
  CHECK(ranked[2].index == 0);
  CHECK(ranked[3].index == 2);
  CHECK(ranked[0].weight == 0.4);
  CHECK(ranked[2].weight == 0.1);
  CHECK(ranked[0].tree_text == serialize(c.entries[1].gold));

  std::vector<RankedEntry> top2 = rank_inconsistencies(trace, c, 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0].index == 1);
  CHECK(top2[1].index == 3);

  // only the final round matters; the uniform round 1 is ignored
  std::vector<RankedEntry> all = rank_inconsistencies(trace, c, 100);
  CHECK(all.size() == 4);

  CHECK_THROWS_AS(rank_inconsistencies(BoostTrace{}, c), DataError);
  Corpus wrong = fixtures::corpus_of({plain_entry(0)});
  CHECK_THROWS_AS(rank_inconsistencies(trace, wrong), DataError);
}
