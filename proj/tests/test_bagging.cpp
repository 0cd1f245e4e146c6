#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ensemble/bagging.hpp"
#include "ensemble/experiments.hpp"
#include "fixtures.hpp"

using namespace ensemble;

namespace {

Corpus builtin_corpus(std::size_t n, std::uint64_t seed) {
  return synth_corpus(SynthGrammar::builtin(), n, 0.0, seed).corpus;
}

Corpus distinct_corpus(std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i)
    c.add(Tree::node("TOP", {Tree::node("A", {Tree::leaf("w" + std::to_string(i))})}));
  return c;
}

std::string model_text(const ParserModel& m) {
  std::ostringstream out;
  m.save(out);
  return out.str();
}

struct ThrowingInduction final : ParserInduction {
  std::shared_ptr<const ParserModel> induce(const Corpus&, std::uint64_t) const override {
    throw DataError("boom");
  }
};

}  // namespace

TEST_CASE("a bootstrap replicate draws from the original with replacement") {
  Corpus c = distinct_corpus(50);
  std::set<std::string> originals;
  for (const auto& e : c.entries) originals.insert(serialize(e.gold));

  Rng rng(5);
  Corpus rep = bootstrap_replicate(c, rng);
  REQUIRE(rep.size() == c.size());
  for (const auto& e : rep.entries) CHECK(originals.count(serialize(e.gold)) == 1);

  Rng again(5);
  CHECK(bootstrap_replicate(c, again).fingerprint() == rep.fingerprint());
  Rng other(6);
  CHECK(bootstrap_replicate(c, other).fingerprint() != rep.fingerprint());

  Corpus one = distinct_corpus(1);
  Rng tiny(1);
  CHECK(bootstrap_replicate(one, tiny).entries[0].gold == one.entries[0].gold);

  Corpus empty;
  Rng r(1);
  CHECK_THROWS_AS(bootstrap_replicate(empty, r), DataError);
}

TEST_CASE("a replicate keeps about 63 percent distinct entries") {
  // E[distinct/m] = 1 - (1 - 1/m)^m -> 1 - 1/e for large m
  Corpus c = distinct_corpus(5000);
  double sum = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    Corpus rep = bootstrap_replicate(c, rng);
    std::set<std::string> distinct;
    for (const auto& e : rep.entries) distinct.insert(serialize(e.gold));
    sum += double(distinct.size()) / double(rep.size());
  }
  double mean = sum / 20.0;
  CHECK(std::abs(mean - (1.0 - std::exp(-1.0))) < 0.02);
}

TEST_CASE("bagged members are seeded from the master seed by position") {
  Corpus c = builtin_corpus(60, 11);
  PcfgInduction learner;
  BagEnsemble e = train_bagged(c, 3, learner, 944);
  REQUIRE(e.members.size() == 3);
  REQUIRE(e.member_seeds.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(e.member_seeds[i] == derive_seed(944, i + 1));
  CHECK(e.corpus_fingerprint == c.fingerprint());
  CHECK(e.params.k == 3);
  CHECK(e.params.master_seed == 944);
}

TEST_CASE("a smaller ensemble is a prefix of a larger one") {
  Corpus c = builtin_corpus(60, 11);
  PcfgInduction learner;
  BagEnsemble small = train_bagged(c, 5, learner, 77);
  BagEnsemble large = train_bagged(c, 9, learner, 77);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(small.member_seeds[i] == large.member_seeds[i]);
    CHECK(model_text(*small.members[i]) == model_text(*large.members[i]));
  }
}

TEST_CASE("resampling actually diversifies the members") {
  Corpus c = builtin_corpus(200, 1);
  PcfgInduction learner;
  BagEnsemble e = train_bagged(c, 15, learner, 1);
  std::set<std::string> distinct;
  for (const auto& m : e.members) distinct.insert(model_text(*m));
  CHECK(distinct.size() >= 14);
}

TEST_CASE("ensemble fingerprints track the training configuration") {
  Corpus c = builtin_corpus(40, 2);
  PcfgInduction learner;
  BagEnsemble a = train_bagged(c, 3, learner, 10);
  BagEnsemble b = train_bagged(c, 3, learner, 10);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(train_bagged(c, 3, learner, 11).fingerprint() != a.fingerprint());
  CHECK(train_bagged(c, 4, learner, 10).fingerprint() != a.fingerprint());
  Corpus c2 = builtin_corpus(40, 3);
  CHECK(train_bagged(c2, 3, learner, 10).fingerprint() != a.fingerprint());
}

TEST_CASE("training surfaces member failures by replicate number") {
  Corpus c = builtin_corpus(10, 4);
  ThrowingInduction bad;
  CHECK_THROWS_WITH_AS(train_bagged(c, 2, bad, 1),
                       doctest::Contains("replicate 1"), DataError);
  CHECK_THROWS_AS(train_bagged(c, 0, PcfgInduction{}, 1), DataError);
  CHECK_THROWS_AS(train_bagged(Corpus{}, 2, PcfgInduction{}, 1), DataError);
}

TEST_CASE("a one-member ensemble votes like its only member") {
  Corpus c = builtin_corpus(80, 6);
  PcfgInduction learner;
  BagEnsemble e = train_bagged(c, 1, learner, 3);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& sentence = c.entries[i].sentence;
    EnsemblePrediction pred = bag_predict(e, sentence);
    CHECK(pred.tree == e.members[0]->parse(sentence).tree);
  }
}

TEST_CASE("prefix selects the leading members only") {
  Corpus c = builtin_corpus(100, 8);
  PcfgInduction learner;
  BagEnsemble e = train_bagged(c, 5, learner, 21);
  const auto& sentence = c.entries[0].sentence;

  EnsemblePrediction all = bag_predict(e, sentence);
  CHECK(bag_predict(e, sentence, 5).tree == all.tree);
  CHECK(bag_predict(e, sentence, 0).tree == all.tree);

  BagEnsemble first = train_bagged(c, 1, learner, 21);
  CHECK(bag_predict(e, sentence, 1).tree == bag_predict(first, sentence).tree);

  CHECK_THROWS_AS(bag_predict(e, sentence, 6), DataError);
  CHECK_THROWS_AS(bag_predict(e, {}, 1), DataError);
}

TEST_CASE("combine_members reports how many members fell back") {
  Tree t = fixtures::tree_of("(TOP (A (B x) (C y)))");
  std::vector<ParseResult> parses = {{t, false}, {t, true}, {t, true}};
  EnsemblePrediction pred = combine_members(parses, {}, {"x", "y"}, ScoringPolicy{});
  CHECK(pred.member_fallbacks == 2);
  CHECK(pred.tree == t);
}

TEST_CASE("the prefix curve scores every ensemble size once") {
  Corpus train = builtin_corpus(80, 31);
  Corpus test = builtin_corpus(40, 32);
  PcfgInduction learner;
  BagEnsemble e = train_bagged(train, 3, learner, 9);
  EnsembleCurve curve = evaluate_curve(e, train, test);

  REQUIRE(curve.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(curve.rows[i].prefix == i + 1);
  CHECK(curve.initial_prefix == 1);
  CHECK(curve.final_prefix == 3);

  // accessors agree with a recomputed argmax (ties to the smallest prefix)
  std::size_t best_train = 1, best_test = 1;
  for (const auto& row : curve.rows) {
    if (row.train.f > curve.rows[best_train - 1].train.f) best_train = row.prefix;
    if (row.test.f > curve.rows[best_test - 1].test.f) best_test = row.prefix;
  }
  CHECK(curve.best_train_prefix == best_train);
  CHECK(curve.best_test_prefix == best_test);
  CHECK(curve.train_best_f_test().f == curve.rows[best_train - 1].test.f);
  CHECK(curve.test_best_f_test().f == curve.rows[best_test - 1].test.f);
  CHECK(curve.initial().prefix == 1);
  CHECK(curve.final_row().prefix == 3);
  CHECK(curve.best_f().prefix == curve.best_test_prefix);

  for (const auto& row : curve.rows) {
    CHECK(row.train.f >= 0);
    CHECK(row.train.f <= 100);
    CHECK(row.test.f >= 0);
    CHECK(row.test.f <= 100);
  }
}

TEST_CASE("curve rows only depend on the member prefix") {
  Corpus train = builtin_corpus(60, 41);
  Corpus test = builtin_corpus(30, 42);
  PcfgInduction learner;
  EnsembleCurve five = evaluate_curve(train_bagged(train, 5, learner, 13), train, test);
  EnsembleCurve nine = evaluate_curve(train_bagged(train, 9, learner, 13), train, test);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(five.rows[i].train.f == nine.rows[i].train.f);
    CHECK(five.rows[i].test.f == nine.rows[i].test.f);
    CHECK(five.rows[i].test.exact == nine.rows[i].test.exact);
  }
}

TEST_CASE("a one-member curve has a single row that is its own summary") {
  Corpus train = builtin_corpus(40, 51);
  Corpus test = builtin_corpus(20, 52);
  PcfgInduction learner;
  EnsembleCurve curve = evaluate_curve(train_bagged(train, 1, learner, 2), train, test);
  REQUIRE(curve.rows.size() == 1);
  CHECK(curve.initial_prefix == 1);
  CHECK(curve.final_prefix == 1);
  CHECK(curve.best_train_prefix == 1);
  CHECK(curve.best_test_prefix == 1);
}

TEST_CASE("unit weights reproduce the unweighted curve") {
  Corpus train = builtin_corpus(50, 61);
  Corpus test = builtin_corpus(25, 62);
  PcfgInduction learner;
  BagEnsemble e = train_bagged(train, 3, learner, 7);
  auto train_parses = parse_all_members(e.members, train);
  auto test_parses = parse_all_members(e.members, test);
  EnsembleCurve plain =
      prefix_curve(train_parses, test_parses, train, test, {}, e.params.policy);
  EnsembleCurve unit =
      prefix_curve(train_parses, test_parses, train, test, {1.0, 1.0, 1.0}, e.params.policy);
  REQUIRE(plain.rows.size() == unit.rows.size());
  for (std::size_t i = 0; i < plain.rows.size(); ++i) {
    CHECK(plain.rows[i].train.f == unit.rows[i].train.f);
    CHECK(plain.rows[i].test.f == unit.rows[i].test.f);
  }
}
