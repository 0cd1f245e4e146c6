#include "doctest.h"

#include <set>
#include <vector>

#include "ensemble/combine.hpp"
#include "fixtures.hpp"

using namespace ensemble;

namespace {

bool crossing(const Constituent& a, const Constituent& b) {
  return (a.start < b.start && b.start < a.end && a.end < b.end) ||
         (b.start < a.start && a.start < b.end && b.end < a.end);
}

bool pairwise_non_crossing(const std::set<Constituent>& set) {
  std::vector<Constituent> v(set.begin(), set.end());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (crossing(v[i], v[j])) return false;
  return true;
}

// Random ensemble of internally non-crossing sets over one sentence length.
std::vector<std::set<Constituent>> random_ensemble(Rng& rng, std::size_t k,
                                                   const std::vector<std::string>& sentence) {
  std::vector<std::set<Constituent>> members;
  members.reserve(k);
  for (std::size_t m = 0; m < k; ++m)
    members.push_back(constituents(fixtures::random_parse_over(rng, sentence),
                                   ScoringPolicy::count_everything()));
  return members;
}

}  // namespace

TEST_CASE("a single member wins its own vote") {
  std::set<Constituent> s{{"S", 0, 4}, {"NP", 0, 2}};
  CHECK(vote_unweighted({s}) == s);
}

TEST_CASE("strict majority of three members") {
  std::set<Constituent> a{{"S", 0, 4}, {"NP", 0, 2}, {"VP", 2, 4}};
  std::set<Constituent> b{{"S", 0, 4}, {"NP", 0, 1}, {"VP", 1, 4}};
  std::set<Constituent> c = a;
  CHECK(vote_unweighted({a, b, c}) == a);
}

TEST_CASE("with two members only unanimity survives") {
  std::set<Constituent> a{{"S", 0, 4}, {"NP", 0, 2}};
  std::set<Constituent> b{{"S", 0, 4}, {"VP", 2, 4}};
  CHECK((vote_unweighted({a, b}) == std::set<Constituent>{{"S", 0, 4}}));
}

TEST_CASE("voting over k copies of one set returns that set") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    auto sentence = fixtures::random_sentence(rng, 6);
    auto set = constituents(fixtures::random_parse_over(rng, sentence),
                            ScoringPolicy::count_everything());
    std::size_t k = 1 + rng.bounded(6);
    std::vector<std::set<Constituent>> members(k, set);
    CHECK(vote_unweighted(members) == set);
  }
}

TEST_CASE("weighted voting thresholds on half the total mass") {
  std::set<Constituent> c1{{"A", 0, 2}};
  std::set<Constituent> c2{{"A", 0, 2}, {"B", 2, 4}};
  std::set<Constituent> c3{{"B", 2, 4}};
  // B has mass 0.2 + 0.1 = 0.3, not above half of 1.0
  auto out = vote_weighted({c1, c2, c3}, {0.7, 0.2, 0.1});
  CHECK((out == std::set<Constituent>{{"A", 0, 2}}));
  // a dominant member out-votes the other two combined
  std::set<Constituent> d1{{"X", 0, 3}};
  std::set<Constituent> d2{{"Y", 0, 2}};
  std::set<Constituent> d3{{"Y", 0, 2}};
  CHECK(vote_weighted({d1, d2, d3}, {1.0, 0.1, 0.1}) == d1);
}

TEST_CASE("exactly half the mass loses") {
  std::set<Constituent> a{{"A", 0, 2}};
  std::set<Constituent> b;
  CHECK(vote_unweighted({a, b}).empty());
  CHECK(vote_weighted({a, b}, {1.0, 1.0}).empty());
  CHECK(vote_weighted({a, b}, {1.0 + 1e-9, 1.0}) == a);
}

TEST_CASE("equal weights reduce weighted voting to unweighted") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    auto sentence = fixtures::random_sentence(rng, 6);
    auto members = random_ensemble(rng, 2 + rng.bounded(5), sentence);
    std::vector<double> w(members.size(), 0.37);
    CHECK(vote_weighted(members, w) == vote_unweighted(members));
  }
}

TEST_CASE("vote inputs are validated") {
  CHECK_THROWS_AS(vote_unweighted({}), DataError);
  std::set<Constituent> s{{"A", 0, 1}};
  CHECK_THROWS_AS(vote_weighted({s}, {}), DataError);
  CHECK_THROWS_AS(vote_weighted({s}, {0.0}), DataError);
  CHECK_THROWS_AS(vote_weighted({s}, {-1.0}), DataError);
  CHECK_THROWS_AS(vote_weighted({s, s}, {1.0}), DataError);
}

TEST_CASE("tally counts each member once per constituent") {
  std::set<Constituent> a{{"NP", 0, 2}, {"VP", 2, 4}};
  std::set<Constituent> b{{"NP", 0, 2}};
  VoteTally tally = tally_votes({a, b});
  CHECK(tally.total_mass == 2.0);
  CHECK(tally.votes.at(Constituent{"NP", 0, 2}).mass == 2.0);
  CHECK(tally.votes.at(Constituent{"VP", 2, 4}).mass == 1.0);
  CHECK(tally.votes.at(Constituent{"NP", 0, 2}).first_seen <
        tally.votes.at(Constituent{"VP", 2, 4}).first_seen);
}

TEST_CASE("winners never cross") {
  Rng rng(314159);
  int nonempty = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto sentence = fixtures::random_sentence(rng);
    std::size_t k = 2 + rng.bounded(8);
    auto members = random_ensemble(rng, k, sentence);
    for (const auto& m : members) REQUIRE(pairwise_non_crossing(m));
    std::vector<double> weights(k);
    for (auto& w : weights) w = 0.05 + 2.0 * rng.uniform01();
    auto unweighted = vote_unweighted(members);
    auto weighted = vote_weighted(members, weights);
    REQUIRE(pairwise_non_crossing(unweighted));
    REQUIRE(pairwise_non_crossing(weighted));
    if (!weighted.empty()) ++nonempty;
  }
  CHECK(nonempty > 0);  // the property was not vacuous
}

TEST_CASE("removing a non-voter never ejects a winner") {
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    auto sentence = fixtures::random_sentence(rng, 5);
    std::size_t k = 3 + rng.bounded(5);
    auto members = random_ensemble(rng, k, sentence);
    auto winners = vote_unweighted(members);
    for (const auto& c : winners) {
      for (std::size_t m = 0; m < members.size(); ++m) {
        if (members[m].count(c)) continue;
        auto reduced = members;
        reduced.erase(reduced.begin() + std::ptrdiff_t(m));
        CHECK(vote_unweighted(reduced).count(c) == 1);
        break;
      }
    }
  }
}

TEST_CASE("build_tree rebuilds the majority tree with voted tags") {
  Tree t1 = fixtures::tree_of("(TOP (S (NP (A w0) (A w1)) (VP (B w2) (B w3))))");
  Tree t2 = fixtures::tree_of("(TOP (S (NP (A w0)) (VP (B w1) (B w2) (B w3))))");
  Tree t3 = t1;
  // vote over phrasal spans the way prediction does; tags are voted separately
  ScoringPolicy voting = ScoringPolicy{}.for_voting();
  std::vector<std::set<Constituent>> sets = {constituents(t1, voting), constituents(t2, voting),
                                             constituents(t3, voting)};
  VoteTally tally = tally_votes(sets);
  auto winners = majority_winners(tally);
  std::vector<std::string> sentence{"w0", "w1", "w2", "w3"};
  Tree combined = build_tree(winners, tally, sentence, {t1, t2, t3}, {}, "TOP");
  CHECK(combined == t1);
}

TEST_CASE("an empty winning set yields a flat tree under the root") {
  Tree t1 = fixtures::tree_of("(TOP (S (A x) (B y)))");
  Tree t2 = fixtures::tree_of("(TOP (S (A x) (C y)))");
  VoteTally tally = tally_votes({{}, {}});
  Tree out = build_tree({}, tally, {"x", "y"}, {t1, t2}, {}, "TOP");
  CHECK(out.label() == "TOP");
  REQUIRE(out.children().size() == 2);
  CHECK(out.children()[0].label() == "A");
  // B vs C tie on word 2 goes to the lower member index
  CHECK(out.children()[1].label() == "B");
}

TEST_CASE("a winning root is not wrapped again") {
  Tree t = fixtures::tree_of("(TOP (A x) (B y))");
  std::set<Constituent> winners{{"TOP", 0, 2}};
  VoteTally tally = tally_votes({winners});
  Tree out = build_tree(winners, tally, {"x", "y"}, {t}, {}, "TOP");
  CHECK(out.label() == "TOP");
  REQUIRE(out.children().size() == 2);
  CHECK(out.children()[0].is_preterminal());
}

TEST_CASE("equal spans nest by descending vote mass") {
  std::set<Constituent> m1{{"X", 0, 2}, {"Y", 0, 2}};
  std::set<Constituent> m2 = m1;
  std::set<Constituent> m3{{"X", 0, 2}};
  Tree t = fixtures::tree_of("(TOP (X (N x) (N y)))");
  VoteTally tally = tally_votes({m1, m2, m3});
  auto winners = majority_winners(tally);
  REQUIRE(winners.size() == 2);
  Tree out = build_tree(winners, tally, {"x", "y"}, {t, t, t}, {}, "TOP");
  // X carries mass 3, Y mass 2, so X wraps Y
  CHECK(serialize(out) == "(TOP (X (Y (N x) (N y))))");
}

TEST_CASE("crossing constituents are rejected by reconstruction") {
  std::set<Constituent> bad{{"A", 0, 2}, {"B", 1, 3}};
  Tree t = fixtures::tree_of("(TOP (A (N x) (N y)) (N z))");
  VoteTally tally = tally_votes({bad});
  CHECK_THROWS_AS(build_tree(bad, tally, {"x", "y", "z"}, {t}, {}, "TOP"), DataError);
  std::set<Constituent> outside{{"A", 0, 9}};
  CHECK_THROWS_AS(build_tree(outside, tally, {"x", "y", "z"}, {t}, {}, "TOP"), DataError);
}

TEST_CASE("reconstruction keeps every winning constituent") {
  Rng rng(616);
  for (int trial = 0; trial < 100; ++trial) {
    auto sentence = fixtures::random_sentence(rng);
    std::size_t k = 1 + 2 * rng.bounded(3);  // odd, so majorities are common
    std::vector<Tree> trees;
    std::vector<std::set<Constituent>> sets;
    for (std::size_t m = 0; m < k; ++m) {
      trees.push_back(fixtures::random_parse_over(rng, sentence));
      sets.push_back(constituents(trees.back(), ScoringPolicy::count_everything()));
    }
    VoteTally tally = tally_votes(sets);
    auto winners = majority_winners(tally);
    Tree out = build_tree(winners, tally, sentence, trees, {}, "TOP");
    CHECK(out.yield() == sentence);
    auto rebuilt = constituents(out, ScoringPolicy::count_everything());
    for (const auto& c : winners) REQUIRE(rebuilt.count(c) == 1);
  }
}
