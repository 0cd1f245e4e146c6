#pragma once

#include <map>
#include <string>
#include <vector>

#include "ensemble/treebank.hpp"

namespace ensemble {

// Accumulated vote mass per constituent across ensemble members. first_seen
// is the order of first appearance (member order, then constituent order
// within a member); it breaks nesting ties in build_tree.
struct VoteTally {
  struct Entry {
    double mass = 0;
    std::size_t first_seen = 0;
  };
  std::map<Constituent, Entry> votes;
  double total_mass = 0;
};

// weights empty = every member weighs 1. Throws on an empty member list, a
// weight list of the wrong length, or a weight <= 0.
VoteTally tally_votes(const std::vector<std::set<Constituent>>& members,
                      const std::vector<double>& weights = {});

// Constituents with strictly more than half of the total mass. Any two
// winners then jointly appear in some member, so winners never cross.
std::set<Constituent> majority_winners(const VoteTally& tally);

std::set<Constituent> vote_unweighted(const std::vector<std::set<Constituent>>& members);
std::set<Constituent> vote_weighted(const std::vector<std::set<Constituent>>& members,
                                    const std::vector<double>& weights);

// Rebuilds a tree from a non-crossing constituent set over `sentence`:
//   - a root node labeled root_label over the full span is added if absent;
//   - each word gets a preterminal chosen by plurality over the member trees'
//     tags (mass = member weight; ties go to the lowest member index);
//   - equal spans nest by descending vote mass, then first appearance.
// member_trees supply the preterminal votes; weights as in tally_votes.
// Throws DataError on crossing constituents or spans outside the sentence.
Tree build_tree(const std::set<Constituent>& winning, const VoteTally& tally,
                const std::vector<std::string>& sentence,
                const std::vector<Tree>& member_trees, const std::vector<double>& weights,
                const std::string& root_label);

}  // namespace ensemble
