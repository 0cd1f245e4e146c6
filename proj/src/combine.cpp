#include "ensemble/combine.hpp"

#include <algorithm>
#include <cstdint>

namespace ensemble {

VoteTally tally_votes(const std::vector<std::set<Constituent>>& members,
                      const std::vector<double>& weights) {
  if (members.empty()) throw DataError("tally_votes: no members");
  if (!weights.empty() && weights.size() != members.size())
    throw DataError("tally_votes: " + std::to_string(weights.size()) + " weights for " +
                    std::to_string(members.size()) + " members");
  for (double w : weights)
    if (!(w > 0)) throw DataError("tally_votes: vote weight must be > 0");

  VoteTally tally;
  std::size_t seen = 0;
  for (std::size_t m = 0; m < members.size(); ++m) {
    double w = weights.empty() ? 1.0 : weights[m];
    tally.total_mass += w;
    for (const auto& c : members[m]) {
      auto [it, fresh] = tally.votes.try_emplace(c);
      if (fresh) it->second.first_seen = seen++;
      it->second.mass += w;
    }
  }
  return tally;
}

std::set<Constituent> majority_winners(const VoteTally& tally) {
  std::set<Constituent> out;
  for (const auto& [c, entry] : tally.votes)
    if (entry.mass * 2.0 > tally.total_mass) out.insert(c);
  return out;
}

std::set<Constituent> vote_unweighted(const std::vector<std::set<Constituent>>& members) {
  return majority_winners(tally_votes(members));
}

std::set<Constituent> vote_weighted(const std::vector<std::set<Constituent>>& members,
                                    const std::vector<double>& weights) {
  if (weights.size() != members.size())
    throw DataError("vote_weighted: weight list must match member list");
  return majority_winners(tally_votes(members, weights));
}

namespace {

// Tag of the preterminal over each word; empty where a member tree has a bare
// leaf directly under a phrasal node (that member abstains for the word).
std::uint32_t read_tags(const Tree& t, std::uint32_t pos, std::vector<std::string>& tags) {
  if (t.is_leaf()) return pos + 1;
  if (t.is_preterminal()) {
    if (pos < tags.size()) tags[pos] = t.label();
    return pos + 1;
  }
  for (const auto& c : t.children()) pos = read_tags(c, pos, tags);
  return pos;
}

struct BNode {
  const Constituent* span = nullptr;  // null for the added root
  std::string label;
  std::uint32_t start = 0, end = 0;
  int kind = 1;  // 0 = added root (outermost among equal spans)
  double mass = 0;
  std::size_t seen = 0;
  std::vector<std::size_t> kids;
};

}  // namespace

Tree build_tree(const std::set<Constituent>& winning, const VoteTally& tally,
                const std::vector<std::string>& sentence,
                const std::vector<Tree>& member_trees, const std::vector<double>& weights,
                const std::string& root_label) {
  if (sentence.empty()) throw DataError("build_tree: empty sentence");
  if (member_trees.empty()) throw DataError("build_tree: no member trees");
  if (!weights.empty() && weights.size() != member_trees.size())
    throw DataError("build_tree: weight list must match member list");
  const std::uint32_t n = static_cast<std::uint32_t>(sentence.size());

  std::vector<BNode> nodes;
  nodes.reserve(winning.size() + 1);
  bool have_root = false;
  for (const auto& c : winning) {
    if (!(c.start < c.end) || c.end > n)
      throw DataError("build_tree: constituent " + c.label + " [" + std::to_string(c.start) +
                      "," + std::to_string(c.end) + ") outside sentence of length " +
                      std::to_string(n));
    BNode b;
    b.span = &c;
    b.label = c.label;
    b.start = c.start;
    b.end = c.end;
    auto it = tally.votes.find(c);
    if (it != tally.votes.end()) {
      b.mass = it->second.mass;
      b.seen = it->second.first_seen;
    }
    if (c.label == root_label && c.start == 0 && c.end == n) {
      have_root = true;
      b.kind = 0;  // designated root stays outermost among full-span winners
    }
    nodes.push_back(std::move(b));
  }
  if (!have_root) {
    BNode b;
    b.label = root_label;
    b.end = n;
    b.kind = 0;
    nodes.push_back(std::move(b));
  }

  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const BNode& a = nodes[x];
    const BNode& b = nodes[y];
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end > b.end;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.mass != b.mass) return a.mass > b.mass;
    if (a.seen != b.seen) return a.seen < b.seen;
    return a.label < b.label;
  });

  std::vector<std::size_t> stack;
  std::size_t root_idx = order[0];
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    std::size_t v = order[oi];
    while (!stack.empty() && nodes[stack.back()].end <= nodes[v].start) stack.pop_back();
    if (!stack.empty()) {
      const BNode& top = nodes[stack.back()];
      if (nodes[v].end > top.end)
        throw DataError("build_tree: crossing constituents " + top.label + " and " +
                        nodes[v].label);
      nodes[stack.back()].kids.push_back(v);
    }
    stack.push_back(v);
  }

  // Preterminal plurality per word: mass-weighted, ties to the label proposed
  // by the lowest member index.
  std::vector<std::vector<std::string>> member_tags(member_trees.size());
  for (std::size_t m = 0; m < member_trees.size(); ++m) {
    member_tags[m].assign(n, std::string());
    std::uint32_t covered = read_tags(member_trees[m], 0, member_tags[m]);
    if (covered != n)
      throw DataError("build_tree: member " + std::to_string(m) + " covers " +
                      std::to_string(covered) + " words, sentence has " + std::to_string(n));
  }
  std::vector<std::string> tags(n);
  for (std::uint32_t pos = 0; pos < n; ++pos) {
    struct Acc {
      double mass = 0;
      std::size_t min_member = 0;
    };
    std::map<std::string, Acc> acc;
    for (std::size_t m = 0; m < member_trees.size(); ++m) {
      const std::string& t = member_tags[m][pos];
      if (t.empty()) continue;
      double w = weights.empty() ? 1.0 : weights[m];
      auto [it, fresh] = acc.try_emplace(t);
      if (fresh) it->second.min_member = m;
      it->second.mass += w;
    }
    const std::string* best = nullptr;
    double best_mass = -1;
    std::size_t best_member = 0;
    for (const auto& [label, a] : acc) {
      if (a.mass > best_mass || (a.mass == best_mass && a.min_member < best_member)) {
        best = &label;
        best_mass = a.mass;
        best_member = a.min_member;
      }
    }
    tags[pos] = best ? *best : "X";
  }

  // Emit, inserting preterminals at word positions not covered by any child.
  auto emit = [&](auto&& self, std::size_t idx) -> Tree {
    const BNode& b = nodes[idx];
    std::vector<Tree> children;
    std::uint32_t pos = b.start;
    auto add_leaves_until = [&](std::uint32_t stop) {
      for (; pos < stop; ++pos)
        children.push_back(Tree::node(tags[pos], {Tree::leaf(sentence[pos])}));
    };
    for (std::size_t k : b.kids) {
      add_leaves_until(nodes[k].start);
      children.push_back(self(self, k));
      pos = nodes[k].end;
    }
    add_leaves_until(b.end);
    return Tree::node(b.label, std::move(children));
  };
  return emit(emit, root_idx);
}

}  // namespace ensemble
