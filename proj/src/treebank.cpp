#include "ensemble/treebank.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ensemble {

namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

void check_symbol(const std::string& s, const char* what) {
  if (s.empty()) throw DataError(std::string(what) + " is empty");
  for (char c : s)
    if (c == '(' || c == ')' || is_ws(c))
      throw DataError(std::string(what) + " '" + s + "' contains whitespace or brackets");
}

}  // namespace

Tree Tree::leaf(std::string token) {
  check_symbol(token, "token");
  Tree t;
  t.text_ = std::move(token);
  t.leaf_ = true;
  return t;
}

Tree Tree::node(std::string label, std::vector<Tree> children) {
  check_symbol(label, "label");
  if (children.empty()) throw DataError("node '" + label + "' has no children");
  Tree t;
  t.text_ = std::move(label);
  t.children_ = std::move(children);
  return t;
}

std::size_t Tree::leaf_count() const {
  if (leaf_) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

void Tree::yield_into(std::vector<std::string>& out) const {
  if (leaf_) {
    out.push_back(text_);
    return;
  }
  for (const auto& c : children_) c.yield_into(out);
}

std::vector<std::string> Tree::yield() const {
  std::vector<std::string> out;
  out.reserve(leaf_count());
  yield_into(out);
  return out;
}

bool Tree::operator==(const Tree& other) const {
  return leaf_ == other.leaf_ && text_ == other.text_ && children_ == other.children_;
}

std::vector<Tree> parse_bracketed(std::string_view text) {
  struct Frame {
    std::string label;
    std::vector<Tree> children;
  };
  std::vector<Frame> stack;
  std::vector<Tree> done;
  const std::size_t n = text.size();
  std::size_t i = 0;

  auto scan_symbol = [&]() {
    std::size_t s = i;
    while (i < n && text[i] != '(' && text[i] != ')' && !is_ws(text[i])) ++i;
    return std::string(text.substr(s, i - s));
  };

  while (true) {
    while (i < n && is_ws(text[i])) ++i;
    if (i == n) break;
    char c = text[i];
    if (c == '(') {
      ++i;
      while (i < n && is_ws(text[i])) ++i;
      if (i == n) throw BracketParseError("unexpected end of input, expected label", n + 1);
      if (text[i] == '(') throw BracketParseError("label-less internal node", i + 1);
      if (text[i] == ')') throw BracketParseError("empty node", i + 1);
      stack.push_back(Frame{scan_symbol(), {}});
    } else if (c == ')') {
      if (stack.empty()) throw BracketParseError("unbalanced ')'", i + 1);
      if (stack.back().children.empty())
        throw BracketParseError("node '" + stack.back().label + "' has no children", i + 1);
      Tree t = Tree::node(std::move(stack.back().label), std::move(stack.back().children));
      stack.pop_back();
      if (stack.empty())
        done.push_back(std::move(t));
      else
        stack.back().children.push_back(std::move(t));
      ++i;
    } else {
      if (stack.empty()) throw BracketParseError("token outside any node", i + 1);
      stack.back().children.push_back(Tree::leaf(scan_symbol()));
    }
  }
  if (!stack.empty())
    throw BracketParseError("unbalanced: " + std::to_string(stack.size()) + " unclosed '('",
                            n + 1);
  return done;
}

namespace {

void serialize_into(const Tree& t, std::string& out) {
  if (t.is_leaf()) {
    out += t.token();
    return;
  }
  out += '(';
  out += t.label();
  for (const auto& c : t.children()) {
    out += ' ';
    serialize_into(c, out);
  }
  out += ')';
}

// Walks the tree tracking word positions among non-deleted words. Returns the
// position after this subtree.
std::uint32_t collect_constituents(const Tree& t, std::uint32_t pos,
                                   const ScoringPolicy& pol, std::set<Constituent>& out) {
  if (t.is_leaf()) return pos + 1;
  if (t.is_preterminal() && pol.is_punct(t.label())) return pos;  // word deleted
  std::uint32_t end = pos;
  for (const auto& c : t.children()) end = collect_constituents(c, end, pol, out);
  bool counted = end > pos;
  if (t.is_preterminal() && !pol.count_preterminals) counted = false;
  if (pol.exclude_root && t.label() == pol.root_label) counted = false;
  if (counted) out.insert(Constituent{t.label(), pos, end});
  return end;
}

}  // namespace

std::string serialize(const Tree& tree) {
  std::string out;
  serialize_into(tree, out);
  return out;
}

std::set<Constituent> constituents(const Tree& tree, const ScoringPolicy& policy) {
  std::set<Constituent> out;
  collect_constituents(tree, 0, policy, out);
  return out;
}

void Corpus::add(Tree gold) {
  CorpusEntry e{gold.yield(), std::move(gold)};
  entries.push_back(std::move(e));
}

std::string Corpus::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char b : s) {
      h ^= b;
      h *= 1099511628211ULL;
    }
    h ^= static_cast<unsigned char>('\n');
    h *= 1099511628211ULL;
  };
  for (const auto& e : entries) mix(serialize(e.gold));
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

Corpus corpus_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool blank = true;
    for (char c : line)
      if (!is_ws(c)) {
        blank = false;
        break;
      }
    if (blank) continue;
    std::vector<Tree> trees;
    try {
      trees = parse_bracketed(line);
    } catch (const DataError& e) {
      throw DataError(path + " line " + std::to_string(lineno) + ": " + e.what());
    }
    if (trees.size() != 1)
      throw DataError(path + " line " + std::to_string(lineno) + ": expected one tree, found " +
                      std::to_string(trees.size()));
    corpus.add(std::move(trees[0]));
  }
  return corpus;
}

void corpus_save(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const auto& e : corpus.entries) out << serialize(e.gold) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace ensemble
