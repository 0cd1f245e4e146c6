#include "ensemble/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "ensemble/errors.hpp"
#include "ensemble/parallel.hpp"

namespace ensemble {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_prob(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    if (!(v > 0.0) || v > 1.0) throw std::out_of_range("range");
    return v;
  } catch (const std::exception&) {
    throw DataError("grammar line " + std::to_string(line_no) +
                    ": probability must be in (0, 1]");
  }
}

}  // namespace

SynthGrammar SynthGrammar::from_stream(std::istream& in) {
  SynthGrammar g;
  std::string line;
  std::size_t line_no = 0;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<std::string> f = split_ws(line);
    if (f.empty()) continue;
    if (!saw_magic) {
      if (f.size() != 2 || f[0] != "synth-grammar" || f[1] != "v1")
        throw DataError("grammar line " + std::to_string(line_no) +
                        ": expected header 'synth-grammar v1'");
      saw_magic = true;
      continue;
    }
    if (f[0] == "root") {
      if (f.size() != 2) throw DataError("grammar line " + std::to_string(line_no) +
                                         ": root takes one symbol");
      if (!g.root_.empty()) throw DataError("grammar line " + std::to_string(line_no) +
                                            ": duplicate root line");
      g.root_ = f[1];
    } else if (f[0] == "rule") {
      if (f.size() < 4)
        throw DataError("grammar line " + std::to_string(line_no) +
                        ": rule needs lhs, probability, and at least one rhs symbol");
      Rule r;
      r.prob = parse_prob(f[2], line_no);
      r.rhs.assign(f.begin() + 3, f.end());
      g.rules_[f[1]].push_back(std::move(r));
    } else if (f[0] == "word") {
      if (f.size() != 4)
        throw DataError("grammar line " + std::to_string(line_no) +
                        ": word needs tag, probability, and one token");
      g.words_[f[1]].push_back(Word{parse_prob(f[2], line_no), f[3]});
    } else {
      throw DataError("grammar line " + std::to_string(line_no) + ": unknown directive '" +
                      f[0] + "'");
    }
  }
  if (!saw_magic) throw DataError("grammar file is empty");
  g.validate();
  return g;
}

SynthGrammar SynthGrammar::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grammar file: " + path);
  return from_stream(in);
}

void SynthGrammar::validate() {
  if (root_.empty()) throw DataError("grammar has no root line");
  for (const auto& [sym, _] : rules_)
    if (words_.count(sym))
      throw DataError("symbol '" + sym + "' has both rule and word productions");
  if (!rules_.count(root_) && !words_.count(root_))
    throw DataError("root symbol '" + root_ + "' has no productions");

  auto check_sum = [](const std::string& sym, double sum) {
    if (std::abs(sum - 1.0) > 1e-9)
      throw DataError("productions of '" + sym + "' sum to " + std::to_string(sum) +
                      ", expected 1");
  };
  for (const auto& [sym, rules] : rules_) {
    double sum = 0;
    for (const Rule& r : rules) {
      sum += r.prob;
      for (const std::string& s : r.rhs)
        if (!rules_.count(s) && !words_.count(s))
          throw DataError("rule for '" + sym + "' uses undefined symbol '" + s + "'");
    }
    check_sum(sym, sum);
  }
  for (const auto& [sym, words] : words_) {
    double sum = 0;
    for (const Word& w : words) sum += w.prob;
    check_sum(sym, sum);
  }

  // Expected yield length per symbol by fixed-point iteration. Preterminals
  // emit exactly one word; divergence means the branching process is not
  // subcritical and sampling would not terminate in bounded expected time.
  std::map<std::string, double> expect;
  for (const auto& [sym, _] : rules_) expect[sym] = 0;
  for (int iter = 0; iter < 20000; ++iter) {
    double delta = 0;
    for (const auto& [sym, rules] : rules_) {
      double e = 0;
      for (const Rule& r : rules) {
        double len = 0;
        for (const std::string& s : r.rhs)
          len += words_.count(s) ? 1.0 : expect[s];
        e += r.prob * len;
      }
      delta = std::max(delta, std::abs(e - expect[sym]));
      expect[sym] = e;
      if (e > 1e9)
        throw DataError("grammar is not proper: expected sentence length diverges");
    }
    if (delta < 1e-12) {
      expected_length_ = words_.count(root_) ? 1.0 : expect[root_];
      return;
    }
  }
  throw DataError("grammar is too close to critical: expected length did not converge");
}

std::vector<std::string> SynthGrammar::internal_labels() const {
  std::vector<std::string> out;
  for (const auto& [sym, _] : rules_) out.push_back(sym);
  return out;  // map order is already sorted
}

namespace {

struct YieldBudgetExceeded {};

}  // namespace

Tree SynthGrammar::sample(Rng& rng, int max_words) const {
  if (max_words < 1) throw DataError("max_words must be >= 1");

  // Generation must consume randomness in a fixed order, so expansion is
  // depth-first left-to-right with one uniform draw per expansion.
  auto pick = [&rng](auto const& items) -> std::size_t {
    double u = rng.uniform01();
    double acc = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      acc += items[i].prob;
      if (u < acc) return i;
    }
    return items.size() - 1;
  };

  struct Gen {
    const SynthGrammar& g;
    decltype(pick)& choose;
    int words_left;
    Tree expand(const std::string& sym) {
      auto w = g.words_.find(sym);
      if (w != g.words_.end()) {
        if (--words_left < 0) throw YieldBudgetExceeded{};
        const Word& word = w->second[choose(w->second)];
        return Tree::node(sym, {Tree::leaf(word.word)});
      }
      const auto& rules = g.rules_.at(sym);
      const Rule& rule = rules[choose(rules)];
      std::vector<Tree> children;
      children.reserve(rule.rhs.size());
      for (const std::string& s : rule.rhs) children.push_back(expand(s));
      return Tree::node(sym, std::move(children));
    }
  };

  for (int attempt = 0; attempt < 10000; ++attempt) {
    Gen gen{*this, pick, max_words};
    try {
      return gen.expand(root_);
    } catch (const YieldBudgetExceeded&) {
      continue;  // redraw; the stream simply advances
    }
  }
  throw DataError("sampling kept exceeding max_words; raise the cap");
}

void SynthGrammar::save(std::ostream& out) const {
  out << "synth-grammar v1\n";
  out << "root " << root_ << '\n';
  char buf[64];
  for (const auto& [sym, rules] : rules_)
    for (const Rule& r : rules) {
      std::snprintf(buf, sizeof buf, "%.17g", r.prob);
      out << "rule " << sym << ' ' << buf;
      for (const std::string& s : r.rhs) out << ' ' << s;
      out << '\n';
    }
  for (const auto& [sym, words] : words_)
    for (const Word& w : words) {
      std::snprintf(buf, sizeof buf, "%.17g", w.prob);
      out << "word " << sym << ' ' << buf << ' ' << w.word << '\n';
    }
}

SynthGrammar SynthGrammar::builtin() {
  static const char* text = R"(synth-grammar v1
root TOP
rule TOP 1.0 S
rule S 1.0 NP VP
rule NP 0.5 Det N
rule NP 0.3 N
rule NP 0.2 NP PP
rule VP 0.5 V NP
rule VP 0.25 V
rule VP 0.25 VP PP
rule PP 1.0 P NP
word Det 0.6 the
word Det 0.4 a
word P 0.4 with
word P 0.35 in
word P 0.25 near
word N 0.16 man
word N 0.14 dog
word N 0.13 park
word N 0.12 telescope
word N 0.11 bird
word N 0.1 river
word N 0.08 saw
word N 0.06 light
word N 0.06 walk
word N 0.04 duck
word V 0.22 sees
word V 0.2 likes
word V 0.18 finds
word V 0.14 saw
word V 0.1 light
word V 0.09 walk
word V 0.07 duck
)";
  std::istringstream in(text);
  return from_stream(in);
}

namespace {

// Count the nodes eligible for a planted conflict: internal, below the
// root, not a preterminal.
int count_plant_sites(const Tree& t, bool is_root) {
  if (t.is_leaf() || t.is_preterminal()) return 0;
  int n = is_root ? 0 : 1;
  for (const Tree& c : t.children()) n += count_plant_sites(c, false);
  return n;
}

struct PlantState {
  int remaining;                          // which eligible node to hit
  const std::vector<std::string>* pool;   // conflict labels, sorted
  const std::set<Constituent>* existing;  // tree's own (label, span) pairs
  bool done = false;
};

Tree plant_conflict(const Tree& t, bool is_root, std::uint32_t start, PlantState& st) {
  if (t.is_leaf()) return t;
  std::string label = t.label();
  if (!is_root && !t.is_preterminal() && !st.done && st.remaining-- == 0) {
    st.done = true;
    std::uint32_t end = start + std::uint32_t(t.leaf_count());
    auto at = std::find(st.pool->begin(), st.pool->end(), label);
    std::size_t from = at == st.pool->end() ? 0 : std::size_t(at - st.pool->begin());
    std::string fallback;
    for (std::size_t step = 1; step <= st.pool->size(); ++step) {
      const std::string& cand = (*st.pool)[(from + step) % st.pool->size()];
      if (cand == label) continue;
      if (fallback.empty()) fallback = cand;
      if (!st.existing->count(Constituent{cand, start, end})) {
        label = cand;
        break;
      }
    }
    if (label == t.label() && !fallback.empty()) label = fallback;
  }
  std::vector<Tree> children;
  children.reserve(t.children().size());
  std::uint32_t pos = start;
  for (const Tree& c : t.children()) {
    children.push_back(plant_conflict(c, false, pos, st));
    pos += std::uint32_t(c.leaf_count());
  }
  return Tree::node(std::move(label), std::move(children));
}

}  // namespace

SynthResult synth_corpus(const SynthGrammar& grammar, std::size_t n, double noise_rate,
                         std::uint64_t seed, int max_words) {
  if (noise_rate < 0 || noise_rate >= 1)
    throw DataError("noise rate must be in [0, 1)");

  Rng sample_rng(derive_seed(seed, 1));
  Rng noise_rng(derive_seed(seed, 2));
  std::vector<std::string> pool = grammar.internal_labels();
  pool.erase(std::remove(pool.begin(), pool.end(), grammar.root()), pool.end());

  SynthResult result;
  result.corpus.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Tree tree = grammar.sample(sample_rng, max_words);
    bool plant = noise_rate > 0 && noise_rng.uniform01() < noise_rate;
    if (plant && pool.size() >= 2) {
      int sites = count_plant_sites(tree, true);
      if (sites > 0) {
        ScoringPolicy all = ScoringPolicy::count_everything();
        std::set<Constituent> existing = constituents(tree, all);
        PlantState st;
        st.remaining = int(noise_rng.bounded(std::uint64_t(sites)));
        st.pool = &pool;
        st.existing = &existing;
        Tree planted = plant_conflict(tree, true, 0, st);
        if (!(planted == tree)) {
          tree = std::move(planted);
          result.planted.push_back(i);
        }
      }
    }
    result.corpus.add(std::move(tree));
  }
  return result;
}

std::vector<LearningCurveRow> learning_curve(const Corpus& train, const Corpus& test,
                                             const std::vector<std::size_t>& sizes,
                                             const ParserInduction& learner, std::uint64_t seed,
                                             const ScoringPolicy& policy) {
  if (train.empty()) throw DataError("learning curve needs a training corpus");
  if (test.empty()) throw DataError("learning curve needs a test corpus");
  if (sizes.empty()) throw DataError("learning curve needs at least one size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i] > train.size())
      throw DataError("curve size " + std::to_string(sizes[i]) +
                      " is outside 1.." + std::to_string(train.size()));
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw DataError("curve sizes must be strictly ascending");
  }

  constexpr std::uint64_t kStreamShuffle = 0x73687566ull;
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, kStreamShuffle));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.bounded(i)]);

  std::vector<LearningCurveRow> rows;
  for (std::size_t size : sizes) {
    Corpus sub;
    sub.entries.reserve(size);
    for (std::size_t i = 0; i < size; ++i) sub.entries.push_back(train.entries[order[i]]);

    auto model = learner.induce(sub, derive_seed(seed, 0x1000000ull + size));

    std::vector<Tree> train_hyps(sub.size(), Tree::leaf("x"));
    parallel_for(sub.size(), [&](std::size_t i) {
      train_hyps[i] = model->parse(sub.entries[i].sentence).tree;
    });
    std::vector<Tree> test_hyps(test.size(), Tree::leaf("x"));
    parallel_for(test.size(), [&](std::size_t i) {
      test_hyps[i] = model->parse(test.entries[i].sentence).tree;
    });

    LearningCurveRow row;
    row.size = size;
    row.train = score_corpus(sub, train_hyps, policy);
    row.test = score_corpus(test, test_hyps, policy);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::size_t> default_size_ladder(std::size_t m) {
  static const std::size_t ladder[] = {50, 100, 500, 1000, 5000, 10000, 20000};
  std::vector<std::size_t> out;
  for (std::size_t s : ladder)
    if (s < m) out.push_back(s);
  if (m >= 1) out.push_back(m);
  return out;
}

}  // namespace ensemble
