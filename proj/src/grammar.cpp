#include "ensemble/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

namespace ensemble {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool has_reserved(const std::string& label) {
  return label.find_first_of("~+|") != std::string::npos;
}

void validate_trainable(const Tree& t, bool is_root) {
  if (t.is_leaf()) return;
  if (has_reserved(t.label()))
    throw DataError("label '" + t.label() + "' contains a reserved character (~ + |)");
  bool any_leaf = false, any_node = false;
  for (const auto& c : t.children()) (c.is_leaf() ? any_leaf : any_node) = true;
  if (any_leaf && (any_node || t.children().size() != 1))
    throw DataError("bare token under node '" + t.label() +
                    "': every word needs its own preterminal");
  for (const auto& c : t.children()) validate_trainable(c, false);
  (void)is_root;
}

Tree collapse_impl(const Tree& t) {
  if (t.is_leaf()) return t;
  if (t.children().size() == 1 && !t.children()[0].is_leaf()) {
    Tree sub = collapse_impl(t.children()[0]);
    std::vector<Tree> kids = sub.children();
    return Tree::node(t.label() + "+" + sub.label(), std::move(kids));
  }
  std::vector<Tree> kids;
  kids.reserve(t.children().size());
  for (const auto& c : t.children()) kids.push_back(collapse_impl(c));
  return Tree::node(t.label(), std::move(kids));
}

Tree right_binarize(const Tree& t) {
  if (t.is_leaf() || t.is_preterminal()) return t;
  std::vector<Tree> kids;
  kids.reserve(t.children().size());
  for (const auto& c : t.children()) kids.push_back(right_binarize(c));
  if (kids.size() <= 2) return Tree::node(t.label(), std::move(kids));

  auto spine_label = [&](std::size_t from) {
    std::string s = "~" + t.label();
    for (std::size_t j = from; j < kids.size(); ++j) s += "|" + kids[j].label();
    return s;
  };
  // Build the right spine innermost-first.
  std::size_t last = kids.size() - 1;
  Tree spine = Tree::node(spine_label(last - 1), {kids[last - 1], kids[last]});
  for (std::size_t from = last - 2; from >= 1; --from) {
    spine = Tree::node(spine_label(from), {kids[from], std::move(spine)});
    if (from == 1) break;
  }
  return Tree::node(t.label(), {std::move(kids[0]), std::move(spine)});
}

bool is_intermediate(const Tree& t) {
  return !t.is_leaf() && !t.label().empty() && t.label()[0] == '~';
}

Tree splice_intermediates(const Tree& t) {
  if (t.is_leaf()) return t;
  std::vector<Tree> kids;
  for (const auto& c : t.children()) {
    Tree sc = splice_intermediates(c);
    if (is_intermediate(sc)) {
      for (auto& gc : sc.children()) kids.push_back(gc);
    } else {
      kids.push_back(std::move(sc));
    }
  }
  return Tree::node(t.label(), std::move(kids));
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Tree collapse_unary_chains(const Tree& tree) { return collapse_impl(tree); }

Tree expand_unary_chains(const Tree& tree) {
  if (tree.is_leaf()) return tree;
  std::vector<Tree> kids;
  kids.reserve(tree.children().size());
  for (const auto& c : tree.children()) kids.push_back(expand_unary_chains(c));
  const std::string& label = tree.label();
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t plus = label.find('+', pos);
    if (plus == std::string::npos) {
      parts.push_back(label.substr(pos));
      break;
    }
    parts.push_back(label.substr(pos, plus - pos));
    pos = plus + 1;
  }
  Tree out = Tree::node(parts.back(), std::move(kids));
  for (std::size_t i = parts.size() - 1; i-- > 0;) out = Tree::node(parts[i], {std::move(out)});
  return out;
}

Tree binarize(const Tree& tree) {
  validate_trainable(tree, true);
  return right_binarize(collapse_impl(tree));
}

Tree debinarize(const Tree& tree) {
  if (is_intermediate(tree)) throw DataError("debinarize: dangling intermediate label at root");
  return expand_unary_chains(splice_intermediates(tree));
}

std::string word_signature(const std::string& word) {
  bool cap = !word.empty() && std::isupper(static_cast<unsigned char>(word[0]));
  bool digit = false;
  for (char c : word)
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
      break;
    }
  std::string suffix = word.size() > 2 ? word.substr(word.size() - 2) : word;
  for (char& c : suffix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return std::string("UNK-") + (cap ? "C" : "c") + (digit ? "D" : "d") + "-" + suffix;
}

// --- induction --------------------------------------------------------------

std::shared_ptr<const PcfgModel> induce_pcfg(const Corpus& corpus, std::uint64_t /*seed*/,
                                             const PcfgOptions& options) {
  if (corpus.empty()) throw DataError("induce: empty corpus");

  std::map<std::string, long long> tokfreq;
  for (const auto& e : corpus.entries)
    for (const auto& w : e.sentence) ++tokfreq[w];

  std::map<std::string, long long> root_counts;
  std::map<std::string, long long> orig_root_counts;
  std::map<std::tuple<std::string, std::string, std::string>, long long> rule_counts;
  std::map<std::pair<std::string, std::string>, long long> lex_counts;
  std::map<std::pair<std::string, std::string>, long long> sig_counts;

  struct Walker {
    std::map<std::tuple<std::string, std::string, std::string>, long long>& rules;
    std::map<std::pair<std::string, std::string>, long long>& lex;
    std::map<std::pair<std::string, std::string>, long long>& sigs;
    const std::map<std::string, long long>& freq;
    long long rare_max;
    void walk(const Tree& t) {
      if (t.is_preterminal()) {
        const std::string& w = t.children()[0].token();
        ++lex[{t.label(), w}];
        if (freq.at(w) <= rare_max) ++sigs[{t.label(), word_signature(w)}];
        return;
      }
      ++rules[{t.label(), t.children()[0].label(), t.children()[1].label()}];
      for (const auto& c : t.children()) walk(c);
    }
  };

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Tree b = [&] {
      try {
        return binarize(corpus.entries[i].gold);
      } catch (const DataError& e) {
        throw DataError("entry " + std::to_string(i) + ": " + e.what());
      }
    }();
    ++root_counts[b.label()];
    ++orig_root_counts[corpus.entries[i].gold.label()];
    Walker{rule_counts, lex_counts, sig_counts, tokfreq, options.rare_max_count}.walk(b);
  }

  const double lambda = options.lambda;
  std::map<std::string, long long> lhs_total, lhs_types;
  for (const auto& [key, cnt] : rule_counts) {
    lhs_total[std::get<0>(key)] += cnt;
    ++lhs_types[std::get<0>(key)];
  }
  for (const auto& [key, cnt] : lex_counts) {
    lhs_total[key.first] += cnt;
    ++lhs_types[key.first];
  }

  auto model = std::make_shared<PcfgModel>();
  model->lambda_ = lambda;
  model->unk_floor_lp_ = options.unknown_floor_log10;

  std::set<std::string> all_labels;
  for (const auto& [key, cnt] : rule_counts) {
    all_labels.insert(std::get<0>(key));
    all_labels.insert(std::get<1>(key));
    all_labels.insert(std::get<2>(key));
  }
  for (const auto& [key, cnt] : lex_counts) all_labels.insert(key.first);
  for (const auto& [label, cnt] : root_counts) all_labels.insert(label);
  model->labels_.assign(all_labels.begin(), all_labels.end());
  for (std::size_t i = 0; i < model->labels_.size(); ++i)
    model->label_id_[model->labels_[i]] = static_cast<int>(i);

  auto smoothed_lp = [&](long long cnt, long long total, long long types) {
    return std::log10((static_cast<double>(cnt) + lambda) /
                      (static_cast<double>(total) + lambda * static_cast<double>(types)));
  };

  for (const auto& [key, cnt] : rule_counts) {
    const auto& [lhs, r1, r2] = key;
    PcfgModel::Rule rule;
    rule.lhs = model->label_id_.at(lhs);
    rule.rhs1 = model->label_id_.at(r1);
    rule.rhs2 = model->label_id_.at(r2);
    rule.lp = smoothed_lp(cnt, lhs_total.at(lhs), lhs_types.at(lhs));
    model->rules_.push_back(rule);
  }
  std::sort(model->rules_.begin(), model->rules_.end(), [](const auto& a, const auto& b) {
    return std::tie(a.lhs, a.rhs1, a.rhs2) < std::tie(b.lhs, b.rhs1, b.rhs2);
  });

  for (const auto& [key, cnt] : lex_counts)
    model->lex_[{model->label_id_.at(key.first), key.second}] =
        smoothed_lp(cnt, lhs_total.at(key.first), lhs_types.at(key.first));

  std::map<std::string, long long> sig_total, sig_types;
  for (const auto& [key, cnt] : sig_counts) {
    sig_total[key.first] += cnt;
    ++sig_types[key.first];
  }
  for (const auto& [key, cnt] : sig_counts)
    model->sig_[{model->label_id_.at(key.first), key.second}] =
        smoothed_lp(cnt, sig_total.at(key.first), sig_types.at(key.first));

  long long total_roots = 0;
  for (const auto& [label, cnt] : root_counts) total_roots += cnt;
  for (const auto& [label, cnt] : root_counts)
    model->root_lp_[model->label_id_.at(label)] =
        smoothed_lp(cnt, total_roots, static_cast<long long>(root_counts.size()));

  long long best_root = -1;
  for (const auto& [label, cnt] : orig_root_counts)
    if (cnt > best_root) {
      best_root = cnt;
      model->root_symbol_ = label;
    }

  for (const auto& [w, f] : tokfreq) model->vocab_.insert(w);
  model->build_indexes();
  return model;
}

std::shared_ptr<const ParserModel> PcfgInduction::induce(const Corpus& corpus,
                                                         std::uint64_t seed) const {
  return induce_pcfg(corpus, seed, options_);
}

void PcfgModel::build_indexes() {
  word_tags_.clear();
  sig_tags_.clear();
  open_tags_.clear();
  std::set<int> open;
  for (const auto& [key, lp] : lex_) {
    word_tags_[key.second].emplace_back(key.first, lp);
    open.insert(key.first);
  }
  for (const auto& [key, lp] : sig_) {
    sig_tags_[key.second].emplace_back(key.first, lp);
    open.insert(key.first);
  }
  for (auto& [w, tags] : word_tags_) std::sort(tags.begin(), tags.end());
  for (auto& [s, tags] : sig_tags_) std::sort(tags.begin(), tags.end());
  open_tags_.assign(open.begin(), open.end());
}

// --- decoding ---------------------------------------------------------------

namespace {

// Lexical scores the decoder assigns to one word, keyed by label id.
std::vector<std::pair<int, double>> word_candidates(
    const std::set<std::string>& vocab,
    const std::map<std::string, std::vector<std::pair<int, double>>>& word_tags,
    const std::map<std::string, std::vector<std::pair<int, double>>>& sig_tags,
    const std::vector<int>& open_tags, double floor_lp, const std::string& word) {
  if (vocab.count(word)) {
    auto it = word_tags.find(word);
    return it == word_tags.end() ? std::vector<std::pair<int, double>>{} : it->second;
  }
  std::map<int, double> cand;
  auto sit = sig_tags.find(word_signature(word));
  if (sit != sig_tags.end())
    for (const auto& [tag, lp] : sit->second) cand[tag] = lp;
  for (int tag : open_tags) {
    auto [it, fresh] = cand.try_emplace(tag, floor_lp);
    if (!fresh && it->second < floor_lp) it->second = floor_lp;
  }
  return {cand.begin(), cand.end()};
}

}  // namespace

std::vector<std::pair<std::string, double>> PcfgModel::lexical_candidates(
    const std::string& word) const {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [tag, lp] :
       word_candidates(vocab_, word_tags_, sig_tags_, open_tags_, unk_floor_lp_, word))
    out.emplace_back(labels_[tag], lp);
  return out;
}

ParseResult PcfgModel::fallback_parse(const std::vector<std::string>& sentence) const {
  const std::size_t n = sentence.size();
  auto preterm = [&](std::size_t i) {
    return Tree::node(kJunkLabel, {Tree::leaf(sentence[i])});
  };
  Tree cur = preterm(n - 1);
  for (std::size_t i = n - 1; i-- > 0;) cur = Tree::node(kJunkLabel, {preterm(i), std::move(cur)});
  std::string root = root_symbol_.empty() ? "TOP" : root_symbol_;
  return ParseResult{Tree::node(root, {std::move(cur)}), true};
}

ParseResult PcfgModel::parse(const std::vector<std::string>& sentence) const {
  if (sentence.empty()) throw DataError("parse: empty sentence");
  const int n = static_cast<int>(sentence.size());
  const int L = static_cast<int>(labels_.size());
  if (L == 0 || root_lp_.empty()) return fallback_parse(sentence);

  struct Back {
    int rule = -2;   // -2 unset, -1 lexical, >=0 rule index
    int split = -1;  // -1 for lexical/unary
  };
  const int cells = (n + 1) * (n + 1);
  std::vector<std::vector<double>> score(cells);
  std::vector<std::vector<Back>> back(cells);
  auto cell = [n](int i, int j) { return i * (n + 1) + j; };

  std::vector<int> binary_rules, unary_rules;
  for (int r = 0; r < static_cast<int>(rules_.size()); ++r)
    (rules_[r].rhs2 < 0 ? unary_rules : binary_rules).push_back(r);

  // Unary closure, deterministic: ascending rule scans to a fixpoint, only
  // strict improvements apply.
  auto apply_unaries = [&](std::vector<double>& sc, std::vector<Back>& bk) {
    if (unary_rules.empty()) return;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int r : unary_rules) {
        const Rule& rule = rules_[r];
        double base = sc[rule.rhs1];
        if (base == kNegInf) continue;
        double cand = rule.lp + base;
        if (cand > sc[rule.lhs]) {
          sc[rule.lhs] = cand;
          bk[rule.lhs] = Back{r, -1};
          changed = true;
        }
      }
    }
  };

  for (int i = 0; i < n; ++i) {
    auto& sc = score[cell(i, i + 1)];
    auto& bk = back[cell(i, i + 1)];
    sc.assign(L, kNegInf);
    bk.assign(L, Back{});
    for (const auto& [tag, lp] :
         word_candidates(vocab_, word_tags_, sig_tags_, open_tags_, unk_floor_lp_, sentence[i])) {
      sc[tag] = lp;
      bk[tag] = Back{-1, -1};
    }
    apply_unaries(sc, bk);
  }

  for (int w = 2; w <= n; ++w) {
    for (int i = 0; i + w <= n; ++i) {
      const int j = i + w;
      auto& sc = score[cell(i, j)];
      auto& bk = back[cell(i, j)];
      sc.assign(L, kNegInf);
      bk.assign(L, Back{});
      for (int k = i + 1; k < j; ++k) {
        const auto& ls = score[cell(i, k)];
        const auto& rs = score[cell(k, j)];
        for (int r : binary_rules) {
          const Rule& rule = rules_[r];
          double l = ls[rule.rhs1];
          if (l == kNegInf) continue;
          double rr = rs[rule.rhs2];
          if (rr == kNegInf) continue;
          double cand = rule.lp + l + rr;
          if (cand > sc[rule.lhs]) {
            sc[rule.lhs] = cand;
            bk[rule.lhs] = Back{r, k};
          }
        }
      }
      apply_unaries(sc, bk);
    }
  }

  int best_label = -1;
  double best = kNegInf;
  const auto& top = score[cell(0, n)];
  for (const auto& [label, lp] : root_lp_) {
    if (top[label] == kNegInf) continue;
    double tot = lp + top[label];
    if (tot > best) {
      best = tot;
      best_label = label;
    }
  }
  if (best_label < 0) return fallback_parse(sentence);

  auto rebuild = [&](auto&& self, int i, int j, int id) -> Tree {
    const Back& b = back[cell(i, j)][id];
    if (b.rule == -1) return Tree::node(labels_[id], {Tree::leaf(sentence[i])});
    const Rule& rule = rules_[b.rule];
    if (b.split < 0) return Tree::node(labels_[id], {self(self, i, j, rule.rhs1)});
    return Tree::node(labels_[id], {self(self, i, b.split, rule.rhs1),
                                    self(self, b.split, j, rule.rhs2)});
  };
  Tree bin = rebuild(rebuild, 0, n, best_label);
  return ParseResult{debinarize(bin), false};
}

// --- scoring a known tree ---------------------------------------------------

double PcfgModel::tree_log10prob(const Tree& tree) const {
  Tree b = binarize(tree);
  auto id_of = [&](const std::string& label) {
    auto it = label_id_.find(label);
    return it == label_id_.end() ? -1 : it->second;
  };
  int root = id_of(b.label());
  auto rit = root == -1 ? root_lp_.end() : root_lp_.find(root);
  if (rit == root_lp_.end()) return kNegInf;
  double total = rit->second;

  auto lex_score = [&](int tag, const std::string& word) {
    if (vocab_.count(word)) {
      auto it = lex_.find({tag, word});
      return it == lex_.end() ? kNegInf : it->second;
    }
    double lp = kNegInf;
    auto sit = sig_.find({tag, word_signature(word)});
    if (sit != sig_.end()) lp = sit->second;
    if (std::binary_search(open_tags_.begin(), open_tags_.end(), tag) && unk_floor_lp_ > lp)
      lp = unk_floor_lp_;
    return lp;
  };
  auto rule_lp = [&](int lhs, int r1, int r2) {
    Rule probe;
    probe.lhs = lhs;
    probe.rhs1 = r1;
    probe.rhs2 = r2;
    auto it = std::lower_bound(rules_.begin(), rules_.end(), probe,
                               [](const Rule& a, const Rule& b) {
                                 return std::tie(a.lhs, a.rhs1, a.rhs2) <
                                        std::tie(b.lhs, b.rhs1, b.rhs2);
                               });
    if (it == rules_.end() || it->lhs != lhs || it->rhs1 != r1 || it->rhs2 != r2)
      return kNegInf;
    return it->lp;
  };

  auto walk = [&](auto&& self, const Tree& t) -> double {
    int id = id_of(t.label());
    if (id < 0) return kNegInf;
    if (t.is_preterminal()) return lex_score(id, t.children()[0].token());
    int r1 = id_of(t.children()[0].label());
    int r2 = id_of(t.children()[1].label());
    if (r1 < 0 || r2 < 0) return kNegInf;
    double lp = rule_lp(id, r1, r2);
    if (lp == kNegInf) return kNegInf;
    return lp + self(self, t.children()[0]) + self(self, t.children()[1]);
  };
  return total + walk(walk, b);
}

double PcfgModel::rule_prob(const std::string& lhs, const std::string& rhs1,
                            const std::string& rhs2) const {
  auto l = label_id_.find(lhs);
  auto r1 = label_id_.find(rhs1);
  if (l == label_id_.end() || r1 == label_id_.end()) return 0;
  int r2 = -1;
  if (!rhs2.empty()) {
    auto it = label_id_.find(rhs2);
    if (it == label_id_.end()) return 0;
    r2 = it->second;
  }
  for (const auto& rule : rules_)
    if (rule.lhs == l->second && rule.rhs1 == r1->second && rule.rhs2 == r2)
      return std::pow(10.0, rule.lp);
  return 0;
}

double PcfgModel::lexical_prob(const std::string& preterminal, const std::string& word) const {
  auto l = label_id_.find(preterminal);
  if (l == label_id_.end()) return 0;
  auto it = lex_.find({l->second, word});
  return it == lex_.end() ? 0 : std::pow(10.0, it->second);
}

double PcfgModel::root_prob(const std::string& label) const {
  auto l = label_id_.find(label);
  if (l == label_id_.end()) return 0;
  auto it = root_lp_.find(l->second);
  return it == root_lp_.end() ? 0 : std::pow(10.0, it->second);
}

std::vector<PcfgModel::RuleView> PcfgModel::rules_view() const {
  std::vector<RuleView> out;
  out.reserve(rules_.size());
  for (const auto& r : rules_)
    out.push_back(RuleView{labels_[r.lhs], labels_[r.rhs1],
                           r.rhs2 < 0 ? std::string() : labels_[r.rhs2], r.lp});
  return out;
}

std::vector<std::pair<std::string, double>> PcfgModel::roots_view() const {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [id, lp] : root_lp_) out.emplace_back(labels_[id], lp);
  return out;
}

// --- persistence ------------------------------------------------------------

void PcfgModel::save(std::ostream& out) const {
  out << "pcfg v1\n";
  out << "root " << root_symbol_ << "\n";
  out << "lambda " << format_g17(lambda_) << "\n";
  out << "unknown_floor " << format_g17(unk_floor_lp_) << "\n";
  out << "roots " << root_lp_.size() << "\n";
  for (const auto& [id, lp] : root_lp_) out << labels_[id] << " " << format_g17(lp) << "\n";
  out << "rules " << rules_.size() << "\n";
  for (const auto& r : rules_) {
    out << labels_[r.lhs] << " " << labels_[r.rhs1];
    if (r.rhs2 >= 0) out << " " << labels_[r.rhs2];
    out << " " << format_g17(r.lp) << "\n";
  }
  out << "lexicon " << lex_.size() << "\n";
  for (const auto& [key, lp] : lex_)
    out << labels_[key.first] << " " << key.second << " " << format_g17(lp) << "\n";
  out << "signatures " << sig_.size() << "\n";
  for (const auto& [key, lp] : sig_)
    out << labels_[key.first] << " " << key.second << " " << format_g17(lp) << "\n";
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_lp(const std::string& s, const char* where) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || std::isnan(v))
    throw DataError(std::string("model file: bad log10 probability in ") + where);
  if (v > 0) throw DataError(std::string("model file: probability above 1 in ") + where);
  return v;
}

std::string read_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string("model file: missing ") + what);
  return line;
}

}  // namespace

std::shared_ptr<const PcfgModel> PcfgModel::load(std::istream& in) {
  if (read_line(in, "header") != "pcfg v1")
    throw DataError("model file: expected 'pcfg v1' header");
  auto model = std::make_shared<PcfgModel>();

  auto expect_kv = [&](const char* key) {
    auto parts = split_ws(read_line(in, key));
    if (parts.size() != 2 || parts[0] != key)
      throw DataError(std::string("model file: expected '") + key + " <value>'");
    return parts[1];
  };
  model->root_symbol_ = expect_kv("root");
  model->lambda_ = std::strtod(expect_kv("lambda").c_str(), nullptr);
  model->unk_floor_lp_ = std::strtod(expect_kv("unknown_floor").c_str(), nullptr);

  auto section_count = [&](const char* key) {
    auto parts = split_ws(read_line(in, key));
    if (parts.size() != 2 || parts[0] != key)
      throw DataError(std::string("model file: expected '") + key + " <count>'");
    try {
      return std::stoll(parts[1]);
    } catch (const std::exception&) {
      throw DataError(std::string("model file: bad count for ") + key);
    }
  };

  std::set<std::string> all_labels;
  std::vector<std::pair<std::string, double>> roots;
  long long n_roots = section_count("roots");
  for (long long i = 0; i < n_roots; ++i) {
    auto parts = split_ws(read_line(in, "root entry"));
    if (parts.size() != 2) throw DataError("model file: bad root line");
    roots.emplace_back(parts[0], parse_lp(parts[1], "roots"));
    all_labels.insert(parts[0]);
  }

  struct RawRule {
    std::string lhs, r1, r2;
    double lp;
  };
  std::vector<RawRule> raw_rules;
  long long n_rules = section_count("rules");
  for (long long i = 0; i < n_rules; ++i) {
    auto parts = split_ws(read_line(in, "rule entry"));
    if (parts.size() == 4) {
      raw_rules.push_back({parts[0], parts[1], parts[2], parse_lp(parts[3], "rules")});
      all_labels.insert(parts[2]);
    } else if (parts.size() == 3) {
      raw_rules.push_back({parts[0], parts[1], "", parse_lp(parts[2], "rules")});
    } else {
      throw DataError("model file: bad rule line");
    }
    all_labels.insert(parts[0]);
    all_labels.insert(parts[1]);
  }

  std::vector<std::tuple<std::string, std::string, double>> raw_lex, raw_sig;
  long long n_lex = section_count("lexicon");
  for (long long i = 0; i < n_lex; ++i) {
    auto parts = split_ws(read_line(in, "lexicon entry"));
    if (parts.size() != 3) throw DataError("model file: bad lexicon line");
    raw_lex.emplace_back(parts[0], parts[1], parse_lp(parts[2], "lexicon"));
    all_labels.insert(parts[0]);
  }
  long long n_sig = section_count("signatures");
  for (long long i = 0; i < n_sig; ++i) {
    auto parts = split_ws(read_line(in, "signature entry"));
    if (parts.size() != 3) throw DataError("model file: bad signature line");
    raw_sig.emplace_back(parts[0], parts[1], parse_lp(parts[2], "signatures"));
    all_labels.insert(parts[0]);
  }

  model->labels_.assign(all_labels.begin(), all_labels.end());
  for (std::size_t i = 0; i < model->labels_.size(); ++i)
    model->label_id_[model->labels_[i]] = static_cast<int>(i);
  for (const auto& [label, lp] : roots) model->root_lp_[model->label_id_.at(label)] = lp;
  for (const auto& r : raw_rules) {
    Rule rule;
    rule.lhs = model->label_id_.at(r.lhs);
    rule.rhs1 = model->label_id_.at(r.r1);
    rule.rhs2 = r.r2.empty() ? -1 : model->label_id_.at(r.r2);
    rule.lp = r.lp;
    model->rules_.push_back(rule);
  }
  std::sort(model->rules_.begin(), model->rules_.end(), [](const Rule& a, const Rule& b) {
    return std::tie(a.lhs, a.rhs1, a.rhs2) < std::tie(b.lhs, b.rhs1, b.rhs2);
  });
  for (const auto& [tag, word, lp] : raw_lex) {
    model->lex_[{model->label_id_.at(tag), word}] = lp;
    model->vocab_.insert(word);
  }
  for (const auto& [tag, sig, lp] : raw_sig) model->sig_[{model->label_id_.at(tag), sig}] = lp;
  model->build_indexes();
  return model;
}

std::shared_ptr<const PcfgModel> load_pcfg_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  return PcfgModel::load(in);
}

void save_pcfg_file(const ParserModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  model.save(out);
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace ensemble
