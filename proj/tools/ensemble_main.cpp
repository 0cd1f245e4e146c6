#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ensemble/bagging.hpp"
#include "ensemble/boosting.hpp"
#include "ensemble/corpus_qc.hpp"
#include "ensemble/errors.hpp"
#include "ensemble/eval.hpp"
#include "ensemble/experiments.hpp"
#include "ensemble/grammar.hpp"
#include "ensemble/parallel.hpp"
#include "ensemble/reports.hpp"
#include "ensemble/treebank.hpp"

using nlohmann::ordered_json;
using namespace ensemble;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string policy_root = "TOP";
  bool count_preterminals = false;
  std::string punct_list;
  std::string csv_path;
  std::string out_dir;

  ScoringPolicy policy() const {
    ScoringPolicy p;
    if (policy_root.empty()) {
      p.exclude_root = false;  // keep the default root label for tree building
    } else {
      p.root_label = policy_root;
      p.exclude_root = true;
    }
    p.count_preterminals = count_preterminals;
    for (const std::string& s : split_list(punct_list)) p.punct_labels.insert(s);
    return p;
  }

  ordered_json policy_json() const {
    ScoringPolicy p = policy();
    ordered_json j;
    j["root"] = p.root_label;
    j["exclude_root"] = p.exclude_root;
    j["count_preterminals"] = p.count_preterminals;
    j["punct"] = std::vector<std::string>(p.punct_labels.begin(), p.punct_labels.end());
    return j;
  }

  static std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : csv) {
      if (ch == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }
};

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  for (const std::string& s : Globals::split_list(csv)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(s, &pos));
      if (pos != s.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(std::string("bad ") + what + " value: " + s);
    }
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& csv, const char* what) {
  std::vector<std::size_t> out;
  for (const std::string& s : Globals::split_list(csv)) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(s, &pos);
      if (pos != s.size() || v < 1) throw std::invalid_argument("range");
      out.push_back(std::size_t(v));
    } catch (const std::exception&) {
      throw DataError(std::string("bad ") + what + " value: " + s);
    }
  }
  return out;
}

void require_flag(const std::string& value, const char* message) {
  if (value.empty()) throw CLI::ValidationError("ensemble", message);
}

std::vector<std::string> score_cells(const ScoreReport& r) {
  return {format_percent(r.precision), format_percent(r.recall), format_percent(r.f),
          format_percent(r.exact)};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string two_digit(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02zu", n);
  return buf;
}

void write_config(const std::string& dir, const ordered_json& config) {
  write_text_file(dir + "/config.json", config.dump(2) + "\n");
}

void write_seed(const std::string& dir, std::uint64_t seed) {
  write_text_file(dir + "/seed.txt", std::to_string(seed) + "\n");
}

void write_models(const std::string& dir,
                  const std::vector<std::shared_ptr<const ParserModel>>& members,
                  const char* stem) {
  ensure_out_dir(dir + "/models");
  for (std::size_t i = 0; i < members.size(); ++i) {
    std::string name = std::string(stem) + "_" + two_digit(i + 1) + ".model";
    save_pcfg_file(*members[i], dir + "/models/" + name);
  }
}

std::string curve_csv(const EnsembleCurve& curve) {
  std::string out = "prefix,set,P,R,F,Exact\n";
  for (const CurveRow& row : curve.rows) {
    out += csv_row(cat({std::to_string(row.prefix), "train"}, score_cells(row.train)));
    out += csv_row(cat({std::to_string(row.prefix), "test"}, score_cells(row.test)));
  }
  return out;
}

struct SummaryLine {
  std::string name;
  std::size_t prefix;
  std::string set;
  const ScoreReport* report;
};

std::vector<SummaryLine> summary_lines(const EnsembleCurve& curve) {
  std::vector<SummaryLine> lines;
  auto both = [&](const char* name, std::size_t prefix) {
    lines.push_back({name, prefix, "train", &curve.rows[prefix - 1].train});
    lines.push_back({name, prefix, "test", &curve.rows[prefix - 1].test});
  };
  both("Initial", curve.initial_prefix);
  both("Final", curve.final_prefix);
  both("BestF", curve.best_test_prefix);
  lines.push_back({"TrainBestF", curve.best_train_prefix, "test", &curve.train_best_f_test()});
  lines.push_back({"TestBestF", curve.best_test_prefix, "test", &curve.test_best_f_test()});
  return lines;
}

std::string summary_csv(const EnsembleCurve& curve) {
  std::string out = "row,prefix,set,P,R,F,Exact\n";
  for (const SummaryLine& l : summary_lines(curve))
    out += csv_row(cat({l.name, std::to_string(l.prefix), l.set}, score_cells(*l.report)));
  return out;
}

std::string summary_text(const EnsembleCurve& curve, const std::string& fingerprint) {
  TextTable per_prefix({"prefix", "trainP", "trainR", "trainF", "trainEx", "testP", "testR",
                        "testF", "testEx"});
  for (const CurveRow& row : curve.rows)
    per_prefix.add_row(cat(cat({std::to_string(row.prefix)}, score_cells(row.train)),
                           score_cells(row.test)));

  TextTable summary({"row", "prefix", "set", "P", "R", "F", "Exact"});
  for (const SummaryLine& l : summary_lines(curve))
    summary.add_row(cat({l.name, std::to_string(l.prefix), l.set}, score_cells(*l.report)));

  std::string out = "Per-prefix ensemble scores\n\n" + per_prefix.str() + "\nSummary\n\n" +
                    summary.str() + "\n";
  out += "train member fallbacks: " + std::to_string(curve.train_fallbacks) + "\n";
  out += "test member fallbacks: " + std::to_string(curve.test_fallbacks) + "\n";
  if (!fingerprint.empty()) out += "ensemble fingerprint: " + fingerprint + "\n";
  return out;
}

// --- subcommand bodies ------------------------------------------------------

void run_validate(const std::string& path) {
  Corpus corpus = corpus_load(path);
  std::size_t words = 0;
  for (const auto& e : corpus.entries) words += e.sentence.size();
  std::cout << "valid: " << corpus.size() << " trees, " << words << " words\n";
}

void run_induce(const Globals& g, const std::string& train_path, const std::string& out_path) {
  Corpus corpus = corpus_load(train_path);
  auto model = induce_pcfg(corpus, g.seed);
  save_pcfg_file(*model, out_path);
  std::cout << "model written: " << out_path << " (" << model->labels().size() << " labels, "
            << model->rules_view().size() << " rules)\n";
}

void run_parse(const std::string& model_path, const std::string& input_path,
               const std::string& out_path) {
  auto model = load_pcfg_file(model_path);
  std::ifstream in(input_path);
  if (!in) throw DataError("cannot open input file: " + input_path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }

  std::vector<std::string> out_lines(sentences.size());
  std::vector<char> fallbacks(sentences.size(), 0);
  parallel_for(sentences.size(), [&](std::size_t i) {
    ParseResult pr = model->parse(sentences[i]);
    out_lines[i] = serialize(pr.tree);
    fallbacks[i] = pr.fallback ? 1 : 0;
  });

  std::string text;
  for (const std::string& l : out_lines) text += l + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
  long long nf = 0;
  for (char f : fallbacks) nf += f;
  if (nf > 0) std::cerr << nf << " of " << sentences.size() << " parses used the fallback tree\n";
}

void run_eval(const Globals& g, const std::string& gold_path, const std::string& hyp_path) {
  Corpus gold = corpus_load(gold_path);
  Corpus hyp = corpus_load(hyp_path);
  std::vector<Tree> hyps;
  hyps.reserve(hyp.size());
  for (const auto& e : hyp.entries) hyps.push_back(e.gold);
  ScoreReport r = score_corpus(gold, hyps, g.policy());

  TextTable table({"P", "R", "F", "Exact", "both", "hyp-only", "gold-only", "entries"});
  table.add_row(cat(score_cells(r),
                    {std::to_string(r.totals.a), std::to_string(r.totals.b),
                     std::to_string(r.totals.c), std::to_string(r.entries)}));
  std::cout << table.str();

  if (!g.csv_path.empty()) {
    std::string csv = "P,R,F,Exact,both,hyp_only,gold_only,entries,exact_matches\n";
    csv += csv_row(cat(score_cells(r),
                       {std::to_string(r.totals.a), std::to_string(r.totals.b),
                        std::to_string(r.totals.c), std::to_string(r.entries),
                        std::to_string(r.exact_matches)}));
    write_text_file(g.csv_path, csv);
  }
}

void run_vote(const Globals& g, const std::string& inputs_list, const std::string& weights_list,
              const std::string& out_path) {
  std::vector<std::string> paths = Globals::split_list(inputs_list);
  if (paths.empty()) throw CLI::ValidationError("ensemble", "vote needs --inputs f1,f2,...");
  std::vector<double> weights = parse_double_list(weights_list, "weight");
  if (!weights.empty() && weights.size() != paths.size())
    throw DataError("got " + std::to_string(weights.size()) + " weights for " +
                    std::to_string(paths.size()) + " inputs");

  std::vector<Corpus> inputs;
  inputs.reserve(paths.size());
  for (const std::string& p : paths) inputs.push_back(corpus_load(p));
  for (std::size_t i = 1; i < inputs.size(); ++i)
    if (inputs[i].size() != inputs[0].size())
      throw DataError(paths[i] + " has " + std::to_string(inputs[i].size()) + " trees, " +
                      paths[0] + " has " + std::to_string(inputs[0].size()));

  const std::size_t n = inputs[0].size();
  ScoringPolicy policy = g.policy();
  std::vector<Tree> combined(n, Tree::leaf("x"));
  parallel_for(n, [&](std::size_t i) {
    const std::vector<std::string>& sentence = inputs[0].entries[i].sentence;
    std::vector<ParseResult> parses;
    parses.reserve(inputs.size());
    for (std::size_t m = 0; m < inputs.size(); ++m) {
      if (inputs[m].entries[i].sentence != sentence)
        throw DataError("inputs disagree on the words of tree " + std::to_string(i + 1));
      parses.push_back(ParseResult{inputs[m].entries[i].gold, false});
    }
    combined[i] = combine_members(parses, weights, sentence, policy).tree;
  });

  Corpus out;
  for (Tree& t : combined) out.add(std::move(t));
  corpus_save(out, out_path);
  std::cout << "voted " << n << " trees from " << paths.size() << " inputs -> " << out_path
            << "\n";
}

void run_bag(const Globals& g, const std::string& train_path, const std::string& test_path,
             int k) {
  require_flag(g.out_dir, "bag needs --out-dir");
  ensure_out_dir(g.out_dir);

  ordered_json config;
  config["command"] = "bag";
  config["train"] = train_path;
  config["test"] = test_path;
  config["k"] = k;
  config["seed"] = g.seed;
  config["policy"] = g.policy_json();
  write_config(g.out_dir, config);
  write_seed(g.out_dir, g.seed);

  Corpus train = corpus_load(train_path);
  Corpus test = corpus_load(test_path);
  PcfgInduction learner;
  BagEnsemble ensemble = train_bagged(train, k, learner, g.seed);
  ensemble.params.policy = g.policy();
  EnsembleCurve curve = evaluate_curve(ensemble, train, test);

  write_text_file(g.out_dir + "/bag_curve.csv", curve_csv(curve));
  write_text_file(g.out_dir + "/summary.csv", summary_csv(curve));
  write_text_file(g.out_dir + "/summary.txt", summary_text(curve, ensemble.fingerprint()));
  write_models(g.out_dir, ensemble.members, "member");

  std::cout << "bagged " << k << " members on " << train.size() << " sentences\n"
            << "Initial test F " << format_percent(curve.initial().test.f) << ", Final test F "
            << format_percent(curve.final_row().test.f) << ", BestF test F "
            << format_percent(curve.best_f().test.f) << " at prefix "
            << curve.best_test_prefix << "\n"
            << "outputs in " << g.out_dir << "\n";
}

void run_boost(const Globals& g, const std::string& train_path, const std::string& test_path,
               int rounds, bool literal_alpha_vote, int bins) {
  require_flag(g.out_dir, "boost needs --out-dir");
  ensure_out_dir(g.out_dir);

  ordered_json config;
  config["command"] = "boost";
  config["train"] = train_path;
  config["test"] = test_path;
  config["rounds"] = rounds;
  config["seed"] = g.seed;
  config["literal_alpha_vote"] = literal_alpha_vote;
  config["bins"] = bins;
  config["policy"] = g.policy_json();
  write_config(g.out_dir, config);
  write_seed(g.out_dir, g.seed);

  Corpus train = corpus_load(train_path);
  Corpus test = corpus_load(test_path);
  PcfgInduction learner;
  BoostOptions options;
  options.policy = g.policy();
  options.literal_alpha_vote = literal_alpha_vote;
  BoostOutcome outcome = boost(train, rounds, learner, g.seed, options);

  BoostTrace trace = to_trace(outcome.ensemble);
  {
    std::ostringstream buf;
    save_trace_csv(trace, buf);
    write_text_file(g.out_dir + "/trace.csv", buf.str());
  }

  if (outcome.aborted) {
    std::cerr << "round " << outcome.aborted_round
              << " had no weighted agreement; wrote the partial trace ("
              << trace.rounds.size() << " rounds) to " << g.out_dir << "\n";
    throw UnboostableRoundError(outcome.aborted_round);
  }

  {
    std::string csv = "iteration,bin,mean_weight\n";
    for (const WeightRankRow& row : weight_rank_curves(trace, bins))
      csv += csv_row({std::to_string(row.iteration), std::to_string(row.bin),
                      format_double(row.mean_weight)});
    write_text_file(g.out_dir + "/curves.csv", csv);
  }

  const BoostEnsemble& ens = outcome.ensemble;
  EnsembleCurve curve = prefix_curve(parse_all_members(ens.members, train),
                                     parse_all_members(ens.members, test), train, test,
                                     ens.vote_weights, options.policy);
  write_text_file(g.out_dir + "/boost_curve.csv", curve_csv(curve));
  write_text_file(g.out_dir + "/summary.csv", summary_csv(curve));

  TextTable round_table({"t", "alpha", "vote_w", "Z", "clamped"});
  for (const BoostRound& r : ens.rounds)
    round_table.add_row({std::to_string(r.t), format_double(r.alpha),
                         format_double(r.vote_weight), format_double(r.z),
                         r.clamped ? "yes" : "no"});
  write_text_file(g.out_dir + "/summary.txt",
                  "Rounds\n\n" + round_table.str() + "\n" + summary_text(curve, ""));
  write_models(g.out_dir, ens.members, "round");

  std::cout << "boosted " << rounds << " rounds on " << train.size() << " sentences\n"
            << "Initial test F " << format_percent(curve.initial().test.f) << ", Final test F "
            << format_percent(curve.final_row().test.f) << ", BestF test F "
            << format_percent(curve.best_f().test.f) << " at prefix "
            << curve.best_test_prefix << "\n"
            << "outputs in " << g.out_dir << "\n";
}

void run_trim(const std::string& train_path, const std::string& stable_path,
              const std::string& removed_path, int replication) {
  Corpus corpus = corpus_load(train_path);
  PcfgInduction learner;
  TrimResult result = trim_corpus(corpus, learner, replication);
  corpus_save(result.stable, stable_path);
  corpus_save(result.removed, removed_path);

  std::cout << "stable: " << result.stable.size() << " of " << corpus.size() << " entries -> "
            << stable_path << "\n"
            << "removed: " << result.removed.size() << " -> " << removed_path << "\n";
  for (std::size_t i = 0; i < result.removed_indices.size(); ++i)
    std::cout << "  entry " << result.removed_indices[i] + 1 << ": " << result.reasons[i]
              << "\n";
}

void run_rank(const Globals& g, const std::string& trace_path, const std::string& train_path,
              std::size_t top, const std::string& out_path) {
  BoostTrace trace = load_trace_file(trace_path);
  Corpus corpus = corpus_load(train_path);
  std::vector<RankedEntry> ranked = rank_inconsistencies(trace, corpus, top);

  std::string report = "Entries by final boosting weight (heaviest first).\n"
                       "High weight marks annotations the learner kept failing to fit;\n"
                       "review them for conflicts with the rest of the corpus.\n\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    report += "rank " + std::to_string(i + 1) + "  entry " + std::to_string(ranked[i].index + 1) +
              "  weight " + format_double(ranked[i].weight) + "\n  " + ranked[i].tree_text +
              "\n";
  }
  write_text_file(out_path, report);

  if (!g.csv_path.empty()) {
    std::string csv = "rank,entry,weight,tree\n";
    for (std::size_t i = 0; i < ranked.size(); ++i)
      csv += csv_row({std::to_string(i + 1), std::to_string(ranked[i].index + 1),
                      format_double(ranked[i].weight), ranked[i].tree_text});
    write_text_file(g.csv_path, csv);
  }
  std::cout << "ranked " << ranked.size() << " entries -> " << out_path << "\n";
}

void run_curves(const Globals& g, const std::string& trace_path, int bins) {
  require_flag(g.csv_path, "curves needs --csv");
  BoostTrace trace = load_trace_file(trace_path);
  std::string csv = "iteration,bin,mean_weight\n";
  std::size_t rows = 0;
  for (const WeightRankRow& row : weight_rank_curves(trace, bins)) {
    csv += csv_row({std::to_string(row.iteration), std::to_string(row.bin),
                    format_double(row.mean_weight)});
    ++rows;
  }
  write_text_file(g.csv_path, csv);
  std::cout << "wrote " << rows << " rows -> " << g.csv_path << "\n";
}

void run_learning_curve(const Globals& g, const std::string& train_path,
                        const std::string& test_path, const std::string& sizes_list) {
  require_flag(g.out_dir, "learning-curve needs --out-dir");
  ensure_out_dir(g.out_dir);

  Corpus train = corpus_load(train_path);
  Corpus test = corpus_load(test_path);
  std::vector<std::size_t> sizes = sizes_list.empty()
                                       ? default_size_ladder(train.size())
                                       : parse_size_list(sizes_list, "size");

  ordered_json config;
  config["command"] = "learning-curve";
  config["train"] = train_path;
  config["test"] = test_path;
  config["sizes"] = sizes;
  config["seed"] = g.seed;
  config["policy"] = g.policy_json();
  write_config(g.out_dir, config);
  write_seed(g.out_dir, g.seed);

  PcfgInduction learner;
  std::vector<LearningCurveRow> rows = learning_curve(train, test, sizes, learner, g.seed,
                                                      g.policy());

  std::string csv = "size,set,P,R,F,Exact\n";
  TextTable table({"size", "trainP", "trainR", "trainF", "trainEx", "testP", "testR", "testF",
                   "testEx"});
  for (const LearningCurveRow& row : rows) {
    csv += csv_row(cat({std::to_string(row.size), "train"}, score_cells(row.train)));
    csv += csv_row(cat({std::to_string(row.size), "test"}, score_cells(row.test)));
    table.add_row(cat(cat({std::to_string(row.size)}, score_cells(row.train)),
                      score_cells(row.test)));
  }
  write_text_file(g.out_dir + "/learning_curve.csv", csv);
  write_text_file(g.out_dir + "/summary.txt", table.str());
  std::cout << table.str() << "outputs in " << g.out_dir << "\n";
}

void run_synth(const Globals& g, const std::string& grammar_path, std::size_t n, double noise,
               int max_words, const std::string& out_path, const std::string& planted_path) {
  SynthGrammar grammar =
      grammar_path.empty() ? SynthGrammar::builtin() : SynthGrammar::from_file(grammar_path);
  SynthResult result = synth_corpus(grammar, n, noise, g.seed, max_words);
  corpus_save(result.corpus, out_path);
  if (!planted_path.empty()) {
    std::string text;
    for (std::size_t idx : result.planted) text += std::to_string(idx) + "\n";
    write_text_file(planted_path, text);
  }
  std::cout << "wrote " << result.corpus.size() << " sentences (" << result.planted.size()
            << " planted conflicts) -> " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treebank parser ensembles: bagging, boosting, voting, and corpus QC"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
  app.add_option("--policy-root", g.policy_root,
                 "root label excluded from scoring; empty string scores the root too")
      ->capture_default_str();
  app.add_flag("--policy-count-preterminals", g.count_preterminals,
               "score preterminal (tag) spans too");
  app.add_option("--punct-set", g.punct_list,
                 "comma-separated preterminal labels deleted before scoring");
  app.add_option("--csv", g.csv_path, "machine-readable CSV output path");
  app.add_option("--out-dir", g.out_dir, "run output directory");

  auto* corpus_cmd = app.add_subcommand("corpus", "corpus file utilities");
  corpus_cmd->require_subcommand(1);
  corpus_cmd->fallthrough();
  std::string validate_path;
  auto* validate_cmd =
      corpus_cmd->add_subcommand("validate", "check every line parses as one tree");
  validate_cmd->fallthrough();
  validate_cmd->add_option("path", validate_path, "corpus file")->required();
  validate_cmd->callback([&] { run_validate(validate_path); });

  struct {
    std::string train, out;
  } induce_opt;
  auto* induce_cmd = app.add_subcommand("induce", "train a parser on a corpus");
  induce_cmd->fallthrough();
  induce_cmd->add_option("--train", induce_opt.train, "training corpus")->required();
  induce_cmd->add_option("--out", induce_opt.out, "model output path")->required();
  induce_cmd->callback([&] { run_induce(g, induce_opt.train, induce_opt.out); });

  struct {
    std::string model, input, out;
  } parse_opt;
  auto* parse_cmd = app.add_subcommand("parse", "parse tokenized sentences with a model");
  parse_cmd->fallthrough();
  parse_cmd->add_option("--model", parse_opt.model, "model file")->required();
  parse_cmd->add_option("--input", parse_opt.input, "one space-separated sentence per line")
      ->required();
  parse_cmd->add_option("--out", parse_opt.out, "output corpus path (default stdout)");
  parse_cmd->callback([&] { run_parse(parse_opt.model, parse_opt.input, parse_opt.out); });

  struct {
    std::string gold, hyp;
  } eval_opt;
  auto* eval_cmd = app.add_subcommand("eval", "score a hypothesis corpus against gold");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--gold", eval_opt.gold, "gold corpus")->required();
  eval_cmd->add_option("--hyp", eval_opt.hyp, "hypothesis corpus")->required();
  eval_cmd->callback([&] { run_eval(g, eval_opt.gold, eval_opt.hyp); });

  struct {
    std::string inputs, weights, out;
  } vote_opt;
  auto* vote_cmd = app.add_subcommand("vote", "combine parallel parse files by voting");
  vote_cmd->fallthrough();
  vote_cmd->add_option("--inputs", vote_opt.inputs, "comma-separated parse files")->required();
  vote_cmd->add_option("--weights", vote_opt.weights, "comma-separated member weights");
  vote_cmd->add_option("--out", vote_opt.out, "combined corpus output")->required();
  vote_cmd->callback([&] { run_vote(g, vote_opt.inputs, vote_opt.weights, vote_opt.out); });

  struct {
    std::string train, test;
    int k = 15;
  } bag_opt;
  auto* bag_cmd = app.add_subcommand("bag", "train and evaluate a bagged ensemble");
  bag_cmd->fallthrough();
  bag_cmd->add_option("--train", bag_opt.train, "training corpus")->required();
  bag_cmd->add_option("--test", bag_opt.test, "test corpus")->required();
  bag_cmd->add_option("--k", bag_opt.k, "ensemble size")->capture_default_str();
  bag_cmd->callback([&] { run_bag(g, bag_opt.train, bag_opt.test, bag_opt.k); });

  struct {
    std::string train, test;
    int rounds = 15;
    bool literal_alpha = false;
    int bins = 1000;
  } boost_opt;
  auto* boost_cmd = app.add_subcommand("boost", "train and evaluate a boosted ensemble");
  boost_cmd->fallthrough();
  boost_cmd->add_option("--train", boost_opt.train, "training corpus")->required();
  boost_cmd->add_option("--test", boost_opt.test, "test corpus")->required();
  boost_cmd->add_option("--rounds", boost_opt.rounds, "boosting rounds")->capture_default_str();
  boost_cmd->add_flag("--literal-alpha-vote", boost_opt.literal_alpha,
                      "vote with weight alpha instead of ln(1/alpha)");
  boost_cmd->add_option("--bins", boost_opt.bins, "rank bins for curves.csv")
      ->capture_default_str();
  boost_cmd->callback([&] {
    run_boost(g, boost_opt.train, boost_opt.test, boost_opt.rounds, boost_opt.literal_alpha,
              boost_opt.bins);
  });

  struct {
    std::string train, stable, removed;
    int replication = 10;
  } trim_opt;
  auto* trim_cmd =
      app.add_subcommand("trim", "split a corpus into memorizable and unmemorizable entries");
  trim_cmd->fallthrough();
  trim_cmd->add_option("--train", trim_opt.train, "corpus to trim")->required();
  trim_cmd->add_option("--out-stable", trim_opt.stable, "memorizable entries output")
      ->required();
  trim_cmd->add_option("--out-removed", trim_opt.removed, "unmemorizable entries output")
      ->required();
  trim_cmd->add_option("--replication", trim_opt.replication,
                       "copies of the entry used for the single-sentence model")
      ->capture_default_str();
  trim_cmd->callback(
      [&] { run_trim(trim_opt.train, trim_opt.stable, trim_opt.removed, trim_opt.replication); });

  struct {
    std::string trace, train, out;
    std::size_t top = 100;
  } rank_opt;
  auto* rank_cmd =
      app.add_subcommand("rank", "rank corpus entries by final boosting weight");
  rank_cmd->fallthrough();
  rank_cmd->add_option("--trace", rank_opt.trace, "trace.csv from a boost run")->required();
  rank_cmd->add_option("--train", rank_opt.train, "the corpus the trace was boosted on")
      ->required();
  rank_cmd->add_option("--top", rank_opt.top, "entries to keep")->capture_default_str();
  rank_cmd->add_option("--out", rank_opt.out, "report output path")->required();
  rank_cmd->callback(
      [&] { run_rank(g, rank_opt.trace, rank_opt.train, rank_opt.top, rank_opt.out); });

  struct {
    std::string trace;
    int bins = 1000;
  } curves_opt;
  auto* curves_cmd =
      app.add_subcommand("curves", "rank-binned weight curves from a boosting trace");
  curves_cmd->fallthrough();
  curves_cmd->add_option("--trace", curves_opt.trace, "trace.csv from a boost run")->required();
  curves_cmd->add_option("--bins", curves_opt.bins, "equal-count rank bins")
      ->capture_default_str();
  curves_cmd->callback([&] { run_curves(g, curves_opt.trace, curves_opt.bins); });

  struct {
    std::string train, test, sizes;
  } curve_opt;
  auto* lc_cmd = app.add_subcommand("learning-curve",
                                    "scores for parsers trained on growing corpus prefixes");
  lc_cmd->fallthrough();
  lc_cmd->add_option("--train", curve_opt.train, "training corpus")->required();
  lc_cmd->add_option("--test", curve_opt.test, "test corpus")->required();
  lc_cmd->add_option("--sizes", curve_opt.sizes,
                     "comma-separated training sizes (default: built-in ladder)");
  lc_cmd->callback([&] { run_learning_curve(g, curve_opt.train, curve_opt.test, curve_opt.sizes); });

  struct {
    std::string grammar, out, planted;
    std::size_t n = 1000;
    double noise = 0.0;
    int max_words = 40;
  } synth_opt;
  auto* synth_cmd = app.add_subcommand("synth", "sample a synthetic corpus from a PCFG");
  synth_cmd->fallthrough();
  synth_cmd->add_option("--grammar", synth_opt.grammar,
                        "generator grammar file (default: built-in ambiguous grammar)");
  synth_cmd->add_option("--n", synth_opt.n, "sentences to sample")->capture_default_str();
  synth_cmd->add_option("--noise", synth_opt.noise, "label-conflict rate in [0,1)")
      ->capture_default_str();
  synth_cmd->add_option("--max-words", synth_opt.max_words, "redraw sentences longer than this")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth_opt.out, "corpus output path")->required();
  synth_cmd->add_option("--planted", synth_opt.planted,
                        "write planted entry indexes (0-based) here");
  synth_cmd->callback([&] {
    run_synth(g, synth_opt.grammar, synth_opt.n, synth_opt.noise, synth_opt.max_words,
              synth_opt.out, synth_opt.planted);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const UnboostableRoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
