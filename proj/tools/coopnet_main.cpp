// coopnet — candidate-summary reranking and evaluation CLI.
//
// Subcommands: rerank, train-adjacency, sample-pairs, eval, analyze.
// Exit codes: 0 success, 2 validation error, 1 internal error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coopnet/corpus.hpp"
#include "coopnet/discriminators.hpp"
#include "coopnet/errors.hpp"
#include "coopnet/evalmetrics.hpp"
#include "coopnet/reranker.hpp"
#include "coopnet/text.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace coopnet;

namespace {

// Resolves an input path, falling back to $COOPNET_DATA_DIR/<path> when the
// plain path does not exist.
std::string resolve_input(const std::string& path) {
  if (path.empty() || fs::exists(path)) return path;
  const char* prefix = std::getenv("COOPNET_DATA_DIR");
  if (prefix != nullptr) {
    fs::path candidate = fs::path(prefix) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw errors::io_error(tmp.string(), "cannot open file for writing");
    out << content;
  }
  fs::rename(tmp, target);
}

double round4(double value) { return std::round(value * 1e4) / 1e4; }

json rouge_json(const RougeTriple& t) {
  return {{"p", round4(t.precision)}, {"r", round4(t.recall)},
          {"f1", round4(t.f1)}};
}

json overlap_json(const DiscourseOverlapReport& r) {
  return {{"overlap1_pct", round4(r.overlap1_pct)},
          {"overlap2_pct", round4(r.overlap2_pct)},
          {"discourse_pct", round4(r.discourse_pct)}};
}

struct CommonOptions {
  std::string docs_path;
  std::string candidates_path;
  std::string pairs_path;
  std::string model_path;
  std::string objective = "ordering";
  std::string backend = "builtin";
  double lambda_gen = 0.5;
  double lambda_disc = 0.5;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string stopwords_path;
  std::string connectives_path;
  std::string role_rules_path;
  int max_sentence_tokens = 200;
  int max_span_k = 2;
  std::size_t article_max = 800;
  std::size_t summary_max = 200;
  int per_doc = 1;
  double learning_rate = 0.1;
  int epochs = 20;
};

// Custom lexicons replace the defaults process-wide so every scorer and
// tokenizer call sees them; the role-rule table is carried explicitly.
struct Resources {
  std::optional<RoleRuleTable> role_rules;

  const RoleRuleTable& rules() const {
    return role_rules ? *role_rules : RoleRuleTable::bundled();
  }
};

Resources load_resources(const CommonOptions& opt) {
  Resources res;
  if (!opt.stopwords_path.empty()) {
    Lexicon::set_default_stopwords(Lexicon::from_file(
        resolve_input(opt.stopwords_path), Lexicon::Kind::Stopword));
  }
  if (!opt.connectives_path.empty()) {
    Lexicon::set_default_connectives(Lexicon::from_file(
        resolve_input(opt.connectives_path), Lexicon::Kind::Connective));
  }
  if (!opt.role_rules_path.empty()) {
    res.role_rules = RoleRuleTable::from_file(resolve_input(opt.role_rules_path));
  }
  return res;
}

json config_echo(const std::string& command, const CommonOptions& opt) {
  json cfg;
  cfg["command"] = command;
  if (!opt.docs_path.empty()) cfg["docs"] = opt.docs_path;
  if (!opt.candidates_path.empty()) cfg["candidates"] = opt.candidates_path;
  if (!opt.pairs_path.empty()) cfg["pairs"] = opt.pairs_path;
  if (!opt.model_path.empty()) cfg["model"] = opt.model_path;
  cfg["objective"] = opt.objective;
  cfg["backend"] = opt.backend;
  cfg["lambda_gen"] = opt.lambda_gen;
  cfg["lambda_disc"] = opt.lambda_disc;
  cfg["seed"] = opt.seed;
  cfg["max_sentence_tokens"] = opt.max_sentence_tokens;
  cfg["article_max"] = opt.article_max;
  cfg["summary_max"] = opt.summary_max;
  return cfg;
}

// ---------------------------------------------------------------------------
// rerank

int cmd_rerank(const CommonOptions& opt) {
  Resources res = load_resources(opt);

  std::vector<Document> docs = load_documents(resolve_input(opt.docs_path));
  CandidatePools pools = load_candidates(resolve_input(opt.candidates_path), docs);

  auto objective = objective_from_string(opt.objective);
  if (!objective) {
    throw ValidationError(ErrorKind::BadConfig,
                          "unknown objective \"" + opt.objective + "\"");
  }
  if (opt.backend != "external" && opt.backend != "builtin") {
    throw ValidationError(ErrorKind::BadConfig,
                          "unknown backend \"" + opt.backend +
                              "\" (expected external or builtin)");
  }

  RerankConfig config;
  config.lambda_gen = opt.lambda_gen;
  config.lambda_disc = opt.lambda_disc;
  config.objective = *objective;
  config.backend = opt.backend == "external" ? ScoreBackend::External
                                             : ScoreBackend::Builtin;
  config.max_sentence_tokens = opt.max_sentence_tokens;
  config.max_span_k = opt.max_span_k;
  config.role_rules = &res.rules();

  AdjacencyModel model;
  if (*objective == DiscriminatorObjective::Adjacency &&
      config.backend == ScoreBackend::Builtin) {
    if (opt.model_path.empty()) {
      throw ValidationError(ErrorKind::MissingModel,
                            "adjacency with the builtin backend needs --model");
    }
    model = AdjacencyModel::load(resolve_input(opt.model_path));
    config.adjacency_model = &model;
  }

  std::ostringstream out;
  json cfg = config_echo("rerank", opt);
  cfg["type"] = "config";
  out << cfg.dump() << '\n';

  std::size_t docs_without_pool = 0;
  for (const Document& raw_doc : docs) {
    auto pool_it = pools.find(raw_doc.id);
    if (pool_it == pools.end()) {
      ++docs_without_pool;
      continue;
    }
    Document doc = truncate_inputs(raw_doc, opt.article_max, opt.summary_max);
    FilterResult filtered = filter_pool(pool_it->second, opt.max_sentence_tokens);
    std::vector<ScoreBreakdown> ranked = rerank(doc, filtered.kept, config);

    for (const auto& [index, reason] : filtered.removed) {
      json line;
      line["type"] = "filtered";
      line["doc_id"] = doc.id;
      line["candidate_index"] = index;
      line["reason"] = reason;
      out << line.dump() << '\n';
    }
    for (ScoreBreakdown& breakdown : ranked) {
      if (filtered.bypassed) breakdown.flags.push_back("filter-bypassed");
      json line;
      line["type"] = "candidate";
      line["doc_id"] = breakdown.doc_id;
      line["candidate_index"] = breakdown.candidate_index;
      line["gen_term"] = breakdown.gen_term;
      line["disc_term"] = breakdown.disc_term;
      line["combined"] = breakdown.combined;
      line["rank"] = breakdown.rank;
      line["flags"] = breakdown.flags;
      out << line.dump() << '\n';
    }
    json selection;
    selection["type"] = "selection";
    selection["doc_id"] = doc.id;
    selection["selected_index"] = ranked.front().candidate_index;
    out << selection.dump() << '\n';
  }

  if (docs_without_pool > 0) {
    std::cerr << "warning: " << docs_without_pool
              << " document(s) had no candidates and were skipped\n";
  }
  write_file_atomic((fs::path(opt.out_dir) / "rerank.jsonl").string(), out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// train-adjacency

int cmd_train_adjacency(const CommonOptions& opt) {
  std::vector<SentencePairExample> pairs = load_pairs(resolve_input(opt.pairs_path));
  if (pairs.empty()) {
    throw ValidationError(ErrorKind::EmptyInput, "no training pairs loaded");
  }
  TrainResult result =
      train_adjacency(pairs, opt.seed, opt.learning_rate, opt.epochs);

  json cfg = config_echo("train-adjacency", opt);
  cfg["learning_rate"] = opt.learning_rate;
  cfg["epochs"] = opt.epochs;

  json model_json = json::parse(result.model.to_json_string());
  model_json["config"] = cfg;
  write_file_atomic((fs::path(opt.out_dir) / "adjacency_model.json").string(),
                    model_json.dump(2) + "\n");

  std::ostringstream csv;
  csv << "# " << cfg.dump() << '\n';
  csv << "epoch,loss\n";
  for (std::size_t epoch = 0; epoch < result.epoch_losses.size(); ++epoch) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.12f\n", epoch,
                  result.epoch_losses[epoch]);
    csv << buf;
  }
  write_file_atomic((fs::path(opt.out_dir) / "loss_curve.csv").string(),
                    csv.str());

  std::cerr << "trained on " << pairs.size() << " pairs; final loss "
            << result.model.meta.final_loss << ", train accuracy "
            << result.model.meta.train_accuracy << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sample-pairs

int cmd_sample_pairs(const CommonOptions& opt) {
  std::vector<Document> docs = load_documents(resolve_input(opt.docs_path));
  PairSample sample = sample_pairs(docs, opt.seed, opt.per_doc);

  json cfg = config_echo("sample-pairs", opt);
  cfg["per_doc"] = opt.per_doc;

  std::ostringstream out;
  out << "# " << cfg.dump() << '\n';
  for (const SentencePairExample& pair : sample.pairs) {
    json line;
    line["first"] = pair.first;
    line["second"] = pair.second;
    line["label"] = pair.label;
    line["source_doc"] = pair.source_doc;
    out << line.dump() << '\n';
  }
  write_file_atomic((fs::path(opt.out_dir) / "pairs.jsonl").string(), out.str());

  if (!sample.skipped_docs.empty()) {
    std::cerr << "warning: skipped " << sample.skipped_docs.size()
              << " document(s) with reference summaries under 5 sentences\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct SystemOutput {
  std::string name;
  std::map<std::string, std::string> summaries;  // doc id -> summary text
};

SystemOutput load_system(const std::string& spec) {
  std::size_t eq = spec.find('=');
  if (eq == std::string::npos) {
    throw ValidationError(ErrorKind::BadConfig,
                          "--system expects NAME=path, got \"" + spec + "\"");
  }
  SystemOutput sys;
  sys.name = spec.substr(0, eq);
  std::string path = resolve_input(spec.substr(eq + 1));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw errors::io_error(path, "cannot open system output file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw errors::malformed_line(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.contains("id") || !obj.contains("summary")) {
      throw errors::missing_field(line_no, "id/summary");
    }
    try {
      sys.summaries[obj["id"].get<std::string>()] =
          obj["summary"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw errors::malformed_line(line_no, e.what());
    }
  }
  return sys;
}

json eval_system(const std::vector<Document>& docs,
                 const std::map<std::string, std::string>& summaries,
                 const Lexicon& connectives, OverlapDenominator denom) {
  double p1 = 0, r1 = 0, f1 = 0, p2 = 0, r2 = 0, f2 = 0, pl = 0, rl = 0, fl = 0;
  std::vector<DiscourseOverlapReport> overlaps;
  json per_doc = json::array();
  for (const Document& doc : docs) {
    const std::string& summary = summaries.at(doc.id);
    RougeScores scores = rouge_all(summary, doc.reference_summary);
    DiscourseOverlapReport overlap =
        discourse_overlap(summary, doc.reference_summary, connectives, denom);
    overlaps.push_back(overlap);
    p1 += scores.r1.precision; r1 += scores.r1.recall; f1 += scores.r1.f1;
    p2 += scores.r2.precision; r2 += scores.r2.recall; f2 += scores.r2.f1;
    pl += scores.rl.precision; rl += scores.rl.recall; fl += scores.rl.f1;
    json entry;
    entry["id"] = doc.id;
    entry["rouge1"] = rouge_json(scores.r1);
    entry["rouge2"] = rouge_json(scores.r2);
    entry["rougel"] = rouge_json(scores.rl);
    per_doc.push_back(entry);
  }
  double n = static_cast<double>(docs.size());
  json out;
  out["rouge1"] = {{"p", round4(p1 / n)}, {"r", round4(r1 / n)}, {"f1", round4(f1 / n)}};
  out["rouge2"] = {{"p", round4(p2 / n)}, {"r", round4(r2 / n)}, {"f1", round4(f2 / n)}};
  out["rougel"] = {{"p", round4(pl / n)}, {"r", round4(rl / n)}, {"f1", round4(fl / n)}};
  out["discourse"] = overlap_json(mean_overlap(overlaps));
  out["n_docs"] = docs.size();
  out["per_doc"] = per_doc;
  return out;
}

int cmd_eval(const CommonOptions& opt, const std::vector<std::string>& system_specs,
             const std::string& denominator) {
  Resources res = load_resources(opt);
  std::vector<Document> raw_docs = load_documents(resolve_input(opt.docs_path));
  std::vector<Document> docs;
  docs.reserve(raw_docs.size());
  for (const Document& doc : raw_docs) {
    docs.push_back(truncate_inputs(doc, opt.article_max, opt.summary_max));
  }
  if (docs.empty()) {
    throw ValidationError(ErrorKind::EmptyInput, "no documents to evaluate");
  }

  OverlapDenominator denom = denominator == "generated"
                                 ? OverlapDenominator::GeneratedGrams
                                 : OverlapDenominator::OverlappingGrams;

  json report;
  json cfg = config_echo("eval", opt);
  cfg["overlap_denominator"] = denominator;
  report["config"] = cfg;
  report["systems"] = json::object();

  for (const std::string& spec : system_specs) {
    SystemOutput sys = load_system(spec);
    for (const Document& doc : docs) {
      if (!sys.summaries.count(doc.id)) {
        throw ValidationError(ErrorKind::IdMismatch,
                              "system \"" + sys.name + "\" has no summary for \"" +
                                  doc.id + "\"");
      }
    }
    if (sys.summaries.size() != docs.size()) {
      throw ValidationError(ErrorKind::IdMismatch,
                            "system \"" + sys.name +
                                "\" covers a different document set");
    }
    report["systems"][sys.name] =
        eval_system(docs, sys.summaries, Lexicon::default_connectives(), denom);
  }

  // Lede-3 baseline row, always present.
  std::map<std::string, std::string> lede;
  for (const Document& doc : docs) lede[doc.id] = lede3(doc);
  report["systems"]["lede-3"] = eval_system(docs, lede, Lexicon::default_connectives(), denom);

  write_file_atomic((fs::path(opt.out_dir) / "eval.json").string(),
                    report.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

std::map<std::string, int> read_selections(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw errors::io_error(path, "cannot open rerank output");
  std::map<std::string, int> selected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw errors::malformed_line(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (obj.value("type", "") != "selection") continue;
    selected[obj["doc_id"].get<std::string>()] = obj["selected_index"].get<int>();
  }
  if (selected.empty()) {
    throw ValidationError(ErrorKind::EmptyInput,
                          path + ": no selection lines found");
  }
  return selected;
}

int cmd_analyze(const CommonOptions& opt, const std::string& baseline_path,
                const std::string& reranked_path) {
  Resources res = load_resources(opt);
  std::vector<Document> docs = load_documents(resolve_input(opt.docs_path));
  CandidatePools pools = load_candidates(resolve_input(opt.candidates_path), docs);

  std::map<std::string, int> baseline = read_selections(resolve_input(baseline_path));
  std::map<std::string, int> reranked = read_selections(resolve_input(reranked_path));
  double rate = new_decision_rate(reranked, baseline);

  auto selected_text = [&](const std::map<std::string, int>& selections,
                           const std::string& doc_id) -> const std::string& {
    auto sel = selections.find(doc_id);
    if (sel == selections.end()) {
      throw ValidationError(ErrorKind::IdMismatch,
                            "no selection for document \"" + doc_id + "\"");
    }
    auto pool_it = pools.find(doc_id);
    if (pool_it == pools.end()) {
      throw ValidationError(ErrorKind::IdMismatch,
                            "no candidates for document \"" + doc_id + "\"");
    }
    for (const CandidateSummary& cand : pool_it->second) {
      if (cand.index == sel->second) return cand.text;
    }
    throw ValidationError(ErrorKind::IdMismatch,
                          "selected candidate " + std::to_string(sel->second) +
                              " not found for document \"" + doc_id + "\"");
  };

  auto word_count = [&](const std::string& text) {
    std::size_t words = 0;
    for (const Token& token : tokenize(text)) {
      if (is_word_token(token)) ++words;
    }
    return words;
  };

  double base_words = 0.0, rerank_words = 0.0;
  std::vector<DiscourseOverlapReport> overlaps;
  std::map<std::string, std::string> reference;
  for (const Document& doc : docs) reference[doc.id] = doc.reference_summary;

  for (const auto& [doc_id, index] : reranked) {
    (void)index;
    const std::string& base_text = selected_text(baseline, doc_id);
    const std::string& rerank_text = selected_text(reranked, doc_id);
    base_words += static_cast<double>(word_count(base_text));
    rerank_words += static_cast<double>(word_count(rerank_text));
    auto ref = reference.find(doc_id);
    if (ref == reference.end()) {
      throw ValidationError(ErrorKind::IdMismatch,
                            "rerank output references unknown document \"" +
                                doc_id + "\"");
    }
    overlaps.push_back(
        discourse_overlap(rerank_text, ref->second, Lexicon::default_connectives()));
  }
  double n = static_cast<double>(reranked.size());

  json report;
  json cfg = config_echo("analyze", opt);
  cfg["baseline"] = baseline_path;
  cfg["reranked"] = reranked_path;
  report["config"] = cfg;
  report["n_docs"] = reranked.size();
  report["new_decision_rate"] = round4(rate);
  report["baseline"] = {{"avg_selected_words", round4(base_words / n)}};
  report["reranked"] = {{"avg_selected_words", round4(rerank_words / n)},
                        {"discourse", overlap_json(mean_overlap(overlaps))}};

  write_file_atomic((fs::path(opt.out_dir) / "analysis.json").string(),
                    report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative generator-discriminator reranking for "
               "abstractive summaries"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::vector<std::string> system_specs;
  std::string overlap_denominator = "overlapping";
  std::string baseline_path, reranked_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Random seed recorded in outputs");
    cmd->add_option("--out-dir", opt.out_dir, "Output directory");
    cmd->add_option("--stopwords", opt.stopwords_path, "Stopword lexicon path");
    cmd->add_option("--connectives", opt.connectives_path,
                    "Connective lexicon path");
  };

  CLI::App* rerank_cmd = app.add_subcommand("rerank", "Filter, score and rank candidate pools");
  rerank_cmd->add_option("--docs", opt.docs_path, "documents.jsonl")->required();
  rerank_cmd->add_option("--candidates", opt.candidates_path, "candidates.jsonl")->required();
  rerank_cmd->add_option("--objective", opt.objective,
                         "coverage|ordering|adjacency|factuality");
  rerank_cmd->add_option("--backend", opt.backend, "external|builtin");
  rerank_cmd->add_option("--lambda-gen", opt.lambda_gen, "Generator weight");
  rerank_cmd->add_option("--lambda-disc", opt.lambda_disc, "Discriminator weight");
  rerank_cmd->add_option("--model", opt.model_path,
                         "Adjacency model JSON (builtin backend)");
  rerank_cmd->add_option("--role-rules", opt.role_rules_path,
                         "Cue-phrase table for the heuristic labeler");
  rerank_cmd->add_option("--max-sentence-tokens", opt.max_sentence_tokens,
                         "Pool filter threshold");
  rerank_cmd->add_option("--max-span-k", opt.max_span_k,
                         "Max evidence span order");
  rerank_cmd->add_option("--article-max", opt.article_max,
                         "Article truncation (tokens)");
  rerank_cmd->add_option("--summary-max", opt.summary_max,
                         "Reference summary truncation (tokens)");
  add_common(rerank_cmd);

  CLI::App* train_cmd = app.add_subcommand("train-adjacency",
                                           "Train the logistic adjacency classifier");
  train_cmd->add_option("--pairs", opt.pairs_path, "pairs.jsonl")->required();
  train_cmd->add_option("--lr", opt.learning_rate, "Learning rate");
  train_cmd->add_option("--epochs", opt.epochs, "Training epochs");
  add_common(train_cmd);

  CLI::App* sample_cmd = app.add_subcommand("sample-pairs",
                                            "Sample adjacency training pairs from reference summaries");
  sample_cmd->add_option("--docs", opt.docs_path, "documents.jsonl")->required();
  sample_cmd->add_option("--per-doc", opt.per_doc, "Draws per eligible document");
  add_common(sample_cmd);

  CLI::App* eval_cmd = app.add_subcommand("eval",
                                          "ROUGE and discourse-overlap report with a Lede-3 baseline");
  eval_cmd->add_option("--docs", opt.docs_path, "documents.jsonl")->required();
  eval_cmd->add_option("--system", system_specs,
                       "NAME=path of {\"id\",\"summary\"} JSONL (repeatable)");
  eval_cmd->add_option("--overlap-denominator", overlap_denominator,
                       "overlapping|generated");
  eval_cmd->add_option("--article-max", opt.article_max,
                       "Article truncation (tokens)");
  eval_cmd->add_option("--summary-max", opt.summary_max,
                       "Reference summary truncation (tokens)");
  add_common(eval_cmd);

  CLI::App* analyze_cmd = app.add_subcommand("analyze",
                                             "Compare a rerank run against a pure-generator baseline run");
  analyze_cmd->add_option("--docs", opt.docs_path, "documents.jsonl")->required();
  analyze_cmd->add_option("--candidates", opt.candidates_path, "candidates.jsonl")->required();
  analyze_cmd->add_option("--baseline", baseline_path,
                          "rerank.jsonl from a --lambda-disc 0 run")->required();
  analyze_cmd->add_option("--reranked", reranked_path,
                          "rerank.jsonl from the configured objective")->required();
  add_common(analyze_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints message or help text
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(rerank_cmd)) return cmd_rerank(opt);
    if (app.got_subcommand(train_cmd)) return cmd_train_adjacency(opt);
    if (app.got_subcommand(sample_cmd)) return cmd_sample_pairs(opt);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(opt, system_specs, overlap_denominator);
    if (app.got_subcommand(analyze_cmd)) return cmd_analyze(opt, baseline_path, reranked_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
