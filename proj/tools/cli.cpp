// Copyright 2026 The aadocre Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "aadocre/anaphor_graph.hpp"
#include "aadocre/corpus.hpp"
#include "aadocre/errors.hpp"
#include "aadocre/gradcheck.hpp"
#include "aadocre/inference.hpp"
#include "aadocre/model.hpp"
#include "aadocre/synthetic.hpp"
#include "aadocre/trainer.hpp"

namespace aadocre::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Fixed file names inside --out directories.
constexpr const char* kConfigFile = "config.json";
constexpr const char* kLogFile = "train_log.jsonl";
constexpr const char* kCheckpointFile = "model.ckpt";
constexpr const char* kDevMetricsFile = "dev_metrics.json";
constexpr const char* kPredictionsFile = "predictions.jsonl";
constexpr const char* kFusedFile = "fused_predictions.jsonl";
constexpr const char* kFusionFile = "fusion.json";
constexpr const char* kSweepFile = "sweep.tsv";
constexpr const char* kCorpusFile = "corpus.json";
constexpr const char* kParsesFile = "parses.jsonl";

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus load_with_parses(const std::string& corpus, const std::string& parses, const RelationVocab* fixed = nullptr) {
  Corpus c = load_corpus(corpus, fixed);
  if (!parses.empty()) attach_parses(c.docs, load_parses(parses));
  return c;
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Flat "key = value" lines with # comments, or a flat JSON object.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<std::pair<std::string, std::string>> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& ex) {
      throw ParseError("config '" + path.string() + "': " + ex.what());
    }
    for (const auto& [k, v] : j.items()) out.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
    return out;
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config '" + path.string() + "' line " + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::size_t> anaphor_counts(const std::vector<Document>& docs) {
  std::vector<std::size_t> counts;
  for (const auto& d : docs) counts.push_back(d.parse.empty() ? 0 : extract_anaphors(d).size());
  return counts;
}

// Relation names outside the gold vocabulary are appended so they score as false positives.
std::vector<Triple> read_predictions(const fs::path& path, RelationVocab& relations) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("r") && j["r"].is_string() && relations.id(j["r"].get<std::string>()) < 0)
      relations.add(j["r"].get<std::string>());
  }
  return parse_predictions(text, relations);
}

Model load_secondary(const std::string& path) {
  std::string train_json;
  Model m = load_checkpoint(path, &train_json);
  const TrainConfig tc = TrainConfig::from_json(train_json);
  if (tc.effective_beta() != 0.0)
    throw ValidationError("ISCF needs a secondary model trained without the evidence loss; '" + path +
                          "' was trained with beta=" + std::to_string(tc.beta));
  return m;
}

struct Options {
  std::string corpus, parses, train, train_parses, dev, dev_parses, gold, checkpoint, secondary, pred, out;
  std::string config, mode = "isf", variant = "full", kind = "relation", axis = "gcn_layers", prefix = "synth";
  std::vector<std::string> corpora, parse_list;
  std::vector<double> values;
  bool include_overlap = false, verbose = false;
  double evidence_threshold = 0.2, tau = 0.0, tolerance = 1e-4;
  std::uint64_t seed = 1;
  int bridge_gap = 0;
  int threads = 1, docs = 32, relations = 5, seeds = 20;
  std::map<std::string, std::string> train_values;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  void setup(CLI::App& app) {
    app.require_subcommand(1);
    ingest(app);
    stats(app);
    extract_anaphors_cmd(app);
    build_graph_cmd(app);
    train_cmd(app);
    infer(app);
    fuse_cmd(app);
    evaluate_cmd(app);
    sweep(app);
    gradcheck(app);
    generate(app);
    for (auto* sub : app.get_subcommands({}))
      sub->add_option("--config", o_.config, "key = value file or flat JSON object; command-line flags win")
          ->check(CLI::ExistingFile);
  }

 private:
  template <typename T>
  CLI::Option* opt(CLI::App* sub, const std::string& name, T& dest, const std::string& help) {
    return sub->add_option(name, dest, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  CLI::Option* input(CLI::App* sub, const std::string& name, std::string& dest, const std::string& help) {
    return opt(sub, name, dest, help)->check(CLI::ExistingFile);
  }

  void threads_opt(CLI::App* sub) {
    opt(sub, "--threads", o_.threads, "worker threads for scoring")->check(CLI::Range(1, 256));
  }

  void train_keys(CLI::App* sub) {
    const json d = json::parse(TrainConfig().to_json());
    for (const auto& key : TrainConfig::keys()) {
      const std::string shown = d.at(key).is_string() ? d.at(key).get<std::string>() : d.at(key).dump();
      opt(sub, flag_name(key), o_.train_values[key], "default " + shown)->group("Training keys");
    }
  }

  TrainConfig train_config(const CLI::App* sub) const {
    TrainConfig c;
    for (const auto& key : TrainConfig::keys())
      if (sub->get_option(flag_name(key))->count() > 0) c.set(key, o_.train_values.at(key));
    c.validate();
    return c;
  }

  void ingest(CLI::App& app) {
    auto* sub = app.add_subcommand("ingest", "validate a corpus and its parse sidecar, report counts");
    input(sub, "--corpus", o_.corpus, "DocRED-format JSON")->required();
    input(sub, "--parses", o_.parses, "parse sidecar (line-delimited JSON)");
    sub->callback([this] {
      const Corpus c = load_with_parses(o_.corpus, o_.parses);
      std::size_t parsed = 0;
      for (const auto& d : c.docs) parsed += d.parse.empty() ? 0 : 1;
      const CorpusStats s = corpus_stats(c.docs);
      out_ << json{{"documents", s.docs},        {"parsed_documents", parsed},  {"relations", c.relations.names()},
                   {"avg_entities", s.entities}, {"avg_mentions", s.mentions},  {"avg_triples", s.triples},
                   {"avg_sentences", s.sentences}}
                  .dump(2)
           << "\n";
    });
  }

  void stats(CLI::App& app) {
    auto* sub = app.add_subcommand("stats", "statistics table with one column per corpus");
    sub->add_option("--corpus", o_.corpora, "corpus files")->required()->check(CLI::ExistingFile)->delimiter(',');
    sub->add_option("--parses", o_.parse_list, "parse sidecars, aligned with --corpus")
        ->check(CLI::ExistingFile)
        ->delimiter(',');
    sub->callback([this] {
      if (!o_.parse_list.empty() && o_.parse_list.size() != o_.corpora.size())
        throw ConfigError("--parses needs one sidecar per --corpus");
      std::vector<std::pair<std::string, CorpusStats>> cols;
      for (std::size_t i = 0; i < o_.corpora.size(); ++i) {
        const Corpus c = load_with_parses(o_.corpora[i], o_.parse_list.empty() ? "" : o_.parse_list[i]);
        cols.emplace_back(fs::path(o_.corpora[i]).stem().string(), corpus_stats(c.docs, anaphor_counts(c.docs)));
      }
      out_ << format_stats_table(cols);
    });
  }

  void extract_anaphors_cmd(CLI::App& app) {
    auto* sub = app.add_subcommand("extract-anaphors", "rule-based anaphors as a JSON sidecar");
    input(sub, "--corpus", o_.corpus, "DocRED-format JSON")->required();
    input(sub, "--parses", o_.parses, "parse sidecar")->required();
    sub->add_flag("--include-overlap", o_.include_overlap, "keep anaphors that overlap an entity mention");
    opt(sub, "--out", o_.out, "output file (default: standard output)");
    sub->callback([this] {
      const Corpus c = load_with_parses(o_.corpus, o_.parses);
      json docs = json::array();
      AnaphorDiagnostics diag;
      for (const auto& d : c.docs) {
        json list = json::array();
        if (!d.parse.empty())
          for (const auto& a : extract_anaphors(d, {!o_.include_overlap}, &diag))
            list.push_back({{"kind", to_string(a.kind)},
                            {"sent_id", a.sent_id},
                            {"span", {a.start, a.end}},
                            {"surface", a.surface}});
        docs.push_back({{"doc_id", d.doc_id}, {"anaphors", std::move(list)}});
      }
      const json report = {{"documents", std::move(docs)},
                           {"diagnostics",
                            {{"backward_determiners", diag.backward_determiners},
                             {"cross_sentence", diag.cross_sentence},
                             {"mention_overlaps", diag.mention_overlaps}}}};
      emit(report.dump(2) + "\n");
    });
  }

  void build_graph_cmd(CLI::App& app) {
    auto* sub = app.add_subcommand("build-graph", "document graphs as line-delimited JSON");
    input(sub, "--corpus", o_.corpus, "DocRED-format JSON")->required();
    input(sub, "--parses", o_.parses, "parse sidecar");
    opt(sub, "--variant", o_.variant, "full | no-anaphor | random-replace");
    opt(sub, "--seed", o_.seed, "seed for random-replace");
    sub->add_flag("--include-overlap", o_.include_overlap, "keep anaphors that overlap an entity mention");
    opt(sub, "--out", o_.out, "output file (default: standard output)");
    sub->callback([this] {
      const GraphVariant variant = parse_graph_variant(o_.variant);
      const Corpus c = load_with_parses(o_.corpus, o_.parses);
      std::string text;
      for (const auto& d : c.docs) {
        const auto anaphors = d.parse.empty() ? std::vector<Anaphor>{} : extract_anaphors(d, {!o_.include_overlap});
        text += graph_to_json(d, build_graph(d, anaphors, variant, o_.seed)) + "\n";
      }
      emit(text);
    });
  }

  void train_cmd(CLI::App& app) {
    auto* sub = app.add_subcommand("train", "train a model; writes config.json, train_log.jsonl, model.ckpt");
    input(sub, "--train", o_.train, "training corpus")->required();
    input(sub, "--train-parses", o_.train_parses, "training parse sidecar");
    input(sub, "--dev", o_.dev, "development corpus for best-checkpoint selection");
    input(sub, "--dev-parses", o_.dev_parses, "development parse sidecar");
    opt(sub, "--out", o_.out, "output directory")->required();
    threads_opt(sub);
    train_keys(sub);
    sub->callback([this, sub] {
      const TrainConfig cfg = train_config(sub);
      const Corpus train = load_with_parses(o_.train, o_.train_parses);
      Corpus dev;
      if (!o_.dev.empty()) dev = load_with_parses(o_.dev, o_.dev_parses, &train.relations);
      const fs::path dir = o_.out;
      fs::create_directories(dir);
      write_file(dir / kConfigFile, json::parse(cfg.to_json()).dump(2) + "\n");
      std::ofstream log(dir / kLogFile, std::ios::trunc);
      auto result = aadocre::train(train, o_.dev.empty() ? nullptr : &dev.docs, cfg, [&](const EpochLog& e) {
        log << e.to_json() << "\n";
        log.flush();
        out_ << e.to_json() << "\n";
      });
      save_checkpoint(dir / kCheckpointFile, result.model, cfg.to_json());
      if (!o_.dev.empty()) {
        const auto scores = score_documents(result.model, dev.docs, static_cast<std::size_t>(o_.threads));
        const Metrics m = evaluate(predict(scores), dev.docs, train.relations, train_fact_keys(train.docs, train.relations));
        write_file(dir / kDevMetricsFile, m.to_json() + "\n");
      }
    });
  }

  void infer(CLI::App& app) {
    auto* sub = app.add_subcommand("infer", "threshold predictions; writes predictions.jsonl");
    input(sub, "--checkpoint", o_.checkpoint, "model checkpoint")->required();
    input(sub, "--corpus", o_.corpus, "documents to score")->required();
    input(sub, "--parses", o_.parses, "parse sidecar");
    opt(sub, "--evidence-threshold", o_.evidence_threshold, "sentence-importance threshold for evidence");
    opt(sub, "--out", o_.out, "output directory")->required();
    threads_opt(sub);
    sub->callback([this] {
      const Model model = load_checkpoint(o_.checkpoint);
      const Corpus c = load_with_parses(o_.corpus, o_.parses);
      const auto scores = score_documents(model, c.docs, static_cast<std::size_t>(o_.threads));
      const auto preds = predict(scores, o_.evidence_threshold);
      write_file(fs::path(o_.out) / kPredictionsFile, predictions_jsonl(preds, model.relations()));
      out_ << json{{"documents", c.docs.size()}, {"triples", preds.size()}}.dump() << "\n";
    });
  }

  void fuse_cmd(CLI::App& app) {
    auto* sub = app.add_subcommand("fuse", "pseudo-document fusion; writes fused_predictions.jsonl and fusion.json");
    input(sub, "--checkpoint", o_.checkpoint, "primary model checkpoint")->required();
    input(sub, "--secondary", o_.secondary, "model trained without evidence loss (ISCF)");
    opt(sub, "--mode", o_.mode, "none | isf | iscf");
    input(sub, "--corpus", o_.corpus, "documents to score")->required();
    input(sub, "--parses", o_.parses, "parse sidecar");
    auto* tau = opt(sub, "--tau", o_.tau, "fixed blending offset");
    auto* dev = input(sub, "--dev", o_.dev, "development corpus for tuning the offset");
    tau->excludes(dev);
    input(sub, "--dev-parses", o_.dev_parses, "development parse sidecar");
    opt(sub, "--evidence-threshold", o_.evidence_threshold, "sentence-importance threshold for evidence");
    opt(sub, "--out", o_.out, "output directory")->required();
    threads_opt(sub);
    sub->callback([this] {
      const FusionMode mode = parse_fusion_mode(o_.mode);
      if (mode == FusionMode::kISCF && o_.secondary.empty()) throw ConfigError("--mode iscf needs --secondary");
      if (mode != FusionMode::kISCF && !o_.secondary.empty()) throw ConfigError("--secondary is only used with --mode iscf");
      const Model primary = load_checkpoint(o_.checkpoint);
      std::optional<Model> secondary;
      if (mode == FusionMode::kISCF) secondary.emplace(load_secondary(o_.secondary));
      const Model* pseudo = mode == FusionMode::kNone ? nullptr : mode == FusionMode::kISF ? &primary : &*secondary;
      const auto threads = static_cast<std::size_t>(o_.threads);
      auto candidates = [&](const std::vector<Document>& docs) {
        return fusion_candidates(docs, score_documents(primary, docs, threads), pseudo, o_.evidence_threshold, threads);
      };
      double chosen = o_.tau;
      json info = {{"mode", to_string(mode)}};
      if (!o_.dev.empty()) {
        const Corpus dev = load_with_parses(o_.dev, o_.dev_parses, &primary.relations());
        const auto grid = default_tau_grid();
        chosen = tune_tau(candidates(dev.docs), dev.docs, primary.relations(), grid);
        info["tuned_on"] = o_.dev;
      }
      info["tau"] = chosen;
      const Corpus c = load_with_parses(o_.corpus, o_.parses);
      const auto fused = fused_predictions(candidates(c.docs), chosen);
      info["triples"] = fused.size();
      write_file(fs::path(o_.out) / kFusedFile, predictions_jsonl(fused, primary.relations()));
      write_file(fs::path(o_.out) / kFusionFile, info.dump(2) + "\n");
      out_ << info.dump() << "\n";
    });
  }

  void evaluate_cmd(CLI::App& app) {
    auto* sub = app.add_subcommand("evaluate", "F1, Ign-F1, Intra-F1, Inter-F1 as JSON");
    input(sub, "--pred", o_.pred, "predictions file")->required();
    input(sub, "--gold", o_.gold, "gold corpus")->required();
    input(sub, "--train", o_.train, "training corpus whose facts Ign-F1 ignores");
    opt(sub, "--out", o_.out, "metrics file (default: standard output only)");
    sub->callback([this] {
      Corpus gold = load_corpus(o_.gold);
      const auto preds = read_predictions(o_.pred, gold.relations);
      FactKeys facts;
      if (!o_.train.empty()) {
        const Corpus train = load_corpus(o_.train);
        facts = train_fact_keys(train.docs, train.relations);
      }
      const std::string m = evaluate(preds, gold.docs, gold.relations, facts).to_json();
      if (!o_.out.empty()) write_file(o_.out, m + "\n");
      out_ << m << "\n";
    });
  }

  void sweep(CLI::App& app) {
    auto* sub = app.add_subcommand("sweep", "train and evaluate along one axis; writes sweep.tsv");
    opt(sub, "--axis", o_.axis, "gcn_layers | beta")->check(CLI::IsMember({"gcn_layers", "beta"}));
    sub->add_option("--values", o_.values, "axis values (default: 0..4 for gcn_layers, 0 .01 .03 .05 .1 .3 for beta)")
        ->delimiter(',');
    input(sub, "--train", o_.train, "training corpus")->required();
    input(sub, "--train-parses", o_.train_parses, "training parse sidecar");
    input(sub, "--dev", o_.dev, "evaluation corpus")->required();
    input(sub, "--dev-parses", o_.dev_parses, "evaluation parse sidecar");
    opt(sub, "--out", o_.out, "output directory")->required();
    threads_opt(sub);
    train_keys(sub);
    sub->callback([this, sub] {
      std::vector<double> values = o_.values;
      if (values.empty())
        values = o_.axis == "beta" ? std::vector<double>{0, 0.01, 0.03, 0.05, 0.1, 0.3} : std::vector<double>{0, 1, 2, 3, 4};
      const TrainConfig base = train_config(sub);
      const Corpus train = load_with_parses(o_.train, o_.train_parses);
      const Corpus dev = load_with_parses(o_.dev, o_.dev_parses, &train.relations);
      const FactKeys facts = train_fact_keys(train.docs, train.relations);
      std::ostringstream table;
      table << "axis\tvalue\tF1\tIgn_F1\tIntra_F1\tInter_F1\tP\tR\n";
      out_ << table.str();
      for (double v : values) {
        TrainConfig cfg = base;
        std::ostringstream text;
        text << v;
        cfg.set(o_.axis, text.str());
        cfg.validate();
        auto result = aadocre::train(train, &dev.docs, cfg);
        const auto scores = score_documents(result.model, dev.docs, static_cast<std::size_t>(o_.threads));
        const Metrics m = evaluate(predict(scores), dev.docs, train.relations, facts);
        std::ostringstream row;
        row << o_.axis << '\t' << text.str() << '\t' << m.f1 << '\t' << m.ign_f1 << '\t' << m.intra_f1 << '\t'
            << m.inter_f1 << '\t' << m.precision << '\t' << m.recall << '\n';
        table << row.str();
        out_ << row.str() << std::flush;
      }
      write_file(fs::path(o_.out) / kSweepFile, table.str());
    });
  }

  void gradcheck(CLI::App& app) {
    auto* sub = app.add_subcommand("gradcheck", "finite-difference check of every differentiable component");
    opt(sub, "--seeds", o_.seeds, "number of seeds")->check(CLI::Range(1, 1000));
    opt(sub, "--tolerance", o_.tolerance, "maximum relative error");
    sub->add_flag("--verbose", o_.verbose, "print every case");
    sub->callback([this] {
      const auto t0 = std::chrono::steady_clock::now();
      GradCheckOptions options;
      options.seeds = static_cast<std::size_t>(o_.seeds);
      options.tolerance = o_.tolerance;
      const auto report = run_gradcheck_suite(options, [&](const GradCheckCase& c) {
        if (o_.verbose || !(c.error < o_.tolerance))
          out_ << (c.error < o_.tolerance ? "ok   " : "FAIL ") << c.name << " seed " << c.seed << " " << c.error << "\n";
      });
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out_ << json{{"cases", report.cases.size()}, {"failures", report.failures()}, {"worst", report.worst()},
                   {"tolerance", o_.tolerance},    {"seconds", secs}}
                  .dump()
           << "\n";
      if (!report.passed())
        throw NumericError(std::to_string(report.failures()) + " gradient checks exceed tolerance " +
                           std::to_string(o_.tolerance));
    });
  }

  void generate(CLI::App& app) {
    auto* sub = app.add_subcommand("generate", "synthetic corpus; writes corpus.json and parses.jsonl");
    opt(sub, "--kind", o_.kind, "relation | bridge | walmart")->check(CLI::IsMember({"relation", "bridge", "walmart"}));
    opt(sub, "--docs", o_.docs, "number of documents")->check(CLI::Range(1, 1000000));
    opt(sub, "--relations", o_.relations, "number of relation types")->check(CLI::Range(1, 1000));
    opt(sub, "--seed", o_.seed, "generator seed");
    opt(sub, "--prefix", o_.prefix, "document id prefix");
    opt(sub, "--bridge-gap", o_.bridge_gap, "bridge corpus: modifier tokens between pronoun and cue")
        ->check(CLI::NonNegativeNumber);
    opt(sub, "--out", o_.out, "output directory")->required();
    sub->callback([this] {
      Corpus c;
      if (o_.kind == "walmart") {
        c.docs = {synthetic::walmart_example()};
        c.relations = RelationVocab({"located_near"});
      } else {
        const synthetic::CorpusOptions opts{o_.docs, o_.relations, o_.seed, o_.prefix, o_.bridge_gap};
        c = o_.kind == "bridge" ? synthetic::bridge_corpus(opts) : synthetic::relation_corpus(opts);
      }
      const fs::path dir = o_.out;
      fs::create_directories(dir);
      save_corpus(dir / kCorpusFile, c.docs, c.relations);
      write_file(dir / kParsesFile, serialize_parses(c.docs));
      out_ << json{{"documents", c.docs.size()}, {"relations", c.relations.size()}}.dump() << "\n";
    });
  }

  void emit(const std::string& text) {
    if (o_.out.empty()) out_ << text;
    else write_file(o_.out, text);
  }

  std::ostream& out_;
  std::ostream& err_;
  Options o_;
};

// Config entries become "--key=value" tokens placed before the user's own
// arguments; every scalar option keeps its last value, so flags win.
std::vector<std::string> inject_config(const CLI::App& app, const std::vector<std::string>& args) {
  std::size_t sub_at = 0;
  const CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i].rfind("-", 0) == 0) continue;
    for (const auto* s : app.get_subcommands([](const CLI::App*) { return true; }))
      if (s->get_name() == args[i]) {
        sub = s;
        sub_at = i;
      }
    break;
  }
  if (!sub) return args;
  std::string path;
  for (std::size_t i = sub_at + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = flag_name(key);
    if (key == "config" || !sub->get_option_no_throw(flag))
      throw ConfigError("config '" + path + "': unknown key '" + key + "' for " + sub->get_name());
    injected.push_back(flag + "=" + value);
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub_at + 1));
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub_at + 1), args.end());
  return out;
}

int fail(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  err << "error: " << message << "\n"
      << json{{"error", {{"kind", kind}, {"message", message}}}, {"exit_code", code}}.dump() << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anaphor-assisted document-level relation extraction"};
  app.name(args.empty() ? "aadocre" : fs::path(args[0]).filename().string());
  Cli cli(out, err);
  cli.setup(app);
  try {
    std::vector<std::string> argv_strings = inject_config(app, args);
    std::reverse(argv_strings.begin(), argv_strings.end());
    argv_strings.pop_back();  // program name
    app.parse(argv_strings);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    return fail(err, 1, "usage", message + " (run with --help for usage)");
  } catch (const ConfigError& e) {
    return fail(err, 1, e.kind(), e.what());
  } catch (const ValidationError& e) {
    return fail(err, 1, e.kind(), e.what());
  } catch (const ParseError& e) {
    return fail(err, 1, e.kind(), e.what());
  } catch (const Error& e) {
    return fail(err, 2, e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(err, 2, "runtime", e.what());
  }
  return 0;
}

}  // namespace aadocre::cli
