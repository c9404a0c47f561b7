// phimask command line: corpus generation, strategy runs, the full sweep,
// hybrid cascades and mask export.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "phimask/document.hpp"
#include "phimask/error.hpp"
#include "phimask/masking.hpp"
#include "phimask/redactor.hpp"
#include "phimask/report.hpp"
#include "phimask/runner.hpp"
#include "phimask/surrogate.hpp"

namespace fs = std::filesystem;
using namespace phimask;

namespace {

struct Options {
  std::optional<std::string> corpus;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<std::string> strategy_file;
  std::string backend = "surrogate";
  double accuracy = 0.8;
  std::size_t mc_trials = 0;
  std::optional<std::string> rules;
  std::optional<std::string> out;
  std::string format = "all";
  std::string template_id = std::string(kReferenceTemplate);
  unsigned threads = 1;
  std::optional<std::string> config;
};

template <typename T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

template <typename T>
void take(const nlohmann::json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

// Values in the config file win over command-line flags.
void apply_config(Options& o) {
  if (!o.config) return;
  std::ifstream in(*o.config);
  if (!in) throw ConfigError("cannot read config file " + *o.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    static const std::vector<std::string> known = {
        "corpus", "n",     "seed",   "strategy", "strategy_file", "backend", "accuracy",
        "mc_trials", "rules", "out", "format",   "template",      "threads"};
    for (const auto& [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ConfigError("unknown config key: " + key);
      }
    }
    take(j, "corpus", o.corpus);
    take(j, "n", o.n);
    take(j, "seed", o.seed);
    take(j, "strategy", o.strategy);
    take(j, "strategy_file", o.strategy_file);
    take(j, "backend", o.backend);
    take(j, "accuracy", o.accuracy);
    take(j, "mc_trials", o.mc_trials);
    take(j, "rules", o.rules);
    take(j, "out", o.out);
    take(j, "format", o.format);
    take(j, "template", o.template_id);
    take(j, "threads", o.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad config file " + *o.config + ": " + e.what());
  }
}

fs::path out_dir(const Options& o) {
  if (o.out) return *o.out;
  if (const char* env = std::getenv("PHIMASK_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "results";
}

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw ConfigError("--seed is required");
  return *o.seed;
}

std::vector<Document> load_corpus(const Options& o) {
  if (o.corpus.has_value() == o.n.has_value()) {
    throw ConfigError("give exactly one corpus source: --corpus or --n");
  }
  if (o.corpus) return read_corpus(*o.corpus);
  if (*o.n == 0) throw ConfigError("--n must be positive");
  return generate_corpus(*o.n, require_seed(o), o.template_id);
}

StrategyConfig load_strategy(const Options& o) {
  if (o.strategy.has_value() == o.strategy_file.has_value()) {
    throw ConfigError("give exactly one of --strategy or --strategy-file");
  }
  return o.strategy ? preset(*o.strategy) : load_strategy_file(*o.strategy_file);
}

void check_format(const Options& o) {
  if (o.format != "text" && o.format != "json" && o.format != "all") {
    throw ConfigError("--format must be text, json or all");
  }
}

bool want_text(const Options& o) { return o.format != "json"; }
bool want_json(const Options& o) { return o.format != "text"; }

// All outputs are staged as hidden temporaries and renamed only once every
// file is written, so a failure never leaves a partial result set behind.
void commit(const fs::path& dir, const std::map<std::string, std::string>& files) {
  fs::create_directories(dir);
  std::vector<fs::path> staged;
  try {
    for (const auto& [name, content] : files) {
      const fs::path tmp = dir / ("." + name + ".tmp");
      staged.push_back(tmp);
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << content;
      f.close();
      if (!f) throw IoError("cannot write " + tmp.string());
    }
    std::size_t i = 0;
    for (const auto& [name, content] : files) fs::rename(staged[i++], dir / name);
  } catch (...) {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
    throw;
  }
}

RunOptions run_options(const Options& o) {
  RunOptions r;
  r.seed = require_seed(o);
  r.threads = o.threads == 0 ? 1 : o.threads;
  return r;
}

int cmd_generate(const Options& o) {
  if (o.corpus) throw ConfigError("generate writes a corpus; use --out, not --corpus");
  if (!o.n || *o.n == 0) throw ConfigError("--n must be positive");
  const std::uint64_t seed = require_seed(o);
  const fs::path dir = out_dir(o);
  // Stage into a sibling directory and move it into place.
  const fs::path tmp = dir.string() + ".tmp";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  try {
    const auto manifest = write_corpus(*o.n, seed, tmp, o.template_id);
    fs::create_directories(dir);
    for (const auto& entry : fs::directory_iterator(tmp)) {
      fs::rename(entry.path(), dir / entry.path().filename());
    }
    fs::remove_all(tmp);
    std::cout << "wrote " << manifest.size() << " documents to " << dir.string() << "\n";
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
  return 0;
}

int cmd_run(const Options& o) {
  check_format(o);
  const auto docs = load_corpus(o);
  const auto strategy = load_strategy(o);
  const auto backend = make_backend(o.backend);
  const auto run = run_strategy(docs, strategy, *backend, run_options(o));
  std::size_t seq = 0;
  std::map<std::string, std::string> files;
  const std::vector<StrategyReport> reports = {run.report};
  const std::string text = strategy_table(reports) + "\n" + category_table(reports);
  if (want_json(o)) files["results.json"] = results_json(reports);
  if (want_text(o)) files["report.txt"] = text;
  files["audit.ndjson"] = audit_log(docs, run, nullptr, seq);
  commit(out_dir(o), files);
  std::cout << text;
  return 0;
}

int cmd_sweep(const Options& o) {
  check_format(o);
  const auto docs = load_corpus(o);
  const auto backend = make_backend(o.backend);
  const auto runs = run_sweep(docs, *backend, run_options(o));
  std::vector<StrategyReport> reports;
  std::string audit;
  std::size_t seq = 0;
  for (const auto& r : runs) {
    reports.push_back(r.report);
    audit += audit_log(docs, r, nullptr, seq);
  }
  const std::string text = strategy_table(reports) + "\nRadius ablation\n" + ablation_table(reports) +
                           "\nMasked rate by category\n" + category_table(reports);
  std::map<std::string, std::string> files;
  if (want_json(o)) files["results.json"] = results_json(reports);
  if (want_text(o)) files["report.txt"] = text;
  files["audit.ndjson"] = audit;
  commit(out_dir(o), files);
  std::cout << text;
  return 0;
}

int cmd_hybrid(const Options& o) {
  check_format(o);
  if (!(o.accuracy > 0.0 && o.accuracy <= 1.0)) throw ConfigError("--accuracy must be in (0, 1]");
  const auto docs = load_corpus(o);
  const auto strategy = load_strategy(o);
  const auto backend = make_backend(o.backend);
  HybridOptions h;
  h.accuracy = o.accuracy;
  h.mc_trials = o.mc_trials;
  if (o.rules) h.rules = load_rules_file(*o.rules);
  const auto run = run_hybrid(docs, strategy, *backend, h, run_options(o));
  std::size_t seq = 0;
  const std::string text = cascade_table(run);
  std::map<std::string, std::string> files;
  if (want_json(o)) {
    files["hybrid.json"] = hybrid_json(run);
    files["results.json"] = results_json({run.stage1.report});
  }
  if (want_text(o)) files["report.txt"] = text;
  files["audit.ndjson"] = audit_log(docs, run.stage1, &run.stage2, seq);
  commit(out_dir(o), files);
  std::cout << text;
  return 0;
}

int cmd_export_masks(const Options& o) {
  const auto docs = load_corpus(o);
  const auto strategy = load_strategy(o);
  validate(strategy);
  MaskArchive archive;
  for (const auto& d : docs) archive[d.id] = build_masks(d, strategy).masks;
  commit(out_dir(o), {{"masks.jsonl", serialize_masks(archive)},
                      {"mask_tokens.json", mask_token_json(strategy)}});
  std::cout << "exported masks for " << archive.size() << " documents\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vision-stage PHI masking experiments"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool corpus, bool strategy) {
    sub->add_option("--seed", o.seed, "Master seed (required)");
    sub->add_option("--out", o.out, "Output directory (env PHIMASK_OUT_DIR)");
    sub->add_option("--config", o.config, "JSON config; its values override flags");
    sub->add_option("--template", o.template_id, "Document template")
        ->check(CLI::IsMember(template_ids()));
    sub->add_option("--n", o.n, "Number of documents to generate");
    if (corpus) {
      sub->add_option("--corpus", o.corpus, "Corpus directory");
      sub->add_option("--threads", o.threads, "Worker threads");
    }
    if (strategy) {
      sub->add_option("--strategy", o.strategy, "Strategy preset");
      sub->add_option("--strategy-file", o.strategy_file, "Strategy JSON file");
    }
  };

  auto* gen = app.add_subcommand("generate", "Write a synthetic corpus");
  common(gen, false, false);

  auto* run = app.add_subcommand("run", "Run one strategy");
  common(run, true, true);
  run->add_option("--backend", o.backend, "surrogate | adapter:<dir>");
  run->add_option("--format", o.format, "text | json | all");

  auto* sweep = app.add_subcommand("sweep", "Run every table preset");
  common(sweep, true, false);
  sweep->add_option("--backend", o.backend, "surrogate | adapter:<dir>");
  sweep->add_option("--format", o.format, "text | json | all");

  auto* hybrid = app.add_subcommand("hybrid", "Masking followed by text redaction");
  common(hybrid, true, true);
  hybrid->add_option("--backend", o.backend, "surrogate | adapter:<dir>");
  hybrid->add_option("--format", o.format, "text | json | all");
  hybrid->add_option("--accuracy", o.accuracy, "Stage-2 accuracy in (0, 1]");
  hybrid->add_option("--mc-trials", o.mc_trials, "Monte-Carlo redaction trials");
  hybrid->add_option("--rules", o.rules, "Redaction rules JSON");

  auto* exp = app.add_subcommand("export-masks", "Write mask interchange JSONL");
  common(exp, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    apply_config(o);
    if (gen->parsed()) return cmd_generate(o);
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (hybrid->parsed()) return cmd_hybrid(o);
    if (exp->parsed()) return cmd_export_masks(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
