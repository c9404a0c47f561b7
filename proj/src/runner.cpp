#include "phimask/runner.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "phimask/error.hpp"
#include "phimask/rng.hpp"

namespace phimask {

namespace {

// Calls fn(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(lock);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::size_t stage2_leaks(const Document& doc, const OcrOutput& stage1, std::string_view text) {
  std::size_t n = 0;
  for (const auto& a : doc.annotations) n += is_leaked(a, stage1.emission(a.category), text) ? 1 : 0;
  return n;
}

}  // namespace

StrategyRun run_strategy(const std::vector<Document>& docs, const StrategyConfig& strategy,
                         const OcrBackend& backend, const RunOptions& opts) {
  validate(strategy);
  if (docs.empty()) throw ConfigError("corpus is empty");
  StrategyRun run;
  run.strategy = strategy;
  run.documents.resize(docs.size());
  parallel_for(docs.size(), opts.threads, [&](std::size_t i) {
    DocumentRun& d = run.documents[i];
    d.build = build_masks(docs[i], strategy, opts.compression);
    d.output = backend.run(docs[i], d.build.masks, opts.seed);
    d.score = score(docs[i], d.output);
  });
  std::vector<DocumentScore> scores;
  std::vector<std::vector<HookStats>> stats;
  for (const auto& d : run.documents) {
    scores.push_back(d.score);
    stats.push_back(d.build.stats);
  }
  run.report = aggregate(strategy, scores, stats);
  return run;
}

std::vector<StrategyRun> run_sweep(const std::vector<Document>& docs, const OcrBackend& backend,
                                   const RunOptions& opts) {
  std::vector<StrategyRun> rows;
  for (const auto& name : table_preset_names()) {
    rows.push_back(run_strategy(docs, preset(name), backend, opts));
  }
  return rows;
}

std::uint64_t redaction_seed(std::uint64_t seed, const std::string& doc_id) {
  return mix_seed(mix_seed(seed, hash_label("stage2")), hash_label(doc_id));
}

double monte_carlo_cumulative(const std::vector<Document>& docs, const StrategyRun& stage1,
                              const RuleSet& rules, double accuracy, std::size_t trials,
                              std::uint64_t seed) {
  if (trials == 0) throw ConfigError("Monte-Carlo trial count must be positive");
  if (docs.size() != stage1.documents.size()) throw Error("stage 1 does not match the corpus");
  std::vector<std::vector<RedactionHit>> plans;
  for (const auto& d : stage1.documents) plans.push_back(rules.find(d.output.text));
  const std::uint64_t base = mix_seed(seed, hash_label("monte-carlo"));
  double sum = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const std::size_t i = k % docs.size();
    const OcrOutput& out = stage1.documents[i].output;
    const auto red = apply_redaction(out.text, rules, plans[i], accuracy, mix_seed(base, k));
    sum += reduction_percent(docs[i].annotations.size(), stage2_leaks(docs[i], out, red.text));
  }
  return sum / static_cast<double>(trials);
}

HybridRun run_hybrid(const std::vector<Document>& docs, const StrategyConfig& strategy,
                     const OcrBackend& backend, const HybridOptions& hybrid,
                     const RunOptions& opts) {
  if (!(hybrid.accuracy > 0.0 && hybrid.accuracy <= 1.0)) {
    throw ConfigError("accuracy must be in (0, 1]");
  }
  HybridRun run;
  run.stage1 = run_strategy(docs, strategy, backend, opts);
  run.accuracy = hybrid.accuracy;
  run.stage2.resize(docs.size());
  std::vector<std::vector<CascadeRow>> cascades(docs.size());
  parallel_for(docs.size(), opts.threads, [&](std::size_t i) {
    const OcrOutput& out = run.stage1.documents[i].output;
    run.stage2[i] = redact(out.text, hybrid.rules, hybrid.accuracy, redaction_seed(opts.seed, docs[i].id));
    cascades[i] = cascade_score(docs[i], out, run.stage2[i].text);
  });
  run.cascade = pool_cascades(cascades);
  run.expected_cumulative =
      expected_cumulative_reduction(run.stage1.report.reduction(), hybrid.accuracy);
  if (hybrid.mc_trials > 0) {
    run.mc_trials = hybrid.mc_trials;
    run.monte_carlo_cumulative = monte_carlo_cumulative(docs, run.stage1, hybrid.rules,
                                                        hybrid.accuracy, hybrid.mc_trials, opts.seed);
  }
  return run;
}

}  // namespace phimask
