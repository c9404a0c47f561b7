#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phimask/document.hpp"
#include "phimask/evaluator.hpp"
#include "phimask/masking.hpp"
#include "phimask/redactor.hpp"
#include "phimask/surrogate.hpp"

namespace phimask {

struct RunOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  CompressionModel compression;
};

struct DocumentRun {
  MaskBuild build;
  OcrOutput output;
  DocumentScore score;
};

struct StrategyRun {
  StrategyConfig strategy;
  std::vector<DocumentRun> documents;  // corpus order
  StrategyReport report;
};

/// Masks, OCR and scoring for every document. Documents may be processed on
/// several threads; results keep corpus order.
StrategyRun run_strategy(const std::vector<Document>& docs, const StrategyConfig& strategy,
                         const OcrBackend& backend, const RunOptions& opts);

/// The fourteen table presets, in table order.
std::vector<StrategyRun> run_sweep(const std::vector<Document>& docs, const OcrBackend& backend,
                                   const RunOptions& opts);

struct HybridOptions {
  double accuracy = 0.8;
  std::size_t mc_trials = 0;  // 0 disables the Monte-Carlo estimate
  RuleSet rules = RuleSet::defaults();
};

struct HybridRun {
  StrategyRun stage1;
  std::vector<RedactionResult> stage2;  // per document
  std::vector<CascadeRow> cascade;      // pooled over the corpus
  double accuracy = 1.0;
  double expected_cumulative = 0.0;     // R1 + a (100 - R1)
  std::optional<double> monte_carlo_cumulative;
  std::size_t mc_trials = 0;
};

/// Seed for the stage-2 accuracy draw of one document.
std::uint64_t redaction_seed(std::uint64_t seed, const std::string& doc_id);

/// Mean cumulative reduction over `trials` independent redaction draws.
/// Trial k redacts document k mod n with seed mix_seed(seed, k).
double monte_carlo_cumulative(const std::vector<Document>& docs, const StrategyRun& stage1,
                              const RuleSet& rules, double accuracy, std::size_t trials,
                              std::uint64_t seed);

HybridRun run_hybrid(const std::vector<Document>& docs, const StrategyConfig& strategy,
                     const OcrBackend& backend, const HybridOptions& hybrid,
                     const RunOptions& opts);

}  // namespace phimask
