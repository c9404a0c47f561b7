#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "phimask/document.hpp"
#include "phimask/masking.hpp"
#include "phimask/surrogate.hpp"

namespace phimask {

/// An annotation leaks when its ground-truth value occurs in the text, or when
/// the backend regenerated a substitute identifier that occurs in the text.
bool is_leaked(const PhiAnnotation& a, const EmissionRecord* emission, std::string_view text);

/// (B - L) / B as a percentage. Throws if B == 0.
double reduction_percent(std::size_t total, std::size_t leaked);

/// Flag iff |chars - baseline| / baseline > 2.0. Throws if baseline == 0.
bool detect_degradation(std::size_t char_count, std::size_t baseline_chars);

struct DocumentScore {
  std::string doc_id;
  std::size_t B = 0;
  std::size_t L = 0;
  std::array<bool, 7> leaked{};  // indexed by category
  std::size_t char_count = 0;
  std::size_t baseline_chars = 0;
  bool backend_degraded = false;  // rule-based flag reported by the backend
  bool length_degraded = false;   // char-count deviation test

  double reduction() const { return reduction_percent(B, L); }
  bool degraded() const noexcept { return backend_degraded || length_degraded; }
};

DocumentScore score(const Document& doc, const OcrOutput& out);

struct CascadeRow {
  std::string stage;  // "Baseline", "Stage 1", "Stage 2"
  std::size_t remaining = 0;
  std::size_t total = 0;
  double stage_reduction = 0.0;  // percentage points removed by this stage
  double cumulative = 0.0;       // percent of the total removed so far
};

/// Baseline -> stage 1 (masked OCR) -> stage 2 (text redaction of stage 1).
std::vector<CascadeRow> cascade_score(const Document& doc, const OcrOutput& stage1,
                                      std::string_view stage2_text);

/// Sums remaining counts row by row; every input must have the same stages.
std::vector<CascadeRow> pool_cascades(const std::vector<std::vector<CascadeRow>>& cascades);

/// R1 + a * (100 - R1): stage 2 removes a fraction a of what stage 1 left.
double expected_cumulative_reduction(double stage1_reduction, double accuracy);

struct HookCoverage {
  HookPoint hook = HookPoint::SamBlock11;
  GridName grid = GridName::Sam40;
  int radius = 0;
  double mean_patches = 0.0;
  double coverage_tiles = 0.0;  // mean over documents
  double coverage_page = 0.0;

  friend bool operator==(const HookCoverage&, const HookCoverage&) = default;
};

struct StrategyReport {
  std::string preset;
  StrategyId id = StrategyId::Baseline;
  std::string radius;
  std::size_t documents = 0;
  std::size_t elements = 0;  // sum of B
  std::size_t leaked = 0;    // sum of L
  std::array<double, 7> masked_rate{};  // percent of documents where the category did not leak
  std::vector<HookCoverage> coverage;
  bool backend_degraded = false;  // any document
  bool length_degraded = false;

  double reduction() const { return reduction_percent(elements, leaked); }
  bool degraded() const noexcept { return backend_degraded || length_degraded; }

  friend bool operator==(const StrategyReport&, const StrategyReport&) = default;
};

/// `stats[i]` are the mask statistics of `scores[i]`'s document.
StrategyReport aggregate(const StrategyConfig& strategy, const std::vector<DocumentScore>& scores,
                         const std::vector<std::vector<HookStats>>& stats);

}  // namespace phimask
