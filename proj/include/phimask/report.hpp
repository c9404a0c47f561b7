#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "phimask/evaluator.hpp"
#include "phimask/runner.hpp"

namespace phimask {

/// One decimal, e.g. 42.857 -> "42.9".
std::string format_percent(double value);

/// "SAM", "net_2", "ViT" or "Projector".
std::string_view hook_label(HookPoint h) noexcept;

/// Strategy | Radius | Coverage | Reduction | Status. Coverage is the
/// tiles-in-use figure; an empty input yields the header only.
std::string strategy_table(const std::vector<StrategyReport>& reports);

/// Like strategy_table, restricted to the V3/V6/V9 radius grid, with both
/// coverage readings.
std::string ablation_table(const std::vector<StrategyReport>& reports);

/// Masked rate per PHI category for each strategy.
std::string category_table(const std::vector<StrategyReport>& reports);

std::string cascade_table(const HybridRun& run);

/// JSON array of {strategy_id, preset, radius, coverage_by_hook, reduction,
/// per_category, degraded, degraded_signals, documents, elements, leaked}.
std::string results_json(const std::vector<StrategyReport>& reports);
std::vector<StrategyReport> parse_results(std::string_view json_text);

std::string hybrid_json(const HybridRun& run);

/// One JSON object per line and document: masked boxes, hook statistics,
/// emission kinds, leak flags and (for hybrid runs) redaction hits. No PHI
/// values are written. `seq` numbers records across calls.
std::string audit_log(const std::vector<Document>& docs, const StrategyRun& run,
                      const std::vector<RedactionResult>* stage2, std::size_t& seq);

}  // namespace phimask
