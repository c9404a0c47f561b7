#include "phimask/evaluator.hpp"

#include <cstdlib>

#include "phimask/error.hpp"

namespace phimask {

bool is_leaked(const PhiAnnotation& a, const EmissionRecord* emission, std::string_view text) {
  if (text.find(a.value) != std::string_view::npos) return true;
  return emission != nullptr && emission->emitted == Emission::Regenerated &&
         emission->emitted_string && text.find(*emission->emitted_string) != std::string_view::npos;
}

double reduction_percent(std::size_t total, std::size_t leaked) {
  if (total == 0) throw Error("reduction of an empty element set");
  if (leaked > total) throw Error("leaked count exceeds element count");
  return 100.0 * static_cast<double>(total - leaked) / static_cast<double>(total);
}

bool detect_degradation(std::size_t char_count, std::size_t baseline_chars) {
  if (baseline_chars == 0) throw Error("baseline character count must be positive");
  const auto diff = char_count > baseline_chars ? char_count - baseline_chars
                                                : baseline_chars - char_count;
  // diff / baseline > 2, kept in integers
  return diff > 2 * baseline_chars;
}

DocumentScore score(const Document& doc, const OcrOutput& out) {
  DocumentScore s;
  s.doc_id = doc.id;
  s.B = doc.annotations.size();
  for (const auto& a : doc.annotations) {
    const bool leak = is_leaked(a, out.emission(a.category), out.text);
    s.leaked[static_cast<std::size_t>(a.category)] = leak;
    s.L += leak ? 1 : 0;
  }
  s.char_count = out.char_count;
  s.baseline_chars = baseline_char_count(doc);
  s.backend_degraded = out.degraded;
  s.length_degraded = detect_degradation(out.char_count, s.baseline_chars);
  return s;
}

std::vector<CascadeRow> cascade_score(const Document& doc, const OcrOutput& stage1,
                                      std::string_view stage2_text) {
  const std::size_t total = doc.annotations.size();
  std::size_t left1 = 0;
  std::size_t left2 = 0;
  for (const auto& a : doc.annotations) {
    const EmissionRecord* e = stage1.emission(a.category);
    left1 += is_leaked(a, e, stage1.text) ? 1 : 0;
    left2 += is_leaked(a, e, stage2_text) ? 1 : 0;
  }
  const std::vector<std::vector<CascadeRow>> one = {{
      {"Baseline", total, total, 0.0, 0.0},
      {"Stage 1", left1, total, 0.0, 0.0},
      {"Stage 2", left2, total, 0.0, 0.0},
  }};
  return pool_cascades(one);
}

std::vector<CascadeRow> pool_cascades(const std::vector<std::vector<CascadeRow>>& cascades) {
  if (cascades.empty()) return {};
  std::vector<CascadeRow> rows = cascades.front();
  for (auto& r : rows) r.remaining = r.total = 0;
  for (const auto& c : cascades) {
    if (c.size() != rows.size()) throw Error("cascades have different stage counts");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (c[i].stage != rows[i].stage) throw Error("cascades have different stages");
      rows[i].remaining += c[i].remaining;
      rows[i].total += c[i].total;
    }
  }
  double previous = 0.0;
  for (auto& r : rows) {
    if (r.remaining > r.total) throw Error("cascade stage leaves more than it started with");
    r.cumulative = reduction_percent(r.total, r.remaining);
    r.stage_reduction = r.cumulative - previous;
    previous = r.cumulative;
  }
  return rows;
}

double expected_cumulative_reduction(double stage1_reduction, double accuracy) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ConfigError("accuracy must be in [0, 1]");
  return stage1_reduction + accuracy * (100.0 - stage1_reduction);
}

StrategyReport aggregate(const StrategyConfig& strategy, const std::vector<DocumentScore>& scores,
                         const std::vector<std::vector<HookStats>>& stats) {
  if (scores.size() != stats.size()) throw Error("scores and mask stats disagree in length");
  StrategyReport r;
  r.preset = strategy.name;
  r.id = strategy.id;
  r.radius = strategy.radius_label();
  r.documents = scores.size();
  std::array<std::size_t, 7> kept{};
  for (const auto& s : scores) {
    r.elements += s.B;
    r.leaked += s.L;
    for (std::size_t c = 0; c < kept.size(); ++c) kept[c] += s.leaked[c] ? 0 : 1;
    r.backend_degraded = r.backend_degraded || s.backend_degraded;
    r.length_degraded = r.length_degraded || s.length_degraded;
  }
  if (!scores.empty()) {
    for (std::size_t c = 0; c < kept.size(); ++c) {
      r.masked_rate[c] = 100.0 * static_cast<double>(kept[c]) / static_cast<double>(scores.size());
    }
  }
  for (const auto& h : strategy.hooks) {
    HookCoverage cov{h.hook, hook_grid(h.hook).name, h.radius, 0.0, 0.0, 0.0};
    for (const auto& doc_stats : stats) {
      for (const auto& st : doc_stats) {
        if (st.hook != h.hook) continue;
        cov.mean_patches += static_cast<double>(st.patch_count);
        cov.coverage_tiles += st.coverage_tiles;
        cov.coverage_page += st.coverage_page;
      }
    }
    if (!stats.empty()) {
      const auto n = static_cast<double>(stats.size());
      cov.mean_patches /= n;
      cov.coverage_tiles /= n;
      cov.coverage_page /= n;
    }
    r.coverage.push_back(cov);
  }
  return r;
}

}  // namespace phimask
