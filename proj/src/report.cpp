#include "phimask/report.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "phimask/error.hpp"

namespace phimask {

namespace {

using ojson = nlohmann::ordered_json;

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out += i + 1 == cells.size() ? cells[i] : pad(cells[i], width[i] + 2);
    }
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out += std::string(total - 2, '-') + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string coverage_cell(const StrategyReport& r, bool page) {
  if (r.coverage.empty()) return "-";
  std::string out;
  for (const auto& c : r.coverage) {
    if (!out.empty()) out += ", ";
    out += format_percent(100.0 * (page ? c.coverage_page : c.coverage_tiles)) + "% (" +
           std::string(hook_label(c.hook)) + ")";
  }
  return out;
}

std::string status(const StrategyReport& r) { return r.degraded() ? "Degraded" : "Stable"; }

}  // namespace

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", value);
  return buf;
}

std::string_view hook_label(HookPoint h) noexcept {
  switch (h) {
    case HookPoint::CompressionNet2:
      return "net_2";
    case HookPoint::VisionEncoder:
      return "ViT";
    case HookPoint::Projector:
      return "Projector";
    default:
      return "SAM";
  }
}

std::string strategy_table(const std::vector<StrategyReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    rows.push_back({r.preset, r.radius, coverage_cell(r, false), format_percent(r.reduction()) + "%",
                    status(r)});
  }
  return render({"Strategy", "Radius", "Coverage", "Reduction", "Status"}, rows);
}

std::string ablation_table(const std::vector<StrategyReport>& reports) {
  const auto& names = ablation_preset_names();
  std::vector<std::vector<std::string>> rows;
  for (const auto& name : names) {
    auto it = std::find_if(reports.begin(), reports.end(),
                           [&](const StrategyReport& r) { return r.preset == name; });
    if (it == reports.end()) continue;
    rows.push_back({it->preset, it->radius, coverage_cell(*it, false), coverage_cell(*it, true),
                    format_percent(it->reduction()) + "%"});
  }
  return render({"Strategy", "Radius", "Coverage (tiles)", "Coverage (page)", "Reduction"}, rows);
}

std::string category_table(const std::vector<StrategyReport>& reports) {
  std::vector<std::string> header = {"Strategy"};
  for (PhiCategory c : kAllCategories) header.emplace_back(to_string(c));
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.preset};
    for (double rate : r.masked_rate) row.push_back(format_percent(rate) + "%");
    rows.push_back(std::move(row));
  }
  return render(header, rows);
}

std::string cascade_table(const HybridRun& run) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : run.cascade) {
    rows.push_back({c.stage, std::to_string(c.remaining) + "/" + std::to_string(c.total),
                    format_percent(c.stage_reduction), format_percent(c.cumulative) + "%"});
  }
  std::string out = render({"Stage", "Remaining PHI", "Stage reduction", "Cumulative"}, rows);
  out += "accuracy " + format_percent(100.0 * run.accuracy) + "%: expected cumulative " +
         format_percent(run.expected_cumulative) + "%";
  if (run.monte_carlo_cumulative) {
    out += ", Monte-Carlo " + format_percent(*run.monte_carlo_cumulative) + "% over " +
           std::to_string(run.mc_trials) + " trials";
  }
  return out + "\n";
}

std::string results_json(const std::vector<StrategyReport>& reports) {
  ojson arr = ojson::array();
  for (const auto& r : reports) {
    ojson cov = ojson::array();
    for (const auto& c : r.coverage) {
      cov.push_back({{"hook_point", std::string(to_string(c.hook))},
                     {"grid_name", std::string(to_string(c.grid))},
                     {"radius", c.radius},
                     {"mean_patches", c.mean_patches},
                     {"coverage_tiles", c.coverage_tiles},
                     {"coverage_page", c.coverage_page}});
    }
    ojson per_cat = ojson::object();
    for (PhiCategory c : kAllCategories) {
      per_cat[std::string(to_string(c))] = r.masked_rate[static_cast<std::size_t>(c)];
    }
    arr.push_back({{"strategy_id", std::string(to_string(r.id))},
                   {"preset", r.preset},
                   {"radius", r.radius},
                   {"coverage_by_hook", cov},
                   {"reduction", r.reduction()},
                   {"per_category", per_cat},
                   {"degraded", r.degraded()},
                   {"degraded_signals", {{"backend", r.backend_degraded}, {"char_count", r.length_degraded}}},
                   {"documents", r.documents},
                   {"elements", r.elements},
                   {"leaked", r.leaked}});
  }
  return arr.dump(2) + "\n";
}

std::vector<StrategyReport> parse_results(std::string_view json_text) {
  std::vector<StrategyReport> out;
  try {
    const auto arr = nlohmann::json::parse(json_text);
    for (const auto& j : arr) {
      StrategyReport r;
      const auto id = parse_strategy_id(j.at("strategy_id").get<std::string>());
      if (!id) throw Error("unknown strategy id in results");
      r.id = *id;
      r.preset = j.at("preset").get<std::string>();
      r.radius = j.at("radius").get<std::string>();
      for (const auto& c : j.at("coverage_by_hook")) {
        const auto hook = parse_hook_point(c.at("hook_point").get<std::string>());
        const auto grid = parse_grid_name(c.at("grid_name").get<std::string>());
        if (!hook || !grid) throw Error("unknown hook or grid in results");
        r.coverage.push_back({*hook, *grid, c.at("radius").get<int>(),
                              c.at("mean_patches").get<double>(), c.at("coverage_tiles").get<double>(),
                              c.at("coverage_page").get<double>()});
      }
      for (PhiCategory c : kAllCategories) {
        r.masked_rate[static_cast<std::size_t>(c)] =
            j.at("per_category").at(std::string(to_string(c))).get<double>();
      }
      r.backend_degraded = j.at("degraded_signals").at("backend").get<bool>();
      r.length_degraded = j.at("degraded_signals").at("char_count").get<bool>();
      r.documents = j.at("documents").get<std::size_t>();
      r.elements = j.at("elements").get<std::size_t>();
      r.leaked = j.at("leaked").get<std::size_t>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed results file: ") + e.what());
  }
  return out;
}

std::string hybrid_json(const HybridRun& run) {
  ojson rows = ojson::array();
  for (const auto& c : run.cascade) {
    rows.push_back({{"stage", c.stage},
                    {"remaining", c.remaining},
                    {"total", c.total},
                    {"stage_reduction", c.stage_reduction},
                    {"cumulative", c.cumulative}});
  }
  ojson j = {{"preset", run.stage1.strategy.name},
             {"strategy_id", std::string(to_string(run.stage1.strategy.id))},
             {"accuracy", run.accuracy},
             {"documents", run.stage1.documents.size()},
             {"cascade", rows},
             {"expected_cumulative", run.expected_cumulative}};
  if (run.monte_carlo_cumulative) {
    j["monte_carlo_cumulative"] = *run.monte_carlo_cumulative;
    j["mc_trials"] = run.mc_trials;
  }
  return j.dump(2) + "\n";
}

std::string audit_log(const std::vector<Document>& docs, const StrategyRun& run,
                      const std::vector<RedactionResult>* stage2, std::size_t& seq) {
  if (docs.size() != run.documents.size()) throw Error("audit: run does not match the corpus");
  if (stage2 != nullptr && stage2->size() != docs.size()) throw Error("audit: stage 2 size mismatch");
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Document& doc = docs[i];
    const DocumentRun& d = run.documents[i];
    ojson boxes = ojson::array();
    for (const auto& a : doc.annotations) {
      boxes.push_back({{"category", std::string(to_string(a.category))},
                       {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}}});
    }
    ojson hooks = ojson::array();
    for (const auto& s : d.build.stats) {
      hooks.push_back({{"hook_point", std::string(to_string(s.hook))},
                       {"grid", std::string(to_string(s.grid))},
                       {"radius", s.radius},
                       {"patch_count", s.patch_count},
                       {"tiles_in_use", s.tiles_in_use}});
    }
    ojson emissions = ojson::array();
    for (const auto& e : d.output.emissions) {
      emissions.push_back({{"category", std::string(to_string(e.category))},
                           {"emitted", std::string(to_string(e.emitted))},
                           {"leaked", d.score.leaked[static_cast<std::size_t>(e.category)]}});
    }
    ojson rec = {{"seq", seq++},
                 {"doc_id", doc.id},
                 {"strategy", run.strategy.name},
                 {"masked_bboxes", boxes},
                 {"hooks", hooks},
                 {"emissions", emissions},
                 {"char_count", d.output.char_count},
                 {"degraded", d.score.degraded()}};
    if (stage2 != nullptr) {
      ojson hits = ojson::array();
      for (const auto& h : (*stage2)[i].hits) {
        hits.push_back({{"category", std::string(to_string(h.category))}, {"begin", h.begin}, {"end", h.end}});
      }
      rec["redaction_hits"] = hits;
    }
    out += rec.dump() + "\n";
  }
  return out;
}

}  // namespace phimask
