#include "phimask/masking.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "phimask/error.hpp"

namespace phimask {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 6> kHookNames = {
    "sam_block_6", "sam_block_9", "sam_block_11", "compression_net2", "vision_encoder", "projector"};

constexpr std::array<std::string_view, 8> kStrategyNames = {"baseline", "V3", "V4", "V5",
                                                            "V6",       "V7", "V8", "V9"};

std::set<HookPoint> required_hooks(StrategyId id) {
  switch (id) {
    case StrategyId::Baseline:
      return {};
    case StrategyId::V3:
    case StrategyId::V5:
      return {HookPoint::SamBlock11};
    case StrategyId::V4:
      return {HookPoint::SamBlock6, HookPoint::SamBlock9, HookPoint::SamBlock11};
    case StrategyId::V6:
      return {HookPoint::CompressionNet2};
    case StrategyId::V7:
      return {HookPoint::SamBlock11, HookPoint::CompressionNet2};
    case StrategyId::V8:
      return {HookPoint::SamBlock11, HookPoint::VisionEncoder};
    case StrategyId::V9:
      return {HookPoint::Projector};
  }
  return {};
}

// Per-category radii of the type-specific preset: wide dilation for the
// spatially distributed fields, the minimum for compact identifiers.
const std::map<PhiCategory, int>& type_specific_radii() {
  static const std::map<PhiCategory, int> radii = {
      {PhiCategory::Name, 3}, {PhiCategory::DateOfBirth, 2}, {PhiCategory::Address, 5},
      {PhiCategory::MRN, 1},  {PhiCategory::SSN, 1},         {PhiCategory::Email, 1},
      {PhiCategory::Account, 1}};
  return radii;
}

StrategyConfig make(std::string name, StrategyId id, std::vector<HookSetting> hooks) {
  StrategyConfig s;
  s.name = std::move(name);
  s.id = id;
  s.hooks = std::move(hooks);
  if (id == StrategyId::V5) s.per_category_radii = type_specific_radii();
  return s;
}

const std::map<std::string, StrategyConfig, std::less<>>& preset_table() {
  using H = HookPoint;
  static const std::map<std::string, StrategyConfig, std::less<>> table = [] {
    std::map<std::string, StrategyConfig, std::less<>> t;
    auto add = [&](StrategyConfig s) { t.emplace(s.name, std::move(s)); };
    add(make("baseline", StrategyId::Baseline, {}));
    for (int r = 1; r <= 3; ++r) {
      add(make("V3-r" + std::to_string(r), StrategyId::V3, {{H::SamBlock11, r}}));
      add(make("V6-r" + std::to_string(r), StrategyId::V6, {{H::CompressionNet2, r}}));
      add(make("V9-r" + std::to_string(r), StrategyId::V9, {{H::Projector, r}}));
    }
    add(make("V4-r1", StrategyId::V4, {{H::SamBlock6, 1}, {H::SamBlock9, 1}, {H::SamBlock11, 1}}));
    add(make("V5", StrategyId::V5, {{H::SamBlock11, 1}}));
    add(make("V7-r1-2", StrategyId::V7, {{H::SamBlock11, 1}, {H::CompressionNet2, 2}}));
    add(make("V7-r1-3", StrategyId::V7, {{H::SamBlock11, 1}, {H::CompressionNet2, 3}}));
    add(make("V8-r1-1", StrategyId::V8, {{H::SamBlock11, 1}, {H::VisionEncoder, 1}}));
    return t;
  }();
  return table;
}

}  // namespace

std::string_view to_string(HookPoint h) noexcept { return kHookNames[static_cast<std::size_t>(h)]; }

std::optional<HookPoint> parse_hook_point(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kHookNames.size(); ++i) {
    if (kHookNames[i] == s) return static_cast<HookPoint>(i);
  }
  return std::nullopt;
}

const GridSpec& hook_grid(HookPoint h) noexcept {
  switch (h) {
    case HookPoint::SamBlock6:
    case HookPoint::SamBlock9:
    case HookPoint::SamBlock11:
      return kSam40;
    case HookPoint::CompressionNet2:
      return kComp20;
    case HookPoint::VisionEncoder:
      return kVit16;
    case HookPoint::Projector:
      return kProjector;
  }
  return kSam40;
}

MaskTokenSpec default_mask_token(HookPoint h) noexcept {
  MaskTokenSpec spec;
  spec.hook = h;
  switch (h) {
    case HookPoint::CompressionNet2:
      spec.dimensions = 512;
      break;
    case HookPoint::VisionEncoder:
      spec.dimensions = 1024;
      break;
    case HookPoint::Projector:
      spec.dimensions = 1280;
      break;
    default:
      spec.dimensions = 768;
  }
  return spec;
}

void validate(const MaskTokenSpec& spec) {
  if (spec.dimensions <= 0) throw ConfigError("mask token dimensionality must be positive");
  if (!(spec.init_stddev > 0.0)) throw ConfigError("mask token init stddev must be positive");
}

std::string_view to_string(StrategyId id) noexcept {
  return kStrategyNames[static_cast<std::size_t>(id)];
}

std::optional<StrategyId> parse_strategy_id(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
    if (kStrategyNames[i] == s) return static_cast<StrategyId>(i);
  }
  return std::nullopt;
}

std::string StrategyConfig::radius_label() const {
  if (hooks.empty()) return "-";
  if (per_category_radii) {
    auto [lo, hi] = std::minmax_element(
        per_category_radii->begin(), per_category_radii->end(),
        [](const auto& a, const auto& b) { return a.second < b.second; });
    return std::to_string(lo->second) + "-" + std::to_string(hi->second);
  }
  std::string label;
  for (const auto& h : hooks) {
    if (!label.empty()) label += ",";
    label += std::to_string(h.radius);
  }
  // V4 applies one radius at every block.
  if (id == StrategyId::V4) label = std::to_string(hooks.front().radius);
  return label;
}

const HookSetting* StrategyConfig::hook(HookPoint h) const {
  auto it = std::find_if(hooks.begin(), hooks.end(), [h](const auto& s) { return s.hook == h; });
  return it == hooks.end() ? nullptr : &*it;
}

int StrategyConfig::radius_for(HookPoint h, PhiCategory c) const {
  const HookSetting* setting = hook(h);
  if (!setting) throw ConfigError("strategy " + name + " has no hook " + std::string(to_string(h)));
  if (per_category_radii && h == HookPoint::SamBlock11) return per_category_radii->at(c);
  return setting->radius;
}

void validate(const StrategyConfig& s) {
  const std::string who = "strategy " + (s.name.empty() ? std::string(to_string(s.id)) : s.name);
  std::set<HookPoint> present;
  for (const auto& h : s.hooks) {
    if (!present.insert(h.hook).second) {
      throw ConfigError(who + ": duplicate hook " + std::string(to_string(h.hook)));
    }
    if (h.radius < 0) throw ConfigError(who + ": negative radius");
  }
  if (present != required_hooks(s.id)) {
    throw ConfigError(who + ": hook points do not match " + std::string(to_string(s.id)));
  }
  if (s.id == StrategyId::V5) {
    if (!s.per_category_radii) throw ConfigError(who + ": V5 requires per_category_radii");
    for (PhiCategory c : kAllCategories) {
      auto it = s.per_category_radii->find(c);
      if (it == s.per_category_radii->end()) {
        throw ConfigError(who + ": missing radius for " + std::string(to_string(c)));
      }
      if (it->second < 1 || it->second > 8) {
        throw ConfigError(who + ": per-category radius must be within 1..8");
      }
    }
  } else if (s.per_category_radii) {
    throw ConfigError(who + ": per_category_radii is only valid for V5");
  }
}

const std::vector<std::string>& table_preset_names() {
  static const std::vector<std::string> names = {
      "V3-r1", "V3-r2",   "V3-r3",   "V4-r1",   "V5",    "V6-r1", "V6-r2",
      "V6-r3", "V7-r1-2", "V7-r1-3", "V8-r1-1", "V9-r1", "V9-r2", "V9-r3"};
  return names;
}

const std::vector<std::string>& ablation_preset_names() {
  static const std::vector<std::string> names = {"V3-r1", "V3-r2", "V3-r3", "V6-r1", "V6-r2",
                                                 "V6-r3", "V9-r1", "V9-r2", "V9-r3"};
  return names;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names = table_preset_names();
  names.emplace_back("baseline");
  return names;
}

StrategyConfig preset(std::string_view name) {
  const auto& table = preset_table();
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown strategy preset: " + std::string(name));
  return it->second;
}

StrategyConfig parse_strategy(std::string_view json_text) {
  StrategyConfig s;
  try {
    const json j = json::parse(json_text);
    const std::string id = j.at("id").get<std::string>();
    auto parsed = parse_strategy_id(id);
    if (!parsed) throw ConfigError("unknown strategy id: " + id);
    s.id = *parsed;
    s.name = j.value("name", id);
    for (const auto& h : j.at("hooks")) {
      const std::string hook = h.at("hook_point").get<std::string>();
      auto point = parse_hook_point(hook);
      if (!point) throw ConfigError("unknown hook point: " + hook);
      s.hooks.push_back({*point, h.at("radius").get<int>()});
    }
    if (j.contains("per_category_radii") && !j.at("per_category_radii").is_null()) {
      std::map<PhiCategory, int> radii;
      for (const auto& [key, value] : j.at("per_category_radii").items()) {
        auto c = parse_category(key);
        if (!c) throw ConfigError("unknown PHI category: " + key);
        radii[*c] = value.get<int>();
      }
      s.per_category_radii = std::move(radii);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid strategy config: ") + e.what());
  }
  validate(s);
  return s;
}

std::string strategy_json(const StrategyConfig& s) {
  ordered_json j;
  j["name"] = s.name;
  j["id"] = std::string(to_string(s.id));
  j["hooks"] = ordered_json::array();
  for (const auto& h : s.hooks) {
    j["hooks"].push_back({{"hook_point", std::string(to_string(h.hook))}, {"radius", h.radius}});
  }
  if (s.per_category_radii) {
    ordered_json radii = ordered_json::object();
    for (const auto& [c, r] : *s.per_category_radii) radii[std::string(to_string(c))] = r;
    j["per_category_radii"] = std::move(radii);
  }
  return j.dump(2);
}

StrategyConfig load_strategy_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read strategy file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_strategy(ss.str());
}

std::size_t tiles_in_use(const Document& doc, const GridSpec& grid) {
  std::set<TileIndex> tiles;
  for (const auto& a : doc.annotations) {
    for (const auto& piece : tile_rect(a.bbox, doc.page, grid.tile_size)) tiles.insert(piece.tile);
  }
  return tiles.size();
}

HookStats mask_stats(const Document& doc, HookPoint hook, const MaskSet& mask) {
  HookStats st;
  st.hook = hook;
  st.grid = mask.grid.name;
  st.radius = mask.radius;
  st.patch_count = mask.size();
  st.tiles_in_use = tiles_in_use(doc, mask.grid);
  st.page_tiles = page_tile_count(doc.page, mask.grid);
  st.coverage_tiles = st.tiles_in_use == 0 ? 0.0 : coverage(mask, st.tiles_in_use);
  st.coverage_page = coverage(mask, st.page_tiles);
  return st;
}

MaskBuild build_masks(const Document& doc, const StrategyConfig& strategy,
                      const CompressionModel& compression) {
  validate(strategy);
  MaskBuild build;
  for (const HookSetting& setting : strategy.hooks) {
    MaskSet mask;
    mask.radius = setting.radius;
    if (setting.hook == HookPoint::Projector) {
      MaskSet sam{kSam40, {}, setting.radius};
      for (const auto& a : doc.annotations) {
        const PatchSet cells = dilate(map_rect(a.bbox, doc.page, kSam40), setting.radius, kSam40);
        sam.patches.insert(cells.begin(), cells.end());
      }
      mask.grid = kProjector;
      mask.patches = propagate_compression(sam, compression).comp5_tainted.patches;
    } else {
      const GridSpec& grid = hook_grid(setting.hook);
      mask.grid = grid;
      for (const auto& a : doc.annotations) {
        const int r = strategy.radius_for(setting.hook, a.category);
        const PatchSet cells = dilate(map_rect(a.bbox, doc.page, grid), r, grid);
        mask.patches.insert(cells.begin(), cells.end());
      }
    }
    build.masks.emplace(setting.hook, std::move(mask));
  }
  for (const auto& [hook, mask] : build.masks) build.stats.push_back(mask_stats(doc, hook, mask));
  return build;
}

std::string serialize_masks(const MaskArchive& archive) {
  std::string out;
  for (const auto& [doc_id, masks] : archive) {
    for (const auto& [hook, mask] : masks) {
      for (const PatchIndex& p : mask.patches) {
        ordered_json rec;
        rec["doc_id"] = doc_id;
        rec["hook_point"] = std::string(to_string(hook));
        rec["grid_name"] = std::string(to_string(mask.grid.name));
        rec["tile_row"] = p.tile.row;
        rec["tile_col"] = p.tile.col;
        rec["row"] = p.cell.row;
        rec["col"] = p.cell.col;
        rec["radius"] = mask.radius;
        out += rec.dump();
        out += '\n';
      }
    }
  }
  return out;
}

MaskArchive parse_masks(std::string_view text) {
  MaskArchive archive;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "mask record " + std::to_string(lineno);
    try {
      const json rec = json::parse(line);
      const std::string hook_name = rec.at("hook_point").get<std::string>();
      auto hook = parse_hook_point(hook_name);
      if (!hook) throw IoError(where + ": unknown hook point " + hook_name);
      const GridSpec& grid = hook_grid(*hook);
      if (rec.at("grid_name").get<std::string>() != to_string(grid.name)) {
        throw IoError(where + ": grid does not match hook " + hook_name);
      }
      const PatchIndex p{{rec.at("tile_row").get<int>(), rec.at("tile_col").get<int>()},
                         {rec.at("row").get<int>(), rec.at("col").get<int>()}};
      if (p.tile.row < 0 || p.tile.col < 0 || p.cell.row < 0 || p.cell.col < 0 ||
          p.cell.row >= grid.rows || p.cell.col >= grid.cols) {
        throw IoError(where + ": patch index outside grid");
      }
      const int radius = rec.at("radius").get<int>();
      auto& masks = archive[rec.at("doc_id").get<std::string>()];
      auto [it, fresh] = masks.try_emplace(*hook, MaskSet{grid, {}, radius});
      if (!fresh && it->second.radius != radius) {
        throw IoError(where + ": inconsistent radius within one mask set");
      }
      it->second.patches.insert(p);
    } catch (const json::exception& e) {
      throw IoError(where + ": " + e.what());
    }
  }
  return archive;
}

void export_masks(const MaskArchive& archive, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_masks(archive);
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

MaskArchive import_masks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_masks(ss.str());
}

std::string mask_token_json(const StrategyConfig& s) {
  ordered_json tokens = ordered_json::array();
  for (const auto& h : s.hooks) {
    const MaskTokenSpec spec = default_mask_token(h.hook);
    tokens.push_back({{"hook_point", std::string(to_string(h.hook))},
                      {"dimensions", spec.dimensions},
                      {"init_mean", spec.init_mean},
                      {"init_stddev", spec.init_stddev},
                      {"trainable", spec.trainable}});
  }
  ordered_json j;
  j["strategy"] = s.name;
  j["mask_tokens"] = std::move(tokens);
  return j.dump(2) + "\n";
}

}  // namespace phimask
