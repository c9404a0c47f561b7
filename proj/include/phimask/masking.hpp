#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phimask/document.hpp"
#include "phimask/grid.hpp"

namespace phimask {

enum class HookPoint { SamBlock6, SamBlock9, SamBlock11, CompressionNet2, VisionEncoder, Projector };

inline constexpr std::array<HookPoint, 6> kAllHookPoints = {
    HookPoint::SamBlock6,       HookPoint::SamBlock9,     HookPoint::SamBlock11,
    HookPoint::CompressionNet2, HookPoint::VisionEncoder, HookPoint::Projector};

std::string_view to_string(HookPoint h) noexcept;
std::optional<HookPoint> parse_hook_point(std::string_view s) noexcept;

/// SAM blocks -> sam40, net_2 -> comp20, auxiliary ViT -> vit16, projector -> projector.
const GridSpec& hook_grid(HookPoint h) noexcept;

constexpr bool is_sam_block(HookPoint h) noexcept {
  return h == HookPoint::SamBlock6 || h == HookPoint::SamBlock9 || h == HookPoint::SamBlock11;
}

/// Everything upstream of the projector's feature fusion.
constexpr bool is_pre_fusion(HookPoint h) noexcept { return h != HookPoint::Projector; }

/// Replacement token injected at a hook: N(mean, stddev^2) per dimension.
struct MaskTokenSpec {
  HookPoint hook = HookPoint::SamBlock11;
  int dimensions = 768;
  double init_mean = 0.0;
  double init_stddev = 0.02;
  bool trainable = true;
};

/// 768 for SAM blocks and 1280 for the projector; the net_2 and ViT widths
/// are configuration defaults only.
MaskTokenSpec default_mask_token(HookPoint h) noexcept;
void validate(const MaskTokenSpec& spec);

enum class StrategyId { Baseline, V3, V4, V5, V6, V7, V8, V9 };

std::string_view to_string(StrategyId id) noexcept;
std::optional<StrategyId> parse_strategy_id(std::string_view s) noexcept;

struct HookSetting {
  HookPoint hook = HookPoint::SamBlock11;
  int radius = 1;
  friend bool operator==(const HookSetting&, const HookSetting&) = default;
};

struct StrategyConfig {
  std::string name;  // preset name, e.g. "V7-r1-3"
  StrategyId id = StrategyId::V3;
  std::vector<HookSetting> hooks;
  std::optional<std::map<PhiCategory, int>> per_category_radii;  // V5 only

  /// "1", "1,2" or "1-5" (V5 range); "-" for the unmasked baseline.
  std::string radius_label() const;
  int radius_for(HookPoint h, PhiCategory c) const;
  const HookSetting* hook(HookPoint h) const;

  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

/// Throws ConfigError when the hook set does not match the strategy id, a
/// radius is negative, or V5 radii are missing / outside 1..8.
void validate(const StrategyConfig& s);

/// The fourteen rows of the strategy comparison table, in table order.
const std::vector<std::string>& table_preset_names();
/// Radius ablation subset: V3, V6 and V9 at r = 1, 2, 3.
const std::vector<std::string>& ablation_preset_names();
/// All presets: the table rows plus "baseline" (no hooks).
std::vector<std::string> preset_names();
StrategyConfig preset(std::string_view name);

/// Strategy file: {"id", "hooks": [{"hook_point", "radius"}], "per_category_radii"?, "name"?}.
StrategyConfig parse_strategy(std::string_view json_text);
std::string strategy_json(const StrategyConfig& s);
StrategyConfig load_strategy_file(const std::filesystem::path& path);

using HookMasks = std::map<HookPoint, MaskSet>;

struct HookStats {
  HookPoint hook = HookPoint::SamBlock11;
  GridName grid = GridName::Sam40;
  int radius = 0;
  std::size_t patch_count = 0;
  std::size_t tiles_in_use = 0;  // tiles touched by any PHI bbox
  std::size_t page_tiles = 0;    // tiles covering the whole page
  double coverage_tiles = 0.0;
  double coverage_page = 0.0;
};

struct MaskBuild {
  HookMasks masks;
  std::vector<HookStats> stats;  // one per hook, in hook order
};

/// Tiles of `grid` touched by any annotation bbox of the document.
std::size_t tiles_in_use(const Document& doc, const GridSpec& grid);

HookStats mask_stats(const Document& doc, HookPoint hook, const MaskSet& mask);

/// Union over the seven annotations of the dilated patch sets for every hook
/// of the strategy. The projector mask is the comp5 taint of the sam40 mask.
MaskBuild build_masks(const Document& doc, const StrategyConfig& strategy,
                      const CompressionModel& compression = {});

// ---------------------------------------------------------------------------
// Mask-set interchange: JSON lines, one patch per record
//   {doc_id, hook_point, grid_name, tile_row, tile_col, row, col, radius}
// Records are ordered by doc_id, hook, tile, row, col.
// ---------------------------------------------------------------------------

using MaskArchive = std::map<std::string, HookMasks>;  // doc_id -> masks

std::string serialize_masks(const MaskArchive& archive);
MaskArchive parse_masks(std::string_view text);
void export_masks(const MaskArchive& archive, const std::filesystem::path& path);
MaskArchive import_masks(const std::filesystem::path& path);

/// {"mask_tokens": [{hook_point, dimensions, init_mean, init_stddev, trainable}]}
std::string mask_token_json(const StrategyConfig& s);

}  // namespace phimask
