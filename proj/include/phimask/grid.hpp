#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "phimask/document.hpp"

namespace phimask {

enum class GridName { Sam40, Vit16, Comp20, Comp5, Projector };

std::string_view to_string(GridName g) noexcept;
std::optional<GridName> parse_grid_name(std::string_view s) noexcept;

/// A square patch grid laid over square tiles of the page. Patch pitch is
/// tile_size / cols (25.6 px for sam40); all index math stays in integers so
/// the non-integral pitches are exact.
struct GridSpec {
  GridName name = GridName::Sam40;
  int tile_size = 0;  // pixels
  int rows = 0;
  int cols = 0;

  constexpr double pitch() const noexcept { return static_cast<double>(tile_size) / cols; }
  constexpr std::size_t cells_per_tile() const noexcept {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  friend constexpr bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline constexpr GridSpec kSam40{GridName::Sam40, 1024, 40, 40};
inline constexpr GridSpec kVit16{GridName::Vit16, 224, 16, 16};
inline constexpr GridSpec kComp20{GridName::Comp20, 1024, 20, 20};
inline constexpr GridSpec kComp5{GridName::Comp5, 1024, 5, 5};
/// Fused projector tokens: one token per comp5 cell of each tile, flattened
/// row-major (25 tokens per tile).
inline constexpr GridSpec kProjector{GridName::Projector, 1024, 5, 5};

const GridSpec& grid_spec(GridName g) noexcept;

struct TileIndex {
  int row = 0;
  int col = 0;
  friend constexpr auto operator<=>(const TileIndex&, const TileIndex&) = default;
};

struct Cell {
  int row = 0;
  int col = 0;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

struct PatchIndex {
  TileIndex tile;
  Cell cell;
  friend constexpr auto operator<=>(const PatchIndex&, const PatchIndex&) = default;
};

using CellSet = std::set<Cell>;
using PatchSet = std::set<PatchIndex>;

struct TilePiece {
  TileIndex tile;
  Rect local;  // tile-local pixels
  friend bool operator==(const TilePiece&, const TilePiece&) = default;
};

/// Splits a page rectangle over non-overlapping tiles anchored at (0,0).
/// Throws GeometryError for empty rects or rects not inside the page.
std::vector<TilePiece> tile_rect(const Rect& bbox, const PageSize& page, int tile_size);

/// Inclusive cell range covering a tile-local rect: a cell is claimed as soon
/// as one pixel of the rect falls in it. The rect is clipped to the tile;
/// throws GeometryError when nothing is left.
CellSet rect_to_patches(const Rect& local, const GridSpec& grid);

/// Chebyshev dilation clipped to the grid (never wraps).
CellSet dilate(const CellSet& cells, int radius, const GridSpec& grid);

/// tile_rect followed by rect_to_patches on every piece.
PatchSet map_rect(const Rect& bbox, const PageSize& page, const GridSpec& grid);

/// Per-tile dilation; tiles are encoded independently so nothing crosses seams.
PatchSet dilate(const PatchSet& patches, int radius, const GridSpec& grid);

std::set<TileIndex> tiles_of(const PatchSet& patches);

/// Number of tiles covering the page for a grid's tile size.
std::size_t page_tile_count(const PageSize& page, const GridSpec& grid) noexcept;

struct MaskSet {
  GridSpec grid = kSam40;
  PatchSet patches;
  int radius = 0;

  std::size_t size() const noexcept { return patches.size(); }
  bool empty() const noexcept { return patches.empty(); }
  bool contains(const PatchIndex& p) const { return patches.count(p) != 0; }

  friend bool operator==(const MaskSet&, const MaskSet&) = default;
};

/// |patches| / (tiles_in_use * rows * cols). Throws if tiles_in_use == 0.
double coverage(const MaskSet& mask, std::size_t tiles_in_use);

/// Receptive-field model of the compression neck (sam40 -> comp20 -> comp5).
/// Strides are fixed by the grid ratios (2 and 4); kernels are assumptions.
struct CompressionModel {
  int net2_kernel = 3;
  int net2_stride = 2;
  int net3_kernel = 5;
  int net3_stride = 4;
};

struct CompressionResult {
  MaskSet comp20_masked;   // whole 2x2 pre-image masked
  MaskSet comp20_tainted;  // receptive field touches the sam40 mask
  MaskSet comp5_masked;    // whole 4x4 comp20 pre-image masked
  MaskSet comp5_tainted;   // receptive field touches a tainted comp20 cell
};

/// Throws GeometryError when `sam_mask` is not on sam40 or the model's
/// strides disagree with the grid ratios.
CompressionResult propagate_compression(const MaskSet& sam_mask,
                                        const CompressionModel& model = {});

}  // namespace phimask
