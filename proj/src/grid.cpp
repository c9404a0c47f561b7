#include "phimask/grid.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "phimask/error.hpp"

namespace phimask {

namespace {

constexpr std::array<std::string_view, 5> kGridNames = {"sam40", "vit16", "comp20", "comp5",
                                                        "projector"};

std::string describe(const Rect& r) {
  return "(" + std::to_string(r.x) + ", " + std::to_string(r.y) + ", " + std::to_string(r.w) +
         ", " + std::to_string(r.h) + ")";
}

// floor(px / pitch) with pitch = tile / n, in integers.
constexpr int cell_of(int px, int n, int tile) noexcept { return px * n / tile; }

// Downsamples every tile of `source` onto `dest`. In masked mode a destination
// cell is reported when its whole stride x stride pre-image is in `source`; in
// taint mode when any cell of its receptive field is. The field is a
// kernel x kernel window padded like a conv layer, (kernel - stride + 1) / 2
// cells on each side, so cell i reads rows stride*i - pad .. stride*i - pad + kernel - 1.
PatchSet downsample(const PatchSet& source, const GridSpec& src, const GridSpec& dst, int stride,
                    int kernel, bool all) {
  PatchSet out;
  const int span = all ? stride : kernel;
  const int pad = all ? 0 : (kernel - stride + 1) / 2;
  for (const TileIndex& tile : tiles_of(source)) {
    for (int i = 0; i < dst.rows; ++i) {
      for (int j = 0; j < dst.cols; ++j) {
        int seen = 0;
        int hits = 0;
        for (int r = std::max(stride * i - pad, 0); r < std::min(stride * i - pad + span, src.rows); ++r) {
          for (int c = std::max(stride * j - pad, 0); c < std::min(stride * j - pad + span, src.cols);
               ++c) {
            ++seen;
            hits += static_cast<int>(source.count({tile, {r, c}}));
          }
        }
        if (all ? hits == seen : hits > 0) out.insert({tile, {i, j}});
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(GridName g) noexcept { return kGridNames[static_cast<std::size_t>(g)]; }

std::optional<GridName> parse_grid_name(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kGridNames.size(); ++i) {
    if (kGridNames[i] == s) return static_cast<GridName>(i);
  }
  return std::nullopt;
}

const GridSpec& grid_spec(GridName g) noexcept {
  switch (g) {
    case GridName::Sam40:
      return kSam40;
    case GridName::Vit16:
      return kVit16;
    case GridName::Comp20:
      return kComp20;
    case GridName::Comp5:
      return kComp5;
    case GridName::Projector:
      return kProjector;
  }
  return kSam40;
}

std::vector<TilePiece> tile_rect(const Rect& bbox, const PageSize& page, int tile_size) {
  if (tile_size <= 0) throw GeometryError("tile size must be positive");
  if (bbox.empty()) throw GeometryError("zero-area rect " + describe(bbox));
  if (!page.bounds().contains(bbox)) throw GeometryError("rect outside page " + describe(bbox));

  std::vector<TilePiece> pieces;
  const int first_row = bbox.y / tile_size;
  const int last_row = (bbox.bottom() - 1) / tile_size;
  const int first_col = bbox.x / tile_size;
  const int last_col = (bbox.right() - 1) / tile_size;
  for (int tr = first_row; tr <= last_row; ++tr) {
    for (int tc = first_col; tc <= last_col; ++tc) {
      const int x0 = std::max(bbox.x, tc * tile_size);
      const int y0 = std::max(bbox.y, tr * tile_size);
      const int x1 = std::min(bbox.right(), (tc + 1) * tile_size);
      const int y1 = std::min(bbox.bottom(), (tr + 1) * tile_size);
      pieces.push_back({{tr, tc}, {x0 - tc * tile_size, y0 - tr * tile_size, x1 - x0, y1 - y0}});
    }
  }
  return pieces;
}

CellSet rect_to_patches(const Rect& rect, const GridSpec& grid) {
  // Parts hanging over the tile edge are clipped away.
  const int x0 = std::max(rect.x, 0);
  const int y0 = std::max(rect.y, 0);
  const int x1 = std::min(rect.right(), grid.tile_size);
  const int y1 = std::min(rect.bottom(), grid.tile_size);
  const Rect local{x0, y0, x1 - x0, y1 - y0};
  if (rect.empty() || local.empty()) {
    throw GeometryError("rect " + describe(rect) + " has no pixels in a " +
                        std::to_string(grid.tile_size) + " px tile");
  }
  CellSet cells;
  const int r0 = cell_of(local.y, grid.rows, grid.tile_size);
  const int r1 = cell_of(local.bottom() - 1, grid.rows, grid.tile_size);
  const int c0 = cell_of(local.x, grid.cols, grid.tile_size);
  const int c1 = cell_of(local.right() - 1, grid.cols, grid.tile_size);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) cells.insert({r, c});
  }
  return cells;
}

CellSet dilate(const CellSet& cells, int radius, const GridSpec& grid) {
  if (radius < 0) throw GeometryError("dilation radius must be >= 0");
  if (radius == 0) return cells;
  CellSet out;
  for (const Cell& c : cells) {
    for (int r = std::max(0, c.row - radius); r <= std::min(grid.rows - 1, c.row + radius); ++r) {
      for (int k = std::max(0, c.col - radius); k <= std::min(grid.cols - 1, c.col + radius); ++k) {
        out.insert({r, k});
      }
    }
  }
  return out;
}

PatchSet map_rect(const Rect& bbox, const PageSize& page, const GridSpec& grid) {
  PatchSet out;
  for (const TilePiece& piece : tile_rect(bbox, page, grid.tile_size)) {
    for (const Cell& c : rect_to_patches(piece.local, grid)) out.insert({piece.tile, c});
  }
  return out;
}

PatchSet dilate(const PatchSet& patches, int radius, const GridSpec& grid) {
  if (radius < 0) throw GeometryError("dilation radius must be >= 0");
  PatchSet out;
  for (const TileIndex& tile : tiles_of(patches)) {
    CellSet cells;
    for (auto it = patches.lower_bound({tile, {0, 0}}); it != patches.end() && it->tile == tile;
         ++it) {
      cells.insert(it->cell);
    }
    for (const Cell& c : dilate(cells, radius, grid)) out.insert({tile, c});
  }
  return out;
}

std::set<TileIndex> tiles_of(const PatchSet& patches) {
  std::set<TileIndex> tiles;
  for (const auto& p : patches) tiles.insert(p.tile);
  return tiles;
}

std::size_t page_tile_count(const PageSize& page, const GridSpec& grid) noexcept {
  const auto across = static_cast<std::size_t>((page.width + grid.tile_size - 1) / grid.tile_size);
  const auto down = static_cast<std::size_t>((page.height + grid.tile_size - 1) / grid.tile_size);
  return across * down;
}

double coverage(const MaskSet& mask, std::size_t tiles_in_use) {
  if (tiles_in_use == 0) throw GeometryError("coverage needs at least one tile in use");
  return static_cast<double>(mask.size()) /
         static_cast<double>(tiles_in_use * mask.grid.cells_per_tile());
}

CompressionResult propagate_compression(const MaskSet& sam_mask, const CompressionModel& model) {
  if (sam_mask.grid != kSam40) {
    throw GeometryError("compression expects a sam40 mask, got " +
                        std::string(to_string(sam_mask.grid.name)));
  }
  if (model.net2_stride * kComp20.rows != kSam40.rows ||
      model.net3_stride * kComp5.rows != kComp20.rows) {
    throw GeometryError("compression strides must map 40 -> 20 -> 5");
  }
  if (model.net2_kernel < model.net2_stride || model.net3_kernel < model.net3_stride) {
    throw GeometryError("compression kernels must be at least as large as their strides");
  }

  CompressionResult out;
  const int r = sam_mask.radius;
  out.comp20_masked = {kComp20,
                       downsample(sam_mask.patches, kSam40, kComp20, model.net2_stride,
                                  model.net2_kernel, true),
                       r};
  out.comp20_tainted = {kComp20,
                        downsample(sam_mask.patches, kSam40, kComp20, model.net2_stride,
                                   model.net2_kernel, false),
                        r};
  out.comp5_masked = {kComp5,
                      downsample(out.comp20_masked.patches, kComp20, kComp5, model.net3_stride,
                                 model.net3_kernel, true),
                      r};
  out.comp5_tainted = {kComp5,
                       downsample(out.comp20_tainted.patches, kComp20, kComp5, model.net3_stride,
                                  model.net3_kernel, false),
                       r};
  return out;
}

}  // namespace phimask
