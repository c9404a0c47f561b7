#pragma once
// Reference implementations used only by tests. Deliberately naive: they
// enumerate pixels and cells instead of doing index arithmetic.

#include <set>

#include "phimask/grid.hpp"

namespace oracle {

using namespace phimask;

// Pixel p of a tile lies in cell c iff c*tile <= p*n < (c+1)*tile.
inline bool pixel_in_cell(int p, int c, int n, int tile) {
  return c * tile <= p * n && p * n < (c + 1) * tile;
}

// Every cell that contains at least one pixel of `local`, by scanning pixels.
inline CellSet cells_by_pixels(const Rect& local, const GridSpec& g) {
  CellSet out;
  for (int y = local.y; y < local.bottom(); ++y) {
    for (int x = local.x; x < local.right(); ++x) {
      for (int r = 0; r < g.rows; ++r) {
        if (!pixel_in_cell(y, r, g.rows, g.tile_size)) continue;
        for (int c = 0; c < g.cols; ++c) {
          if (pixel_in_cell(x, c, g.cols, g.tile_size)) out.insert({r, c});
        }
      }
    }
  }
  return out;
}

inline CellSet dilate_brute(const CellSet& cells, int radius, const GridSpec& g) {
  CellSet out;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      for (const Cell& s : cells) {
        const int dr = r > s.row ? r - s.row : s.row - r;
        const int dc = c > s.col ? c - s.col : s.col - c;
        if (dr <= radius && dc <= radius) {
          out.insert({r, c});
          break;
        }
      }
    }
  }
  return out;
}

// Receptive-field enumeration for one tile: destination cell (i, j) of a
// stride-s, kernel-k layer with conv padding p = (k - s + 1) / 2 reads source
// rows s*i - p .. s*i - p + k - 1 (out-of-grid rows are padding).
inline std::set<Cell> taint_brute(const std::set<Cell>& src, int dst_n, int stride, int kernel) {
  const int pad = (kernel - stride + 1) / 2;
  std::set<Cell> out;
  for (int i = 0; i < dst_n; ++i) {
    for (int j = 0; j < dst_n; ++j) {
      for (int a = 0; a < kernel; ++a) {
        for (int b = 0; b < kernel; ++b) {
          if (src.count({stride * i - pad + a, stride * j - pad + b}) != 0) out.insert({i, j});
        }
      }
    }
  }
  return out;
}

inline std::set<Cell> masked_brute(const std::set<Cell>& src, int dst_n, int stride) {
  std::set<Cell> out;
  for (int i = 0; i < dst_n; ++i) {
    for (int j = 0; j < dst_n; ++j) {
      bool all = true;
      for (int a = 0; a < stride && all; ++a) {
        for (int b = 0; b < stride && all; ++b) all = src.count({stride * i + a, stride * j + b}) != 0;
      }
      if (all) out.insert({i, j});
    }
  }
  return out;
}

}  // namespace oracle
