#include <doctest.h>

#include "oracles.hpp"
#include "phimask/error.hpp"
#include "phimask/grid.hpp"
#include "phimask/rng.hpp"

using namespace phimask;

namespace {

CellSet range(int r0, int r1, int c0, int c1) {
  CellSet s;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) s.insert({r, c});
  return s;
}

Rect random_local(Rng& rng, int tile) {
  const int w = static_cast<int>(rng.between(1, tile));
  const int h = static_cast<int>(rng.between(1, tile));
  return {static_cast<int>(rng.between(0, tile - w)), static_cast<int>(rng.between(0, tile - h)), w, h};
}

}  // namespace

TEST_CASE("grid specs") {
  CHECK(kSam40.pitch() == doctest::Approx(25.6));
  CHECK(kVit16.pitch() == doctest::Approx(14.0));
  CHECK(kComp20.pitch() == doctest::Approx(51.2));
  CHECK(kSam40.cells_per_tile() == 1600);
  CHECK(kProjector.cells_per_tile() == 25);
  for (GridName g : {GridName::Sam40, GridName::Vit16, GridName::Comp20, GridName::Comp5,
                     GridName::Projector}) {
    CHECK(parse_grid_name(to_string(g)) == g);
    CHECK(grid_spec(g).name == g);
  }
  CHECK_FALSE(parse_grid_name("sam64").has_value());
}

TEST_CASE("tile_rect splits at tile seams") {
  const auto pieces = tile_rect({1000, 10, 48, 20}, {2048, 1024}, 1024);
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0] == TilePiece{{0, 0}, {1000, 10, 24, 20}});
  CHECK(pieces[1] == TilePiece{{0, 1}, {0, 10, 24, 20}});

  const auto one = tile_rect({0, 0, 1024, 1024}, {2048, 2048}, 1024);
  REQUIRE(one.size() == 1);
  CHECK(one[0].local == Rect{0, 0, 1024, 1024});

  CHECK(tile_rect({1020, 1020, 10, 10}, {2048, 2048}, 1024).size() == 4);
}

TEST_CASE("tile_rect errors") {
  CHECK_THROWS_AS(tile_rect({0, 0, 0, 5}, {100, 100}, 50), GeometryError);
  CHECK_THROWS_AS(tile_rect({90, 0, 20, 5}, {100, 100}, 50), GeometryError);
  CHECK_THROWS_AS(tile_rect({-1, 0, 5, 5}, {100, 100}, 50), GeometryError);
  CHECK_THROWS_AS(tile_rect({0, 0, 5, 5}, {100, 100}, 0), GeometryError);
}

TEST_CASE("rect_to_patches frozen examples") {
  CHECK(rect_to_patches({256, 512, 100, 20}, kSam40) == range(20, 20, 10, 13));
  CHECK(rect_to_patches({210, 0, 20, 14}, kVit16) == range(0, 0, 15, 15));
  CHECK(rect_to_patches({0, 0, 1, 1}, kSam40) == range(0, 0, 0, 0));
  CHECK(rect_to_patches({0, 0, 1024, 1024}, kSam40).size() == 1600);
  // 25.6 px pitch: pixel 25 is still cell 0, pixel 26 is cell 1.
  CHECK(rect_to_patches({25, 0, 1, 1}, kSam40) == range(0, 0, 0, 0));
  CHECK(rect_to_patches({26, 0, 1, 1}, kSam40) == range(0, 0, 1, 1));
  CHECK(rect_to_patches({1000, 0, 30, 5}, kSam40) == range(0, 0, 39, 39));
  CHECK(rect_to_patches({-5, -5, 10, 10}, kSam40) == range(0, 0, 0, 0));
  CHECK_THROWS_AS(rect_to_patches({0, 0, 0, 5}, kSam40), GeometryError);
  CHECK_THROWS_AS(rect_to_patches({1024, 0, 10, 5}, kSam40), GeometryError);
}

TEST_CASE("rect_to_patches matches the pixel oracle") {
  Rng rng(2024);
  for (const GridSpec& g : {kSam40, kVit16, kComp20}) {
    for (int i = 0; i < 300; ++i) {
      // Small rects keep the pixel scan cheap; the acceptance suite runs more.
      Rect r = random_local(rng, g.tile_size);
      r.w = std::min(r.w, 90);
      r.h = std::min(r.h, 90);
      REQUIRE(rect_to_patches(r, g) == oracle::cells_by_pixels(r, g));
    }
  }
}

TEST_CASE("dilation") {
  const CellSet centre = {{10, 10}};
  CHECK(dilate(centre, 0, kSam40) == centre);
  CHECK(dilate(centre, 1, kSam40) == range(9, 11, 9, 11));
  CHECK(dilate(CellSet{{0, 0}}, 2, kSam40) == range(0, 2, 0, 2));
  CHECK(dilate(CellSet{{39, 39}}, 1, kSam40) == range(38, 39, 38, 39));
  CHECK(dilate(CellSet{}, 3, kSam40).empty());
  CHECK_THROWS_AS(dilate(centre, -1, kSam40), GeometryError);

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    CellSet cells;
    const int n = static_cast<int>(rng.between(1, 6));
    for (int k = 0; k < n; ++k) {
      cells.insert({static_cast<int>(rng.between(0, 15)), static_cast<int>(rng.between(0, 15))});
    }
    const int r = static_cast<int>(rng.between(0, 8));
    REQUIRE(dilate(cells, r, kVit16) == oracle::dilate_brute(cells, r, kVit16));
  }
}

TEST_CASE("page-level mapping stays per tile") {
  const PageSize page{2048, 1024};
  const PatchSet p = map_rect({1000, 0, 48, 10}, page, kSam40);
  CHECK(tiles_of(p).size() == 2);
  // Dilation at the seam never spills into the neighbouring tile's columns.
  const PatchSet d = dilate(p, 2, kSam40);
  for (const auto& x : d) {
    if (x.tile.col == 0) CHECK(x.cell.col >= 37);
    if (x.tile.col == 1) CHECK(x.cell.col <= 2);
  }
  CHECK(page_tile_count({2550, 3300}, kSam40) == 12);
  CHECK(page_tile_count({2550, 3300}, kVit16) == 12 * 15);
}

TEST_CASE("coverage") {
  MaskSet m{kSam40, {}, 1};
  for (int r = 0; r < 40 && m.size() < 539; ++r)
    for (int c = 0; c < 40 && m.size() < 539; ++c) m.patches.insert(PatchIndex{{0, 0}, {r, c}});
  REQUIRE(m.size() == 539);
  CHECK(coverage(m, 1) == doctest::Approx(0.336875));
  CHECK(coverage(m, 2) == doctest::Approx(0.168438).epsilon(1e-4));
  CHECK(coverage(MaskSet{kSam40, {}, 0}, 1) == 0.0);
  CHECK_THROWS_AS(coverage(m, 0), GeometryError);
}

TEST_CASE("compression frozen examples") {
  MaskSet single{kSam40, {{{0, 0}, {0, 0}}}, 0};
  const auto a = propagate_compression(single);
  CHECK(a.comp20_masked.empty());
  CHECK(a.comp20_tainted.patches == PatchSet{{{0, 0}, {0, 0}}});
  CHECK(a.comp5_tainted.patches == PatchSet{{{0, 0}, {0, 0}}});

  MaskSet block{kSam40, {}, 0};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) block.patches.insert(PatchIndex{{0, 0}, {r, c}});
  const auto b = propagate_compression(block);
  CHECK(b.comp20_masked.patches == PatchSet{{{0, 0}, {0, 0}}});
  CHECK(b.comp20_tainted.patches ==
        PatchSet{{{0, 0}, {0, 0}}, {{0, 0}, {0, 1}}, {{0, 0}, {1, 0}}, {{0, 0}, {1, 1}}});

  MaskSet off{kSam40, {{{0, 0}, {2, 2}}, {{0, 0}, {2, 3}}, {{0, 0}, {3, 2}}, {{0, 0}, {3, 3}}}, 0};
  const auto c = propagate_compression(off);
  CHECK(c.comp20_masked.patches == PatchSet{{{0, 0}, {1, 1}}});
  CHECK(c.comp20_tainted.patches ==
        PatchSet{{{0, 0}, {1, 1}}, {{0, 0}, {1, 2}}, {{0, 0}, {2, 1}}, {{0, 0}, {2, 2}}});

  MaskSet full{kSam40, {}, 0};
  for (int r = 0; r < 40; ++r)
    for (int k = 0; k < 40; ++k) full.patches.insert(PatchIndex{{0, 0}, {r, k}});
  const auto f = propagate_compression(full);
  CHECK(f.comp20_masked.size() == 400);
  CHECK(f.comp20_tainted == f.comp20_masked);
  CHECK(f.comp5_masked.size() == 25);
  CHECK(f.comp5_tainted == f.comp5_masked);
}

TEST_CASE("compression matches receptive-field enumeration") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::set<Cell> cells;
    const int n = static_cast<int>(rng.between(1, 60));
    for (int k = 0; k < n; ++k) {
      cells.insert({static_cast<int>(rng.between(0, 39)), static_cast<int>(rng.between(0, 39))});
    }
    MaskSet m{kSam40, {}, 0};
    for (const auto& c : cells) m.patches.insert(PatchIndex{{1, 2}, c});
    const auto res = propagate_compression(m);

    auto cells_of = [](const MaskSet& s) {
      std::set<Cell> out;
      for (const auto& p : s.patches) {
        REQUIRE(p.tile == TileIndex{1, 2});
        out.insert(p.cell);
      }
      return out;
    };
    const auto t20 = oracle::taint_brute(cells, 20, 2, 3);
    CHECK(cells_of(res.comp20_tainted) == t20);
    CHECK(cells_of(res.comp20_masked) == oracle::masked_brute(cells, 20, 2));
    CHECK(cells_of(res.comp5_tainted) == oracle::taint_brute(t20, 5, 4, 5));
    CHECK(cells_of(res.comp5_masked) ==
          oracle::masked_brute(oracle::masked_brute(cells, 20, 2), 5, 4));
  }
}

TEST_CASE("compression errors") {
  MaskSet wrong{kVit16, {{{0, 0}, {0, 0}}}, 0};
  CHECK_THROWS_AS(propagate_compression(wrong), GeometryError);
  MaskSet ok{kSam40, {{{0, 0}, {0, 0}}}, 0};
  CHECK_THROWS_AS(propagate_compression(ok, {3, 3, 5, 4}), GeometryError);
  CHECK_THROWS_AS(propagate_compression(ok, {1, 2, 5, 4}), GeometryError);
  CHECK_NOTHROW(propagate_compression(ok, {2, 2, 4, 4}));
}
