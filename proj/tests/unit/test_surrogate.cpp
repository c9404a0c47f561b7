#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "phimask/error.hpp"
#include "phimask/masking.hpp"
#include "phimask/rng.hpp"
#include "phimask/surrogate.hpp"

using namespace phimask;

namespace {

OcrOutput ocr(const Document& doc, const char* strategy, std::uint64_t seed = 0) {
  return run_ocr(doc, build_masks(doc, preset(strategy)).masks, {}, seed);
}

bool in_text(const OcrOutput& o, const std::string& s) { return o.text.find(s) != std::string::npos; }

}  // namespace

TEST_CASE("no masks: identity") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Document doc = generate_document(s);
    const auto out = run_ocr(doc, {});
    CHECK_FALSE(out.degraded);
    CHECK(out.char_count == out.text.size());
    CHECK(out.char_count == baseline_char_count(doc));
    for (const auto& a : doc.annotations) CHECK(in_text(out, a.value));
    for (const auto& e : out.emissions) CHECK(e.emitted == Emission::Exact);
  }
}

TEST_CASE("V3 r=1 on the reference document") {
  const Document doc = generate_document(21);
  const auto out = ocr(doc, "V3-r1", 5);
  REQUIRE(out.emissions.size() == 7);
  for (const auto& e : out.emissions) {
    const auto& a = doc.annotation(e.category);
    if (form_of(e.category) == PhiForm::LongForm) {
      CHECK(e.emitted == Emission::Suppressed);
      CHECK_FALSE(e.emitted_string.has_value());
      CHECK_FALSE(in_text(out, a.value));
    } else {
      CHECK(e.emitted == Emission::Regenerated);
      REQUIRE(e.emitted_string.has_value());
      CHECK(*e.emitted_string != a.value);
      CHECK(matches_format(e.category, *e.emitted_string));
      CHECK(in_text(out, *e.emitted_string));
      CHECK(e.context_visible);
    }
    CHECK(e.masked_fraction >= 0.5);
  }
  CHECK_FALSE(out.degraded);
  // Captions survive, so the field structure is still in the transcript.
  CHECK(in_text(out, "Medical Record Number:"));
}

TEST_CASE("regeneration is seeded") {
  const Document doc = generate_document(21);
  CHECK(ocr(doc, "V3-r1", 5) == ocr(doc, "V3-r1", 5));
  CHECK_FALSE(ocr(doc, "V3-r1", 5).text == ocr(doc, "V3-r1", 6).text);
}

TEST_CASE("any intact pathway leaks") {
  const Document doc = generate_document(2);
  HookMasks masks = build_masks(doc, preset("V3-r1")).masks;
  masks[HookPoint::VisionEncoder] = MaskSet{kVit16, {}, 0};
  const auto out = run_ocr(doc, masks);
  for (const auto& a : doc.annotations) CHECK(in_text(out, a.value));
}

TEST_CASE("masked caption means suppression") {
  const Document doc = generate_document(2);
  HookMasks masks = build_masks(doc, preset("V3-r1")).masks;
  const auto& mrn = doc.annotation(PhiCategory::MRN);
  for (const auto& p : map_rect(mrn.context_bbox, doc.page, kSam40)) {
    masks[HookPoint::SamBlock11].patches.insert(p);
  }
  const auto out = run_ocr(doc, masks);
  CHECK(out.emission(PhiCategory::MRN)->emitted == Emission::Suppressed);
  CHECK_FALSE(out.emission(PhiCategory::MRN)->context_visible);
  CHECK(out.emission(PhiCategory::SSN)->emitted == Emission::Regenerated);
}

TEST_CASE("projector masking leaves captions readable") {
  const Document doc = generate_document(2);
  const auto out = ocr(doc, "V9-r2");
  for (PhiCategory c : {PhiCategory::MRN, PhiCategory::SSN, PhiCategory::Email, PhiCategory::Account}) {
    CHECK(out.emission(c)->emitted == Emission::Regenerated);
  }
}

TEST_CASE("multi-block degradation") {
  const Document doc = generate_document(8);
  const auto out = ocr(doc, "V4-r1");
  CHECK(out.degraded);
  CHECK(out.cause == Degradation::MultiBlock);
  CHECK(out.char_count == 5 * baseline_char_count(doc));
  int held = 0;
  for (const auto& e : out.emissions) held += e.emitted == Emission::Exact ? 0 : 1;
  CHECK(held == 1);
  CHECK(out.emission(PhiCategory::Name)->emitted == Emission::Suppressed);
}

TEST_CASE("projector saturation") {
  const Document doc = generate_document(8);
  const auto sat = ocr(doc, "V9-r3");
  CHECK(sat.degraded);
  CHECK(sat.cause == Degradation::ProjectorSaturation);
  CHECK(sat.char_count == 20 * baseline_char_count(doc));
  CHECK(sat.emissions == ocr(doc, "V9-r2").emissions);
  CHECK_FALSE(ocr(doc, "V9-r2").degraded);
  // The multi-tile template never saturates the projector.
  CHECK_FALSE(ocr(generate_document(8, kMultiTileTemplate), "V9-r3").degraded);
}

TEST_CASE("stable strategies keep the transcript length") {
  for (const auto& name : table_preset_names()) {
    if (name == "V4-r1" || name == "V9-r3") continue;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Document doc = generate_document(s);
      const auto out = ocr(doc, name.c_str(), s);
      const double base = static_cast<double>(baseline_char_count(doc));
      CHECK_FALSE(out.degraded);
      CHECK(std::abs(static_cast<double>(out.char_count) - base) <= 0.1 * base);
    }
  }
}

TEST_CASE("suppression is monotone in the mask") {
  Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const Document doc = generate_document(trial, trial % 2 ? kMultiTileTemplate : kReferenceTemplate);
    HookMasks masks = build_masks(doc, preset("V3-r1")).masks;
    const auto before = run_ocr(doc, masks, {}, 1);
    auto& m = masks[HookPoint::SamBlock11];
    for (int k = 0; k < 300; ++k) {
      m.patches.insert(PatchIndex{{static_cast<int>(rng.between(0, 3)), static_cast<int>(rng.between(0, 2))},
                        {static_cast<int>(rng.between(0, 39)), static_cast<int>(rng.between(0, 39))}});
    }
    const auto after = run_ocr(doc, masks, {}, 1);
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(after.emissions[i].masked_fraction >= before.emissions[i].masked_fraction);
      if (before.emissions[i].emitted == Emission::Suppressed) {
        CHECK(after.emissions[i].emitted == Emission::Suppressed);
      }
      if (before.emissions[i].emitted != Emission::Exact) {
        CHECK(after.emissions[i].emitted != Emission::Exact);
      }
    }
  }
}

TEST_CASE("suppressed values never appear in the text") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Document doc = generate_document(s);
    for (const auto& name : table_preset_names()) {
      const auto out = ocr(doc, name.c_str(), s);
      for (const auto& e : out.emissions) {
        if (e.emitted == Emission::Suppressed) CHECK_FALSE(in_text(out, doc.annotation(e.category).value));
      }
    }
  }
}

TEST_CASE("errors") {
  const Document doc = generate_document(1);
  HookMasks wrong;
  wrong[HookPoint::SamBlock11] = MaskSet{kVit16, {}, 1};
  CHECK_THROWS_AS(run_ocr(doc, wrong), GeometryError);

  BackendBehaviorConfig cfg;
  cfg.suppression_threshold = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.multi_block_multiplier = 1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = {};
  cfg.projector_coverage = 1.5;
  CHECK_THROWS_AS(SurrogateBackend{cfg}, ConfigError);
}

TEST_CASE("backend selection") {
  CHECK(make_backend("surrogate")->name() == "surrogate");
  CHECK_THROWS_AS(make_backend("deepseek"), ConfigError);
  CHECK_THROWS_AS(make_backend("adapter:"), ConfigError);
  CHECK_THROWS_AS(make_backend("adapter:/nonexistent/dir"), ConfigError);
}

TEST_CASE("adapter transcripts are scored by exact-string scan") {
  const Document doc = generate_document(4);
  const auto dir = std::filesystem::temp_directory_path() / "phimask_adapter";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / (doc.id + ".txt"));
    f << "header\n" << doc.annotation(PhiCategory::SSN).value << "\nMRN-00000000\n";
  }
  const auto backend = make_backend("adapter:" + dir.string());
  const auto out = backend->run(doc, {}, 0);
  CHECK(out.emission(PhiCategory::SSN)->emitted == Emission::Exact);
  CHECK(out.emission(PhiCategory::MRN)->emitted == Emission::Suppressed);
  CHECK(out.char_count == out.text.size());
  CHECK_THROWS_AS(backend->run(generate_document(5), {}, 0), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("names") {
  CHECK(to_string(Emission::Regenerated) == "regenerated");
  CHECK(to_string(Degradation::ProjectorSaturation) == "projector_saturation");
}
