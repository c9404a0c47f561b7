#include "phimask/surrogate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "phimask/error.hpp"

namespace phimask {

namespace {

// Degenerate-output filler. No digits, capitals or '@', so it can never
// reproduce a PHI value or trip a redaction pattern.
constexpr std::array<std::string_view, 12> kFillerWords = {
    "the",   "statement", "page",  "continued", "total",   "amount",
    "due",   "balance",   "of",    "service",   "charges", "and"};

const PhiAnnotation* annotation_for(const Document& doc, const TextElement& e) {
  for (const auto& a : doc.annotations) {
    if (a.bbox == e.bbox && a.value == e.text) return &a;
  }
  return nullptr;
}

void pad_with_filler(std::string& text, std::size_t target, Rng& rng) {
  if (text.size() >= target) return;
  text += '\n';
  while (text.size() < target) {
    text += rng.pick(kFillerWords);
    text += ' ';
  }
  text.resize(target);
}

}  // namespace

void validate(const BackendBehaviorConfig& cfg) {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(cfg.suppression_threshold)) {
    throw ConfigError("suppression threshold must be in (0, 1]");
  }
  if (!in_unit(cfg.projector_coverage)) throw ConfigError("projector coverage must be in (0, 1]");
  if (!(cfg.multi_block_multiplier > 1.0) || !(cfg.projector_multiplier > 1.0)) {
    throw ConfigError("degradation multipliers must exceed 1");
  }
  if (cfg.multi_block_hooks == 0) throw ConfigError("multi-block hook count must be positive");
}

std::string_view to_string(Emission e) noexcept {
  switch (e) {
    case Emission::Exact:
      return "exact";
    case Emission::Regenerated:
      return "regenerated";
    case Emission::Suppressed:
      return "suppressed";
  }
  return "exact";
}

std::string_view to_string(Degradation d) noexcept {
  switch (d) {
    case Degradation::None:
      return "none";
    case Degradation::MultiBlock:
      return "multi_block";
    case Degradation::ProjectorSaturation:
      return "projector_saturation";
  }
  return "none";
}

const EmissionRecord* OcrOutput::emission(PhiCategory c) const noexcept {
  for (const auto& e : emissions) {
    if (e.category == c) return &e;
  }
  return nullptr;
}

double masked_fraction(const Rect& bbox, const PageSize& page, const MaskSet& mask) {
  const PatchSet cells = map_rect(bbox, page, mask.grid);
  const auto hit = std::count_if(cells.begin(), cells.end(),
                                 [&](const PatchIndex& p) { return mask.contains(p); });
  return static_cast<double>(hit) / static_cast<double>(cells.size());
}

std::size_t baseline_char_count(const Document& doc) {
  std::size_t n = 0;
  for (const auto& e : doc.elements) n += e.text.size();
  return doc.elements.empty() ? 0 : n + doc.elements.size() - 1;
}

std::string regenerate_value(PhiCategory category, const std::string& avoid, Rng& rng) {
  for (;;) {
    std::string candidate = random_value(category, rng);
    if (candidate != avoid) return candidate;
  }
}

OcrOutput run_ocr(const Document& doc, const HookMasks& masks, const BackendBehaviorConfig& cfg,
                  std::uint64_t seed) {
  validate(cfg);
  for (const auto& [hook, mask] : masks) {
    if (mask.grid != hook_grid(hook)) {
      throw GeometryError("mask for " + std::string(to_string(hook)) + " is on grid " +
                          std::string(to_string(mask.grid.name)));
    }
  }

  // Minimum masked fraction over the hooks considered; no hook means intact.
  auto min_fraction = [&](const Rect& bbox, bool pre_fusion_only) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [hook, mask] : masks) {
      if (pre_fusion_only && !is_pre_fusion(hook)) continue;
      best = std::min(best, masked_fraction(bbox, doc.page, mask));
    }
    return std::isinf(best) ? 0.0 : best;
  };

  const std::uint64_t doc_seed = mix_seed(seed, hash_label(doc.id));
  OcrOutput out;
  for (PhiCategory c : kAllCategories) {
    const PhiAnnotation& a = doc.annotation(c);
    EmissionRecord rec;
    rec.category = c;
    rec.masked_fraction = min_fraction(a.bbox, false);
    // Captions are read through the pre-fusion pathways only; masking fused
    // projector tokens leaves the decoder's view of the field structure.
    rec.context_visible = min_fraction(a.context_bbox, true) < cfg.suppression_threshold;

    if (rec.masked_fraction < cfg.suppression_threshold) {
      rec.emitted = Emission::Exact;
      rec.emitted_string = a.value;
    } else if (form_of(c) == PhiForm::Structured && rec.context_visible) {
      Rng rng(mix_seed(doc_seed, static_cast<std::uint64_t>(c)));
      std::string regenerated;
      do {
        regenerated = regenerate_value(c, a.value, rng);
      } while (std::any_of(doc.annotations.begin(), doc.annotations.end(),
                           [&](const PhiAnnotation& o) { return o.value == regenerated; }));
      rec.emitted = Emission::Regenerated;
      rec.emitted_string = std::move(regenerated);
    } else {
      rec.emitted = Emission::Suppressed;
    }
    out.emissions.push_back(std::move(rec));
  }

  const auto sam_blocks = static_cast<std::size_t>(std::count_if(
      masks.begin(), masks.end(), [](const auto& kv) { return is_sam_block(kv.first); }));
  double multiplier = 1.0;
  if (sam_blocks >= cfg.multi_block_hooks) {
    out.cause = Degradation::MultiBlock;
    multiplier = cfg.multi_block_multiplier;
    std::size_t retained = 0;
    for (std::size_t i = 0; i < out.emissions.size(); ++i) {
      auto& rec = out.emissions[i];
      if (rec.emitted == Emission::Exact) continue;
      if (retained < cfg.multi_block_retained) {
        ++retained;
        continue;
      }
      rec.emitted = Emission::Exact;
      rec.emitted_string = doc.annotation(rec.category).value;
    }
  } else if (auto it = masks.find(HookPoint::Projector); it != masks.end()) {
    const std::size_t tiles = tiles_in_use(doc, it->second.grid);
    if (tiles > 0 && it->second.radius >= cfg.projector_radius &&
        coverage(it->second, tiles) >= cfg.projector_coverage) {
      out.cause = Degradation::ProjectorSaturation;
      multiplier = cfg.projector_multiplier;
    }
  }
  out.degraded = out.cause != Degradation::None;

  bool first = true;
  for (const TextElement& e : doc.elements) {
    std::string_view line = e.text;
    if (const PhiAnnotation* a = annotation_for(doc, e)) {
      const EmissionRecord* rec = out.emission(a->category);
      if (rec->emitted == Emission::Suppressed) continue;
      line = *rec->emitted_string;
    }
    if (!first) out.text += '\n';
    out.text += line;
    first = false;
  }

  if (out.degraded) {
    Rng rng(mix_seed(doc_seed, hash_label("filler")));
    const auto target =
        static_cast<std::size_t>(std::llround(multiplier * static_cast<double>(baseline_char_count(doc))));
    pad_with_filler(out.text, target, rng);
  }
  out.char_count = out.text.size();
  return out;
}

OcrOutput parse_transcript(const Document& doc, std::string text) {
  OcrOutput out;
  for (PhiCategory c : kAllCategories) {
    const PhiAnnotation& a = doc.annotation(c);
    EmissionRecord rec;
    rec.category = c;
    if (text.find(a.value) != std::string::npos) {
      rec.emitted = Emission::Exact;
      rec.emitted_string = a.value;
    } else {
      rec.emitted = Emission::Suppressed;
    }
    out.emissions.push_back(std::move(rec));
  }
  out.text = std::move(text);
  out.char_count = out.text.size();
  return out;
}

SurrogateBackend::SurrogateBackend(BackendBehaviorConfig cfg) : cfg_(cfg) { validate(cfg_); }

OcrOutput SurrogateBackend::run(const Document& doc, const HookMasks& masks,
                                std::uint64_t seed) const {
  return run_ocr(doc, masks, cfg_, seed);
}

TranscriptBackend::TranscriptBackend(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw ConfigError("adapter transcript directory does not exist: " + dir_.string());
  }
}

OcrOutput TranscriptBackend::run(const Document& doc, const HookMasks& /*masks*/,
                                 std::uint64_t /*seed*/) const {
  const auto path = dir_ / (doc.id + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing adapter transcript " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_transcript(doc, ss.str());
}

std::unique_ptr<OcrBackend> make_backend(std::string_view selection,
                                         const BackendBehaviorConfig& cfg) {
  if (selection == "surrogate") return std::make_unique<SurrogateBackend>(cfg);
  constexpr std::string_view prefix = "adapter:";
  if (selection.substr(0, prefix.size()) == prefix && selection.size() > prefix.size()) {
    return std::make_unique<TranscriptBackend>(std::string(selection.substr(prefix.size())));
  }
  throw ConfigError("unknown backend: " + std::string(selection));
}

}  // namespace phimask
