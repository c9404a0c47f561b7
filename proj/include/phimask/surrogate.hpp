#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phimask/document.hpp"
#include "phimask/masking.hpp"
#include "phimask/rng.hpp"

namespace phimask {

/// Behavioral rules of the surrogate OCR model.
///
/// An element is unreadable once at least `suppression_threshold` of its
/// patches are masked at every hook present (one intact pathway is enough to
/// read it). Unreadable long-form text disappears; unreadable structured
/// identifiers are regenerated in a valid format whenever their caption is
/// still readable, and disappear otherwise.
///
/// Two degradation rules inflate the transcript with filler:
///   * multi-block: `multi_block_hooks` or more SAM blocks masked at once.
///     Output grows to `multi_block_multiplier` x baseline and masking only
///     holds for the first `multi_block_retained` masked elements.
///   * projector saturation: projector coverage >= `projector_coverage` with
///     radius >= `projector_radius`. Output grows to `projector_multiplier` x
///     baseline; emissions are unaffected.
struct BackendBehaviorConfig {
  double suppression_threshold = 0.5;
  std::size_t multi_block_hooks = 3;
  double multi_block_multiplier = 5.0;
  std::size_t multi_block_retained = 1;
  double projector_coverage = 0.99;
  int projector_radius = 3;
  double projector_multiplier = 20.0;
};

void validate(const BackendBehaviorConfig& cfg);

enum class Emission { Exact, Regenerated, Suppressed };
std::string_view to_string(Emission e) noexcept;

enum class Degradation { None, MultiBlock, ProjectorSaturation };
std::string_view to_string(Degradation d) noexcept;

struct EmissionRecord {
  PhiCategory category = PhiCategory::Name;
  Emission emitted = Emission::Exact;
  std::optional<std::string> emitted_string;  // absent when suppressed
  double masked_fraction = 0.0;
  bool context_visible = true;

  friend bool operator==(const EmissionRecord&, const EmissionRecord&) = default;
};

struct OcrOutput {
  std::string text;
  std::size_t char_count = 0;
  std::vector<EmissionRecord> emissions;  // one per annotation, category order
  bool degraded = false;
  Degradation cause = Degradation::None;

  const EmissionRecord* emission(PhiCategory c) const noexcept;
  friend bool operator==(const OcrOutput&, const OcrOutput&) = default;
};

/// Fraction of the patches under `bbox` that `mask` covers.
double masked_fraction(const Rect& bbox, const PageSize& page, const MaskSet& mask);

/// Length of the unmasked transcript (all elements, newline separated).
std::size_t baseline_char_count(const Document& doc);

/// A format-valid value for `category` that differs from `avoid`.
std::string regenerate_value(PhiCategory category, const std::string& avoid, Rng& rng);

/// Deterministic in (doc, masks, cfg, seed). Throws GeometryError when a mask
/// is not on its hook's grid.
OcrOutput run_ocr(const Document& doc, const HookMasks& masks,
                  const BackendBehaviorConfig& cfg = {}, std::uint64_t seed = 0);

/// Builds an OcrOutput from a plain transcript: each annotation is Exact when
/// its ground-truth value occurs verbatim and Suppressed otherwise.
OcrOutput parse_transcript(const Document& doc, std::string text);

/// Pluggable OCR stage. The surrogate is the default; real-model adapters
/// implement the same contract.
class OcrBackend {
 public:
  virtual ~OcrBackend() = default;
  virtual std::string name() const = 0;
  virtual OcrOutput run(const Document& doc, const HookMasks& masks, std::uint64_t seed) const = 0;
};

class SurrogateBackend final : public OcrBackend {
 public:
  explicit SurrogateBackend(BackendBehaviorConfig cfg = {});
  std::string name() const override { return "surrogate"; }
  OcrOutput run(const Document& doc, const HookMasks& masks, std::uint64_t seed) const override;
  const BackendBehaviorConfig& config() const noexcept { return cfg_; }

 private:
  BackendBehaviorConfig cfg_;
};

/// Reads transcripts produced out of process by a model adapter from
/// `<dir>/<doc_id>.txt` and scores them by exact-string scan.
class TranscriptBackend final : public OcrBackend {
 public:
  explicit TranscriptBackend(std::filesystem::path dir);
  std::string name() const override { return "adapter:" + dir_.string(); }
  OcrOutput run(const Document& doc, const HookMasks& masks, std::uint64_t seed) const override;

 private:
  std::filesystem::path dir_;
};

/// `surrogate` or `adapter:<path>`; anything else is a ConfigError.
std::unique_ptr<OcrBackend> make_backend(std::string_view selection,
                                         const BackendBehaviorConfig& cfg = {});

}  // namespace phimask
