#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phimask {

class Rng;

enum class PhiCategory { Name, DateOfBirth, Address, MRN, SSN, Email, Account };

enum class PhiForm { LongForm, Structured };

inline constexpr std::array<PhiCategory, 7> kAllCategories = {
    PhiCategory::Name, PhiCategory::DateOfBirth, PhiCategory::Address, PhiCategory::MRN,
    PhiCategory::SSN,  PhiCategory::Email,       PhiCategory::Account};

/// Name, DOB and address are spatially distributed text; the rest are short
/// identifiers with a fixed lexical format.
constexpr PhiForm form_of(PhiCategory c) noexcept {
  switch (c) {
    case PhiCategory::Name:
    case PhiCategory::DateOfBirth:
    case PhiCategory::Address:
      return PhiForm::LongForm;
    default:
      return PhiForm::Structured;
  }
}

std::string_view to_string(PhiCategory c) noexcept;
std::optional<PhiCategory> parse_category(std::string_view s) noexcept;

/// Full-string check of the canonical value format for a category
/// (MRN-dddddddd, ddd-dd-dddd, word@word.word, ACCT-d+, "First Last",
/// YYYY-MM-DD, "<num> <street>, <city>, <ST> <zip>").
bool matches_format(PhiCategory c, std::string_view value);

/// Axis-aligned pixel rectangle, half-open: covers [x, x+w) x [y, y+h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  constexpr int right() const noexcept { return x + w; }
  constexpr int bottom() const noexcept { return y + h; }
  constexpr bool empty() const noexcept { return w <= 0 || h <= 0; }
  constexpr long long area() const noexcept { return empty() ? 0 : 1LL * w * h; }
  constexpr bool intersects(const Rect& o) const noexcept {
    return !empty() && !o.empty() && x < o.right() && o.x < right() && y < o.bottom() &&
           o.y < bottom();
  }
  constexpr bool contains(const Rect& o) const noexcept {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
  }
  constexpr Rect translated(int dx, int dy) const noexcept { return {x + dx, y + dy, w, h}; }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

struct PageSize {
  int width = 0;
  int height = 0;

  constexpr Rect bounds() const noexcept { return {0, 0, width, height}; }
  friend constexpr bool operator==(const PageSize&, const PageSize&) = default;
};

/// 8.5 x 11 in at 300 DPI.
inline constexpr PageSize kLetterPage300Dpi{2550, 3300};

struct TextElement {
  std::string text;
  Rect bbox;

  friend bool operator==(const TextElement&, const TextElement&) = default;
};

struct PhiAnnotation {
  PhiCategory category = PhiCategory::Name;
  Rect bbox;
  std::string value;
  std::string context_label;
  Rect context_bbox;

  friend bool operator==(const PhiAnnotation&, const PhiAnnotation&) = default;
};

struct Document {
  std::string id;
  PageSize page;
  std::vector<TextElement> elements;  // reading order
  std::vector<PhiAnnotation> annotations;
  std::uint64_t seed = 0;
  std::string template_id;

  const PhiAnnotation& annotation(PhiCategory c) const;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Returns every violated Document invariant as a human-readable message;
/// empty when the document is well formed.
std::vector<std::string> validate(const Document& doc);

inline constexpr std::string_view kReferenceTemplate = "billing-v1";
inline constexpr std::string_view kMultiTileTemplate = "billing-v2";

std::vector<std::string> template_ids();

/// A fresh value in the canonical format of `category`.
std::string random_value(PhiCategory category, Rng& rng);

/// Deterministic in (seed, template). Throws ConfigError on unknown template.
Document generate_document(std::uint64_t seed, std::string_view template_id = kReferenceTemplate);

// ---------------------------------------------------------------------------
// Corpus on disk
//
//   <dir>/manifest.json                 {"documents": [{id, seed, template}, ...]}
//   <dir>/<id>.document.json            page size, seed, template, elements
//   <dir>/<id>.annotations.jsonl        one PHI record per line:
//       {doc_id, category, x, y, w, h, value, context_label, context_bbox}
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string id;
  std::uint64_t seed = 0;
  std::string template_id;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Seed of the i-th document of a corpus generated from `corpus_seed`.
std::uint64_t corpus_document_seed(std::uint64_t corpus_seed, std::size_t index) noexcept;

/// Generates the n documents of a corpus in memory (no I/O).
std::vector<Document> generate_corpus(std::size_t n, std::uint64_t corpus_seed,
                                      std::string_view template_id = kReferenceTemplate);

std::vector<ManifestEntry> write_corpus(std::size_t n, std::uint64_t corpus_seed,
                                        const std::filesystem::path& dir,
                                        std::string_view template_id = kReferenceTemplate);

void write_document(const Document& doc, const std::filesystem::path& dir);
Document read_document(const std::filesystem::path& dir, const std::string& id);
std::vector<Document> read_corpus(const std::filesystem::path& dir);

}  // namespace phimask
