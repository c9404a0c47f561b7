#include "phimask/document.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "phimask/error.hpp"
#include "phimask/rng.hpp"

namespace phimask {

namespace {

constexpr std::array<std::string_view, 7> kCategoryNames = {
    "name", "date_of_birth", "address", "mrn", "ssn", "email", "account"};

}  // namespace

std::string_view to_string(PhiCategory c) noexcept {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<PhiCategory> parse_category(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<PhiCategory>(i);
  }
  return std::nullopt;
}

bool matches_format(PhiCategory c, std::string_view value) {
  static const std::array<std::regex, 7> formats = {
      std::regex(R"([A-Z][a-z]+ [A-Z][a-z]+)"),
      std::regex(R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01]))"),
      std::regex(R"(\d+ [A-Z][a-z]+ [A-Z][a-z]+, [A-Z][a-z]+( [A-Z][a-z]+)?, [A-Z]{2} \d{5})"),
      std::regex(R"(MRN-\d{8})"),
      std::regex(R"(\d{3}-\d{2}-\d{4})"),
      std::regex(R"([a-z]+@[a-z]+\.[a-z]+)"),
      std::regex(R"(ACCT-\d+)"),
  };
  const std::string s(value);
  return std::regex_match(s, formats[static_cast<std::size_t>(c)]);
}

const PhiAnnotation& Document::annotation(PhiCategory c) const {
  auto it = std::find_if(annotations.begin(), annotations.end(),
                         [c](const PhiAnnotation& a) { return a.category == c; });
  if (it == annotations.end()) {
    throw Error("document " + id + " has no " + std::string(to_string(c)) + " annotation");
  }
  return *it;
}

std::vector<std::string> validate(const Document& doc) {
  std::vector<std::string> problems;
  auto complain = [&](const std::string& what) { problems.push_back(doc.id + ": " + what); };

  if (doc.annotations.size() != kAllCategories.size()) {
    complain("expected 7 annotations, found " + std::to_string(doc.annotations.size()));
  }
  for (PhiCategory c : kAllCategories) {
    auto n = std::count_if(doc.annotations.begin(), doc.annotations.end(),
                           [c](const PhiAnnotation& a) { return a.category == c; });
    if (n != 1) {
      complain(std::string(to_string(c)) + " annotated " + std::to_string(n) + " times");
    }
  }

  const Rect page = doc.page.bounds();
  for (const auto& a : doc.annotations) {
    const std::string cat(to_string(a.category));
    if (a.bbox.empty()) complain(cat + " bbox has zero area");
    if (!page.contains(a.bbox)) complain(cat + " bbox outside page");
    if (!page.contains(a.context_bbox)) complain(cat + " context bbox outside page");
    if (a.value.empty()) complain(cat + " value is empty");
    if (!matches_format(a.category, a.value)) complain(cat + " value has wrong format: " + a.value);

    auto holders = std::count_if(doc.elements.begin(), doc.elements.end(), [&](const auto& e) {
      return e.text.find(a.value) != std::string::npos;
    });
    if (holders != 1) {
      complain(cat + " value occurs in " + std::to_string(holders) + " elements");
    }
  }

  for (std::size_t i = 0; i < doc.annotations.size(); ++i) {
    for (std::size_t j = 0; j < doc.annotations.size(); ++j) {
      const auto& a = doc.annotations[i];
      const auto& b = doc.annotations[j];
      if (i < j && a.bbox.intersects(b.bbox)) {
        complain(std::string(to_string(a.category)) + " overlaps " +
                 std::string(to_string(b.category)));
      }
      if (a.context_bbox.intersects(b.bbox)) {
        complain(std::string(to_string(a.category)) + " context label overlaps " +
                 std::string(to_string(b.category)) + " value");
      }
    }
  }
  return problems;
}

std::uint64_t corpus_document_seed(std::uint64_t corpus_seed, std::size_t index) noexcept {
  return mix_seed(corpus_seed, index);
}

}  // namespace phimask
