// Synthetic billing-statement generator.
//
// Templates are logical layouts: every text element carries its pixel bbox on
// a 300 DPI letter page, nothing is rasterized. PHI value boxes are fixed
// field boxes, so mask geometry is identical across documents of one template
// and only the strings vary with the seed.

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>

#include "phimask/document.hpp"
#include "phimask/error.hpp"
#include "phimask/rng.hpp"

namespace phimask {

namespace {

struct FieldSlot {
  PhiCategory category;
  Rect value_box;
  std::string_view label;
  Rect label_box;
};

struct TemplateLayout {
  std::string_view id;
  int dx = 0;  // translation applied to the PHI block
  int dy = 0;
  int services_top = 0;
  int summary_top = 0;
};

// PHI block of the reference statement; all boxes sit inside the top-left
// 1024 px tile. Long-form fields span many SAM cells, structured identifiers
// fit in at most 2x2 cells and their captions sit well away from every value.
constexpr std::array<FieldSlot, 7> kPhiBlock = {{
    {PhiCategory::Name, {154, 26, 844, 76}, "Patient Name:", {0, 26, 140, 25}},
    {PhiCategory::DateOfBirth, {282, 154, 486, 50}, "Date of Birth:", {0, 154, 260, 50}},
    {PhiCategory::Address, {154, 256, 818, 128}, "Address:", {0, 256, 140, 40}},
    {PhiCategory::MRN, {103, 922, 25, 25}, "Medical Record Number:", {26, 564, 127, 24}},
    {PhiCategory::SSN, {256, 794, 51, 25}, "SSN:", {282, 564, 127, 24}},
    {PhiCategory::Email, {359, 948, 25, 24}, "Email:", {538, 564, 127, 24}},
    {PhiCategory::Account, {820, 820, 50, 24}, "Account Number:", {794, 564, 127, 24}},
}};

constexpr std::array<TemplateLayout, 2> kTemplates = {{
    {kReferenceTemplate, 0, 0, 1150, 2150},
    // Straddles the x=1024 and y=2048 tile seams.
    {kMultiTileTemplate, 512, 1536, 460, 2600},
}};

constexpr std::array<std::string_view, 32> kFirstNames = {
    "James",  "Mary",   "Robert",  "Patricia", "John",    "Jennifer", "Michael", "Linda",
    "David",  "Barbara", "William", "Elizabeth", "Richard", "Susan",   "Joseph",  "Jessica",
    "Thomas", "Sarah",  "Charles", "Karen",    "Daniel",  "Nancy",    "Matthew", "Lisa",
    "Anthony", "Betty", "Mark",    "Margaret", "Donald",  "Sandra",   "Steven",  "Ashley"};

constexpr std::array<std::string_view, 32> kLastNames = {
    "Smith",    "Johnson", "Williams", "Brown",    "Jones",    "Garcia",  "Miller",  "Davis",
    "Rodriguez", "Martinez", "Hernandez", "Lopez", "Gonzalez", "Wilson",  "Anderson", "Thomas",
    "Taylor",   "Moore",   "Jackson",  "Martin",   "Lee",      "Perez",   "Thompson", "White",
    "Harris",   "Sanchez", "Clark",    "Ramirez",  "Lewis",    "Robinson", "Walker",  "Young"};

constexpr std::array<std::string_view, 16> kStreets = {
    "Maple", "Oak", "Cedar", "Pine", "Elm", "Willow", "Birch", "Walnut",
    "Chestnut", "Spruce", "Hickory", "Magnolia", "Sycamore", "Juniper", "Laurel", "Aspen"};

constexpr std::array<std::string_view, 6> kStreetSuffixes = {"Street", "Avenue", "Road",
                                                             "Lane",   "Drive",  "Court"};

struct City {
  std::string_view name;
  std::string_view state;
};

constexpr std::array<City, 12> kCities = {{{"Springfield", "IL"},
                                           {"Madison", "WI"},
                                           {"Columbus", "OH"},
                                           {"Portland", "OR"},
                                           {"Salem", "MA"},
                                           {"Franklin", "TN"},
                                           {"Greenville", "SC"},
                                           {"Fairview", "PA"},
                                           {"Cedar Rapids", "IA"},
                                           {"Ann Arbor", "MI"},
                                           {"Boulder", "CO"},
                                           {"Santa Fe", "NM"}}};

constexpr std::array<std::string_view, 8> kMailDomains = {
    "mailbox", "inbox", "post", "webmail", "netmail", "homemail", "fastmail", "postbox"};
constexpr std::array<std::string_view, 3> kTopLevel = {"com", "net", "org"};

struct Service {
  std::string_view description;
  std::string_view code;
  int cents;
};

constexpr std::array<Service, 12> kServices = {{
    {"Office visit, established patient", "99213", 14500},
    {"Office visit, new patient", "99203", 19800},
    {"Comprehensive metabolic panel", "80053", 4200},
    {"Complete blood count with differential", "85025", 2800},
    {"Lipid panel", "80061", 3600},
    {"Chest radiograph, two views", "71046", 11200},
    {"Electrocardiogram, routine", "93000", 6400},
    {"Influenza vaccine administration", "90686", 3900},
    {"Venipuncture", "36415", 1200},
    {"Hemoglobin A1c", "83036", 2600},
    {"Physical therapy evaluation", "97161", 16500},
    {"Urinalysis, automated", "81003", 900},
}};

// Lower-case only: remarks filler must never collide with a capitalized name
// or contain digits, '@' or anything a redaction pattern could match.
constexpr std::array<std::string_view, 24> kRemarkWords = {
    "please",  "retain",   "this",     "statement", "for",      "your",     "records",  "questions",
    "about",   "charges",  "may",      "be",        "directed", "to",       "the",      "billing",
    "office",  "during",   "business", "hours",     "balances", "remain",   "payable",  "upon"};

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

std::string digits(Rng& rng, int count) {
  std::string s;
  for (int i = 0; i < count; ++i) s.push_back(static_cast<char>('0' + rng.below(10)));
  return s;
}

std::string money(int cents) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "$%d.%02d", cents / 100, cents % 100);
  return buf;
}

const TemplateLayout& find_template(std::string_view id) {
  for (const auto& t : kTemplates) {
    if (t.id == id) return t;
  }
  throw ConfigError("unknown template: " + std::string(id));
}

}  // namespace

std::string random_value(PhiCategory c, Rng& rng) {
  switch (c) {
    case PhiCategory::Name:
      return std::string(rng.pick(kFirstNames)) + " " + std::string(rng.pick(kLastNames));
    case PhiCategory::DateOfBirth:
      return std::to_string(rng.between(1930, 2005)) + "-" + two_digits(rng.between(1, 12)) + "-" +
             two_digits(rng.between(1, 28));
    case PhiCategory::Address: {
      const City& city = rng.pick(kCities);
      return std::to_string(rng.between(100, 9899)) + " " + std::string(rng.pick(kStreets)) + " " +
             std::string(rng.pick(kStreetSuffixes)) + ", " + std::string(city.name) + ", " +
             std::string(city.state) + " " + std::to_string(rng.between(10000, 99999));
    }
    case PhiCategory::MRN:
      return "MRN-" + digits(rng, 8);
    case PhiCategory::SSN: {
      std::int64_t area = rng.between(1, 899);
      if (area == 666) area = 667;
      char buf[16];
      std::snprintf(buf, sizeof buf, "%03lld-%02lld-%04lld", static_cast<long long>(area),
                    static_cast<long long>(rng.between(1, 99)),
                    static_cast<long long>(rng.between(1, 9999)));
      return buf;
    }
    case PhiCategory::Email: {
      std::string local(rng.pick(kFirstNames).substr(0, 1));
      local += rng.pick(kLastNames);
      std::transform(local.begin(), local.end(), local.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      return local + "@" + std::string(rng.pick(kMailDomains)) + "." +
             std::string(rng.pick(kTopLevel));
    }
    case PhiCategory::Account:
      return "ACCT-" + std::to_string(rng.between(1, 9)) + digits(rng, 8);
  }
  return {};
}

namespace {

std::size_t rendered_length(const std::vector<TextElement>& elements) {
  std::size_t n = 0;
  for (const auto& e : elements) n += e.text.size();
  return n + (elements.empty() ? 0 : elements.size() - 1);
}

std::string remarks_of_length(std::size_t length, Rng& rng) {
  std::string s = "Remarks:";
  while (s.size() < length) {
    s += ' ';
    s += rng.pick(kRemarkWords);
  }
  s.resize(length);
  if (s.back() == ' ') s.back() = '.';
  return s;
}

}  // namespace

std::vector<std::string> template_ids() {
  std::vector<std::string> ids;
  for (const auto& t : kTemplates) ids.emplace_back(t.id);
  return ids;
}

Document generate_document(std::uint64_t seed, std::string_view template_id) {
  const TemplateLayout& layout = find_template(template_id);
  Rng rng(mix_seed(seed, hash_label("document")));

  Document doc;
  char idbuf[32];
  std::snprintf(idbuf, sizeof idbuf, "doc-%016llx", static_cast<unsigned long long>(seed));
  doc.id = idbuf;
  doc.page = kLetterPage300Dpi;
  doc.seed = seed;
  doc.template_id = std::string(template_id);

  auto add = [&](std::string text, Rect box) { doc.elements.push_back({std::move(text), box}); };

  add("RIVERSIDE COMMUNITY HEALTH SYSTEM", {1100, 60, 1300, 60});
  add("Patient Billing Statement", {1100, 140, 1000, 40});
  add("Statement Date: 2024-" + two_digits(rng.between(4, 6)) + "-" +
          two_digits(rng.between(1, 28)),
      {1100, 200, 800, 40});
  add("Billing Office, Harbor Plaza, Suite 210, Riverside", {1100, 260, 1300, 40});

  for (const auto& slot : kPhiBlock) {
    const Rect value_box = slot.value_box.translated(layout.dx, layout.dy);
    const Rect label_box = slot.label_box.translated(layout.dx, layout.dy);
    std::string value = random_value(slot.category, rng);
    add(std::string(slot.label), label_box);
    add(value, value_box);
    doc.annotations.push_back(
        {slot.category, value_box, std::move(value), std::string(slot.label), label_box});
  }

  add("Date of Service  Description  Code  Charges", {100, layout.services_top, 2300, 40});
  const int lines = static_cast<int>(rng.between(10, 13));
  int total = 0;
  for (int i = 0; i < lines; ++i) {
    const Service& s = rng.pick(kServices);
    total += s.cents;
    add("2024-" + two_digits(rng.between(1, 3)) + "-" + two_digits(rng.between(1, 28)) + "  " +
            std::string(s.description) + "  " + std::string(s.code) + "  " + money(s.cents),
        {100, layout.services_top + 60 * (i + 1), 2300, 40});
  }

  const int paid = total * static_cast<int>(rng.between(40, 80)) / 100;
  const int adjusted = total * static_cast<int>(rng.between(0, 15)) / 100;
  const int top = layout.summary_top;
  add("Total Charges: " + money(total), {1500, top, 900, 40});
  add("Insurance Payments: " + money(paid), {1500, top + 60, 900, 40});
  add("Adjustments: " + money(adjusted), {1500, top + 120, 900, 40});
  add("Amount Due: " + money(total - paid - adjusted), {1500, top + 180, 900, 40});
  add("Payment is due within thirty days of the statement date.", {100, top + 300, 2300, 40});
  add("Make checks payable to Riverside Community Health System.", {100, top + 360, 2300, 40});

  // Pad with a remarks paragraph so the unmasked transcript lands inside the
  // 1995..2078 character band observed for the real model.
  const std::size_t target = static_cast<std::size_t>(rng.between(1995, 2078));
  const std::size_t used = rendered_length(doc.elements) + 1;  // +1 joining newline
  if (used + 16 > target) throw Error("template body too long for " + doc.id);
  add(remarks_of_length(target - used, rng), {100, 3100, 2350, 120});
  return doc;
}

std::vector<Document> generate_corpus(std::size_t n, std::uint64_t corpus_seed,
                                      std::string_view template_id) {
  std::vector<Document> docs;
  docs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back(generate_document(corpus_document_seed(corpus_seed, i), template_id));
  }
  return docs;
}

}  // namespace phimask
