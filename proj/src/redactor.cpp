#include "phimask/redactor.hpp"

#include <boost/regex.hpp>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "phimask/error.hpp"
#include "phimask/rng.hpp"

namespace phimask {

namespace {

// match_posix gives leftmost-longest alternation semantics; '.' never spans a
// line break, so a match cannot join two transcript lines.
const auto kMatchFlags = boost::match_posix | boost::match_not_dot_newline;

void check_accuracy(double accuracy) {
  if (!(accuracy > 0.0 && accuracy <= 1.0)) {
    throw ConfigError("redaction accuracy must be in (0, 1], got " + std::to_string(accuracy));
  }
}

}  // namespace

struct RuleSet::Impl {
  std::vector<boost::regex> compiled;
};

std::string replacement_token(PhiCategory c) {
  std::string name;
  switch (c) {
    case PhiCategory::DateOfBirth:
      name = "DOB";
      break;
    default:
      for (char ch : to_string(c)) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return "[REDACTED-" + name + "]";
}

RuleSet::RuleSet(std::vector<RedactionRule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw ConfigError("rule set is empty");
  auto impl = std::make_shared<Impl>();
  for (const auto& r : rules_) {
    try {
      impl->compiled.emplace_back(r.pattern, boost::regex::perl);
    } catch (const boost::regex_error& e) {
      throw ConfigError("pattern '" + r.pattern + "' does not compile: " + e.what());
    }
    if (boost::regex_match(std::string(), impl->compiled.back())) {
      throw ConfigError("pattern '" + r.pattern + "' matches the empty string");
    }
    if (r.replacement.empty()) throw ConfigError("empty replacement for '" + r.pattern + "'");
  }
  for (const auto& r : rules_) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (boost::regex_search(r.replacement, impl->compiled[i], kMatchFlags)) {
        throw ConfigError("replacement '" + r.replacement + "' matches pattern '" +
                          rules_[i].pattern + "'");
      }
    }
  }
  impl_ = std::move(impl);
}

RuleSet::~RuleSet() = default;
RuleSet::RuleSet(const RuleSet&) = default;
RuleSet& RuleSet::operator=(const RuleSet&) = default;

RuleSet RuleSet::defaults() {
  return RuleSet({
      {PhiCategory::MRN, R"(MRN-\d+)", replacement_token(PhiCategory::MRN)},
      {PhiCategory::SSN, R"(\d{3}-\d{2}-\d{4})", replacement_token(PhiCategory::SSN)},
      {PhiCategory::Email, R"(\w+@\w+.\w+)", replacement_token(PhiCategory::Email)},
      {PhiCategory::Account, R"(ACCT-\d+)", replacement_token(PhiCategory::Account)},
  });
}

std::vector<RedactionHit> RuleSet::find(std::string_view text) const {
  using It = std::string_view::const_iterator;
  struct Next {
    bool valid = false;  // cached result is usable
    bool found = false;
    std::size_t begin = 0, end = 0;
  };
  std::vector<Next> next(rules_.size());
  std::vector<RedactionHit> hits;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t best = rules_.size();
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      Next& n = next[i];
      if (!n.valid || (n.found && n.begin < pos)) {
        boost::match_results<It> m;
        const auto flags = pos > 0 ? kMatchFlags | boost::match_prev_avail : kMatchFlags;
        n.valid = true;
        n.found = boost::regex_search(text.begin() + static_cast<std::ptrdiff_t>(pos), text.end(), m,
                                      impl_->compiled[i], flags);
        if (n.found) {
          n.begin = pos + static_cast<std::size_t>(m.position(std::size_t{0}));
          n.end = n.begin + static_cast<std::size_t>(m.length(std::size_t{0}));
        }
      }
      if (!n.found) continue;
      if (best == rules_.size() || n.begin < next[best].begin ||
          (n.begin == next[best].begin && n.end > next[best].end)) {
        best = i;
      }
    }
    if (best == rules_.size()) break;
    hits.push_back({rules_[best].category, next[best].begin, next[best].end, best});
    pos = next[best].end;
  }
  return hits;
}

RedactionResult apply_redaction(std::string_view text, const RuleSet& rules,
                                const std::vector<RedactionHit>& candidates, double accuracy,
                                std::uint64_t seed) {
  check_accuracy(accuracy);
  RedactionResult out;
  out.candidates = candidates.size();
  Rng rng(seed);
  std::size_t pos = 0;
  for (const auto& hit : candidates) {
    if (hit.begin < pos || hit.end > text.size() || hit.begin >= hit.end) {
      throw Error("redaction candidates overlap or fall outside the text");
    }
    const bool keep = accuracy >= 1.0 || rng.unit() < accuracy;
    if (!keep) continue;
    if (hit.rule >= rules.rules().size()) throw Error("redaction candidate names an unknown rule");
    out.text.append(text.substr(pos, hit.begin - pos));
    out.text += rules.rules()[hit.rule].replacement;
    out.hits.push_back(hit);
    pos = hit.end;
  }
  out.text.append(text.substr(pos));
  return out;
}

RedactionResult redact(std::string_view text, const RuleSet& rules, double accuracy,
                       std::uint64_t seed) {
  check_accuracy(accuracy);
  return apply_redaction(text, rules, rules.find(text), accuracy, seed);
}

RuleSet parse_rules(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("rules file is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("rules")) j = j.at("rules");
  if (!j.is_array()) throw ConfigError("rules file must hold an array of rules");
  std::vector<RedactionRule> rules;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("category") || !item.contains("pattern")) {
      throw ConfigError("each rule needs a category and a pattern");
    }
    const auto name = item.at("category").get<std::string>();
    const auto category = parse_category(name);
    if (!category) throw ConfigError("unknown category in rules file: " + name);
    RedactionRule r{*category, item.at("pattern").get<std::string>(),
                    item.value("replacement", replacement_token(*category))};
    rules.push_back(std::move(r));
  }
  return RuleSet(std::move(rules));
}

std::string rules_json(const RuleSet& rules) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rules.rules()) {
    j.push_back({{"category", std::string(to_string(r.category))},
                 {"pattern", r.pattern},
                 {"replacement", r.replacement}});
  }
  return j.dump(2) + "\n";
}

RuleSet load_rules_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read rules file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str());
}

}  // namespace phimask
