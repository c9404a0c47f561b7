#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "phimask/document.hpp"

namespace phimask {

/// One structured-identifier pattern and the token that replaces its matches.
struct RedactionRule {
  PhiCategory category = PhiCategory::MRN;
  std::string pattern;      // Perl-style regular expression
  std::string replacement;  // "[REDACTED-<CATEGORY>]"

  friend bool operator==(const RedactionRule&, const RedactionRule&) = default;
};

/// "[REDACTED-MRN]", "[REDACTED-ACCOUNT]", ...
std::string replacement_token(PhiCategory c);

struct RedactionHit {
  PhiCategory category = PhiCategory::MRN;
  std::size_t begin = 0;  // byte offsets into the input text
  std::size_t end = 0;
  std::size_t rule = 0;  // index into RuleSet::rules()

  friend bool operator==(const RedactionHit&, const RedactionHit&) = default;
};

/// Compiled, immutable rule list. Construction throws ConfigError when a
/// pattern does not compile, matches the empty string, or a replacement token
/// is itself matched by some rule (redaction would not be a fixpoint).
class RuleSet {
 public:
  explicit RuleSet(std::vector<RedactionRule> rules);
  ~RuleSet();
  RuleSet(const RuleSet&);
  RuleSet& operator=(const RuleSet&);

  /// MRN-\d+, \d{3}-\d{2}-\d{4}, \w+@\w+.\w+ (the dot is left unescaped), ACCT-\d+.
  static RuleSet defaults();

  const std::vector<RedactionRule>& rules() const noexcept { return rules_; }

  /// Leftmost-longest, non-overlapping matches over all rules. Ties on
  /// position and length go to the earlier rule.
  std::vector<RedactionHit> find(std::string_view text) const;

 private:
  struct Impl;
  std::vector<RedactionRule> rules_;
  std::shared_ptr<const Impl> impl_;
};

struct RedactionResult {
  std::string text;
  std::vector<RedactionHit> hits;  // applied replacements, spans in the input
  std::size_t candidates = 0;      // matches found before the accuracy draw
};

/// Replaces every match with its rule's token. With accuracy < 1 each match is
/// kept independently with probability `accuracy`, drawn in text order from a
/// generator seeded by `seed`. Throws ConfigError unless accuracy is in (0, 1].
RedactionResult redact(std::string_view text, const RuleSet& rules, double accuracy = 1.0,
                       std::uint64_t seed = 0);

/// Second half of redact(): applies precomputed matches. Lets repeated trials
/// over the same text skip the pattern search.
RedactionResult apply_redaction(std::string_view text, const RuleSet& rules,
                                const std::vector<RedactionHit>& candidates, double accuracy,
                                std::uint64_t seed);

/// Rules file: [{"category", "pattern", "replacement"?}]. A missing
/// replacement defaults to the category token.
RuleSet parse_rules(std::string_view json_text);
std::string rules_json(const RuleSet& rules);
RuleSet load_rules_file(const std::filesystem::path& path);

}  // namespace phimask
