#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "phimask/error.hpp"
#include "phimask/redactor.hpp"
#include "phimask/rng.hpp"

using namespace phimask;

TEST_CASE("tokens") {
  CHECK(replacement_token(PhiCategory::MRN) == "[REDACTED-MRN]");
  CHECK(replacement_token(PhiCategory::Account) == "[REDACTED-ACCOUNT]");
  CHECK(replacement_token(PhiCategory::Email) == "[REDACTED-EMAIL]");
}

TEST_CASE("default rules") {
  const auto rules = RuleSet::defaults();
  REQUIRE(rules.rules().size() == 4);
  CHECK(rules.rules()[0].pattern == R"(MRN-\d+)");
  CHECK(rules.rules()[2].pattern == R"(\w+@\w+.\w+)");

  const auto r = redact("SSN: 123-45-6789", rules);
  CHECK(r.text == "SSN: [REDACTED-SSN]");
  REQUIRE(r.hits.size() == 1);
  CHECK(r.hits[0] == RedactionHit{PhiCategory::SSN, 5, 16, 1});

  const auto none = redact("nothing to see here", rules);
  CHECK(none.text == "nothing to see here");
  CHECK(none.hits.empty());
  CHECK(none.candidates == 0);

  CHECK(redact("MRN-48136349 and ACCT-1 x@y.z", rules).text ==
        "[REDACTED-MRN] and [REDACTED-ACCOUNT] [REDACTED-EMAIL]");
}

TEST_CASE("the email dot matches any character but not a line break") {
  const auto rules = RuleSet::defaults();
  CHECK(redact("a@b-c", rules).text == "[REDACTED-EMAIL]");
  CHECK(redact("a@b\nc", rules).text == "a@b\nc");
}

TEST_CASE("leftmost-longest across rules") {
  const RuleSet rules({{PhiCategory::MRN, "ab", "[X]"}, {PhiCategory::SSN, "abc", "[Y]"},
                       {PhiCategory::Email, "b+", "[Z]"}});
  CHECK(redact("abcd", rules).text == "[Y]d");
  CHECK(redact("xbbb ab", rules).text == "x[Z] [X]");
  // Equal span: earlier rule wins.
  const RuleSet tie({{PhiCategory::MRN, "q1", "[A]"}, {PhiCategory::SSN, "q\\d", "[B]"}});
  CHECK(redact("q1", tie).text == "[A]");
}

TEST_CASE("rule set validation") {
  CHECK_THROWS_AS(RuleSet({{PhiCategory::MRN, "(", "[X]"}}), ConfigError);
  CHECK_THROWS_AS(RuleSet({{PhiCategory::MRN, "a*", "[X]"}}), ConfigError);
  CHECK_THROWS_AS(RuleSet({{PhiCategory::MRN, R"(\[R)", "[REDACTED-MRN]"}}), ConfigError);
  CHECK_THROWS_AS(RuleSet({{PhiCategory::MRN, "x", ""}}), ConfigError);
  CHECK_THROWS_AS(RuleSet(std::vector<RedactionRule>{}), ConfigError);
}

TEST_CASE("accuracy bounds") {
  const auto rules = RuleSet::defaults();
  CHECK_THROWS_AS(redact("x", rules, 0.0), ConfigError);
  CHECK_THROWS_AS(redact("x", rules, 1.2), ConfigError);
  CHECK_THROWS_AS(redact("x", rules, -0.5), ConfigError);
  CHECK_NOTHROW(redact("x", rules, 1e-9));
}

TEST_CASE("fixpoint on random text") {
  const auto rules = RuleSet::defaults();
  const std::string alphabet = "aZ09-@. \n_MRNACT";
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto n = rng.between(0, 60);
    for (int k = 0; k < n; ++k) s += alphabet[rng.below(alphabet.size())];
    if (rng.below(2)) s += " MRN-" + std::to_string(rng.below(100000)) + " ";
    if (rng.below(2)) s += "ab@cd.ef";
    const auto once = redact(s, rules).text;
    INFO(s);
    REQUIRE(redact(once, rules).text == once);
    REQUIRE(redact(once, rules).hits.empty());
  }
}

TEST_CASE("partial accuracy is a seeded Bernoulli draw") {
  const auto rules = RuleSet::defaults();
  const std::string text = "MRN-12345678\n123-45-6789\njdoe@mail.com\nACCT-123456789";
  const auto a = redact(text, rules, 0.8, 9);
  CHECK(a.text == redact(text, rules, 0.8, 9).text);
  CHECK(a.candidates == 4);
  CHECK(a.hits.size() <= a.candidates);
  CHECK(redact(text, rules, 1.0, 9).hits.size() == 4);

  // Oracle: the mean count kept is 4 * accuracy.
  double sum = 0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) sum += static_cast<double>(redact(text, rules, 0.8, mix_seed(1, s)).hits.size());
  CHECK(sum / trials == doctest::Approx(3.2).epsilon(0.05 / 3.2));

  const auto plan = rules.find(text);
  CHECK(apply_redaction(text, rules, plan, 0.8, 9).text == a.text);
}

TEST_CASE("apply_redaction rejects bad plans") {
  const auto rules = RuleSet::defaults();
  CHECK_THROWS_AS(apply_redaction("abc", rules, {{PhiCategory::MRN, 1, 9, 0}}, 1.0, 0), Error);
  CHECK_THROWS_AS(apply_redaction("abcdef", rules, {{PhiCategory::MRN, 0, 3, 0}, {PhiCategory::MRN, 2, 4, 0}}, 1.0, 0),
                  Error);
  CHECK_THROWS_AS(apply_redaction("abc", rules, {{PhiCategory::MRN, 0, 1, 7}}, 1.0, 0), Error);
}

TEST_CASE("rules files") {
  const auto rules = RuleSet::defaults();
  CHECK(parse_rules(rules_json(rules)).rules() == rules.rules());
  const auto custom = parse_rules(R"([{"category": "mrn", "pattern": "PT-\\d+"}])");
  CHECK(custom.rules()[0].replacement == "[REDACTED-MRN]");
  CHECK(redact("id PT-77", custom).text == "id [REDACTED-MRN]");
  CHECK_THROWS_AS(parse_rules(R"([{"category": "phone", "pattern": "x"}])"), ConfigError);
  CHECK_THROWS_AS(parse_rules(R"({"x": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_rules("nope"), ConfigError);
  CHECK_THROWS_AS(load_rules_file("/nonexistent/rules.json"), IoError);

  const auto path = std::filesystem::temp_directory_path() / "phimask_rules.json";
  std::ofstream(path) << rules_json(rules);
  CHECK(load_rules_file(path).rules() == rules.rules());
  std::filesystem::remove(path);
}
