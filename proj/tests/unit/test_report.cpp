#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "phimask/error.hpp"
#include "phimask/report.hpp"
#include "phimask/runner.hpp"

using namespace phimask;

namespace {

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("percent formatting") {
  CHECK(format_percent(300.0 / 7) == "42.9");
  CHECK(format_percent(620.0 / 7) == "88.6");
  CHECK(format_percent(100.0 / 7) == "14.3");
  CHECK(format_percent(100.0) == "100.0");
  CHECK(format_percent(0.0) == "0.0");
}

TEST_CASE("empty reports render headers only") {
  CHECK(lines(strategy_table({})) == 2);
  CHECK(lines(ablation_table({})) == 2);
  CHECK(results_json({}) == "[]\n");
  CHECK(parse_results("[]").empty());
}

TEST_CASE("tables and results") {
  const auto docs = generate_corpus(4, 3);
  SurrogateBackend backend;
  const auto runs = run_sweep(docs, backend, {});
  std::vector<StrategyReport> reports;
  for (const auto& r : runs) reports.push_back(r.report);

  const auto table = strategy_table(reports);
  CHECK(lines(table) == 16);
  CHECK(table.find("V3-r1     1       33.7% (SAM)") != std::string::npos);
  CHECK(table.find("Degraded") != std::string::npos);
  CHECK(lines(ablation_table(reports)) == 11);
  CHECK(lines(category_table(reports)) == 16);

  const auto json = results_json(reports);
  CHECK(parse_results(json) == reports);
  CHECK(results_json(parse_results(json)) == json);
  const auto j = nlohmann::json::parse(json);
  REQUIRE(j.size() == 14);
  for (const char* key : {"strategy_id", "radius", "coverage_by_hook", "reduction", "per_category", "degraded"}) {
    CHECK(j[0].contains(key));
  }
  CHECK(j[3]["degraded"] == true);
  CHECK(j[0]["degraded"] == false);
  CHECK_THROWS_AS(parse_results("[{\"strategy_id\": \"V3\"}]"), Error);
  CHECK_THROWS_AS(parse_results("[{\"strategy_id\": \"X\"}]"), Error);
}

TEST_CASE("audit log") {
  const auto docs = generate_corpus(3, 3);
  SurrogateBackend backend;
  HybridOptions h;
  h.accuracy = 1.0;
  const auto run = run_hybrid(docs, preset("V3-r1"), backend, h, {});
  std::size_t seq = 10;
  const auto log = audit_log(docs, run.stage1, &run.stage2, seq);
  CHECK(seq == 13);
  std::istringstream in(log);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto rec = nlohmann::json::parse(line);
    CHECK(rec["seq"] == 10 + n);
    CHECK(rec["doc_id"] == docs[n].id);
    CHECK(rec["masked_bboxes"].size() == 7);
    CHECK(rec["hooks"][0]["hook_point"] == "sam_block_11");
    CHECK(rec["redaction_hits"].size() == 4);
    // No PHI values in the log.
    for (const auto& a : docs[n].annotations) CHECK(line.find(a.value) == std::string::npos);
    ++n;
  }
  CHECK(n == 3);
  std::size_t s2 = 10;
  CHECK(audit_log(docs, run.stage1, &run.stage2, s2) == log);
  std::size_t s3 = 0;
  CHECK(audit_log(docs, run.stage1, nullptr, s3).find("redaction_hits") == std::string::npos);
}

TEST_CASE("cascade rendering") {
  const auto docs = generate_corpus(2, 1);
  SurrogateBackend backend;
  HybridOptions h;
  h.accuracy = 1.0;
  const auto run = run_hybrid(docs, preset("V3-r1"), backend, h, {});
  const auto t = cascade_table(run);
  CHECK(t.find("0/14") != std::string::npos);
  CHECK(t.find("100.0%") != std::string::npos);
  const auto j = nlohmann::json::parse(hybrid_json(run));
  CHECK(j["cascade"].size() == 3);
  CHECK(j["cascade"][2]["remaining"] == 0);
  CHECK_FALSE(j.contains("monte_carlo_cumulative"));
}
