#include <doctest.h>

#include "phimask/error.hpp"
#include "phimask/report.hpp"
#include "phimask/runner.hpp"

using namespace phimask;

TEST_CASE("run_strategy") {
  const auto docs = generate_corpus(6, 2);
  SurrogateBackend backend;
  const auto run = run_strategy(docs, preset("V3-r1"), backend, {});
  CHECK(run.documents.size() == 6);
  CHECK(run.report.leaked == 24);
  CHECK(run.report.reduction() == doctest::Approx(300.0 / 7));

  const auto base = run_strategy(docs, preset("baseline"), backend, {});
  CHECK(base.report.reduction() == 0.0);

  CHECK_THROWS_AS(run_strategy({}, preset("V3-r1"), backend, {}), ConfigError);
  auto bad = preset("V3-r1");
  bad.hooks.clear();
  CHECK_THROWS_AS(run_strategy(docs, bad, backend, {}), ConfigError);
}

TEST_CASE("threads do not change results") {
  const auto docs = generate_corpus(9, 5, kMultiTileTemplate);
  SurrogateBackend backend;
  RunOptions one{3, 1, {}};
  RunOptions four{3, 4, {}};
  const auto a = run_strategy(docs, preset("V8-r1-1"), backend, one);
  const auto b = run_strategy(docs, preset("V8-r1-1"), backend, four);
  CHECK(a.report == b.report);
  for (std::size_t i = 0; i < docs.size(); ++i) CHECK(a.documents[i].output == b.documents[i].output);
}

TEST_CASE("sweep is the union of single runs") {
  const auto docs = generate_corpus(3, 8);
  SurrogateBackend backend;
  const auto rows = run_sweep(docs, backend, {});
  REQUIRE(rows.size() == 14);
  for (const auto& r : rows) {
    CHECK(r.report == run_strategy(docs, r.strategy, backend, {}).report);
  }
}

TEST_CASE("hybrid") {
  const auto docs = generate_corpus(10, 4);
  SurrogateBackend backend;
  HybridOptions h;
  h.accuracy = 1.0;
  const auto perfect = run_hybrid(docs, preset("V3-r1"), backend, h, {});
  CHECK(perfect.cascade.back().remaining == 0);
  CHECK(perfect.expected_cumulative == doctest::Approx(100.0));

  h.accuracy = 0.8;
  h.mc_trials = 2000;
  const auto partial = run_hybrid(docs, preset("V3-r1"), backend, h, {});
  CHECK(partial.expected_cumulative == doctest::Approx(620.0 / 7));
  REQUIRE(partial.monte_carlo_cumulative.has_value());
  CHECK(*partial.monte_carlo_cumulative == doctest::Approx(620.0 / 7).epsilon(0.015));

  h.accuracy = 0.0;
  CHECK_THROWS_AS(run_hybrid(docs, preset("V3-r1"), backend, h, {}), ConfigError);
  CHECK_THROWS_AS(monte_carlo_cumulative(docs, perfect.stage1, RuleSet::defaults(), 0.8, 0, 1), ConfigError);
}
