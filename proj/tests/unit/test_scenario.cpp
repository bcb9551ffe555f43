#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "resim/asyncsim.hpp"
#include "resim/errors.hpp"
#include "resim/metrics.hpp"
#include "resim/msr.hpp"
#include "resim/report.hpp"
#include "resim/scenario.hpp"
#include "resim/sweep.hpp"
#include "test_support.hpp"

using namespace resim;
using nlohmann::json;

TEST_SUITE("scenario") {

TEST_CASE("presets validate and serialize through json unchanged") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    Scenario sc = make_preset(name);
    validate_scenario(sc);

    Scenario back = scenario_from_json(scenario_to_json(sc));
    CHECK(back.name == sc.name);
    CHECK(back.mode == sc.mode);
    CHECK(back.params.T == sc.params.T);
    CHECK(back.params.f == sc.params.f);
    CHECK(back.x0 == sc.x0);
    CHECK(back.v0 == sc.v0);
    CHECK(back.adversary.malicious == sc.adversary.malicious);
    CHECK(back.tau == sc.tau);
    CHECK(back.horizon == sc.horizon);
    CHECK(back.graph.edge_count() == sc.graph.edge_count());
    for (int i = 0; i < sc.graph.n(); ++i)
      for (const auto& [j, w] : sc.graph.in_edges(i)) CHECK(back.graph.weight(j, i) == w);

    // a round-tripped scenario replays to the identical trace
    if (sc.horizon > 400) {
      sc.horizon = back.horizon = 120;
    }
    Trace a = sc.mode == Mode::Sync ? run_sync(sc) : run_async(sc);
    Trace b = back.mode == Mode::Sync ? run_sync(back) : run_async(back);
    CHECK(trace_csv_string(a) == trace_csv_string(b));
  }
  CHECK_THROWS_AS(make_preset("nope"), ValidationError);
}

TEST_CASE("scenario file loading and graph edits") {
  const auto dir = std::filesystem::temp_directory_path() / "resim-test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "scn.json";
  {
    std::ofstream out(path);
    out << R"({
      "schema_version": 1,
      "name": "file-test",
      "mode": "sync",
      "params": {"T": 0.3, "alpha": 3.67, "f": 1},
      "graph": {"generator": "example5"},
      "graph_edits": {"remove_edges": [[2, 5]]},
      "initial": {"positions": [10, 4, 2.5, 1, 8], "velocities": [0, -6, -5, 1, 4]},
      "adversary": {"kind": "f-total", "f": 1, "malicious": [1],
                    "strategies": {"1": {"type": "hold", "position": 10.0}}},
      "horizon": 50
    })";
  }
  Scenario sc = load_scenario(path.string());
  CHECK(sc.params.n == 5);
  CHECK_FALSE(sc.graph.has_edge(1, 4));  // (2,5) removed
  CHECK(sc.adversary.malicious == std::vector<int>{0});
  validate_scenario(sc);
  Trace t = run_sync(sc);
  CHECK(t.steps.size() == 51);
}

TEST_CASE("validation failures") {
  Scenario sc = make_preset("fig5-sync-dpmsr");

  SUBCASE("parameter window") {
    sc.params.alpha = 1.0;
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("shape mismatch") {
    sc.x0.pop_back();
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("non-finite data") {
    sc.v0[2] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("model bound violated") {
    sc.adversary.malicious = {0, 1};
    sc.strategies[1] = sc.strategies[0];
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("missing strategy") {
    sc.strategies.clear();
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("strategy for a normal agent warns") {
    sc.strategies[2] = StrategySpec{.type = "hold", .position = 1.0};
    auto check = validate_scenario(sc);
    CHECK_FALSE(check.warnings.empty());
  }
}

TEST_CASE("async validation failures") {
  Scenario sc = make_preset("fig6-async-robust-fail");
  SUBCASE("history longer than tau") {
    sc.history.assign(sc.tau + 1, std::vector<double>(5, 1.0));
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("update table must cover the horizon") {
    UpdateRule r;
    r.kind = UpdateRule::Kind::Table;
    r.table.assign(10, 1);  // horizon is 5000
    sc.updates.per_agent[0] = r;
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("delay rule must stay within tau") {
    DelayRule r;
    r.kind = DelayRule::Kind::Parity;
    r.even = 0;
    r.odd = sc.tau + 1;
    sc.delays.per_edge[{0, 1}] = r;
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
}

TEST_CASE("trace csv writes 17 significant digits and reads back bit-exact") {
  testsup::Rng rng(71);
  Scenario sc = testsup::random_scenario(rng, false, 5, 40);
  Trace t = run_sync(sc);
  const std::string csv = trace_csv_string(t);
  std::istringstream in(csv);
  Trace back = read_trace_csv(in);
  REQUIRE(back.steps.size() == t.steps.size());
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    for (int i = 0; i < t.n; ++i) {
      CHECK(back.steps[k].positions[i] == t.steps[k].positions[i]);
      CHECK(back.steps[k].velocities[i] == t.steps[k].velocities[i]);
    }
  }
  std::istringstream bad("not,a,trace\n");
  CHECK_THROWS_AS(read_trace_csv(bad), ValidationError);
}

TEST_CASE("a re-ingested trace yields the same report verdicts") {
  Scenario sc = make_preset("fig5-sync-dpmsr");
  sc.horizon = 600;
  Trace t = run_sync(sc);
  RunReport live = analyze_run(sc, t);

  std::istringstream in(trace_csv_string(t));
  Trace back = read_trace_csv(in);
  back.malicious = t.malicious;

  const auto normal = sc.normal_set();
  auto iv = safety_interval_sync(sc.initial_state(), sc.params, normal);
  CHECK(iv.lo == live.interval.lo);
  CHECK(iv.hi == live.interval.hi);
  CHECK(check_safety(back, iv, normal).ok == live.safety.ok);
  auto verdict = check_consensus(back, normal, 1e-6, 50);
  CHECK(verdict.achieved == live.consensus.achieved);
  CHECK(verdict.final_spread == live.consensus.final_spread);
  auto rate = rate_estimate(back, normal);
  CHECK(rate.slope == live.rate.slope);
}

TEST_CASE("deterministic outputs: same scenario, same bytes") {
  Scenario sc = make_preset("fig6-async-robust-fail");
  sc.horizon = 300;
  CHECK(trace_csv_string(run_async(sc)) == trace_csv_string(run_async(sc)));
}

TEST_CASE("sweep over filter bound and graph variants") {
  json templ = scenario_to_json(make_preset("fig5-sync-dpmsr"));
  templ["horizon"] = 1500;

  std::vector<SweepAxis> axes;
  axes.push_back({"/params/f", {json(0), json(1)}});
  axes.push_back({"/graph", {json{{"generator", "example5"}},
                             json{{"generator", "complete"}, {"n", 5}}}});
  axes.push_back({"/graph_edits", {json::object(), json{{"remove_edges", {{2, 5}}}}}});

  SweepResult result = run_sweep(templ, axes);
  REQUIRE(result.rows.size() == 8);
  CHECK(result.failures == 0);

  auto row = [&](int f, int graph, int edit) -> const SweepRow& {
    return result.rows[static_cast<std::size_t>(f * 4 + graph * 2 + edit)];
  };
  // unfiltered runs follow the pinned agent out of the safety interval
  CHECK_FALSE(row(0, 0, 0).safety);
  CHECK_FALSE(row(0, 1, 0).safety);
  // filtering on the robust graphs keeps both properties
  CHECK(row(1, 0, 0).consensus);
  CHECK(row(1, 0, 0).safety);
  CHECK(row(1, 1, 0).consensus);
  CHECK(row(1, 1, 0).safety);
  // removing (2,5) breaks consensus on the example graph but not on K5
  CHECK_FALSE(row(1, 0, 1).consensus);
  CHECK(row(1, 1, 1).consensus);

  const std::string csv = result.to_csv();
  CHECK(csv.find("/params/f") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("sweep over the delay bound on the complete graph keeps consensus") {
  json templ = scenario_to_json(make_preset("fig7-async-complete"));
  templ["horizon"] = 3000;
  SweepResult result = run_sweep(templ, {{"/async/tau", {json(0), json(11)}}});
  REQUIRE(result.rows.size() == 2);
  CHECK(result.failures == 0);
  CHECK(result.rows[0].consensus);
  CHECK(result.rows[1].consensus);
}

TEST_CASE("synchronous reports carry the realized minimum matrix entry") {
  Scenario sc = make_preset("fig5-sync-dpmsr");
  sc.horizon = 200;
  Trace t = run_sync(sc);
  RunReport r = analyze_run(sc, t);
  REQUIRE(r.realized_beta.has_value());
  CHECK(*r.realized_beta > 0.0);
  CHECK(*r.realized_beta < 1.0);
}

TEST_CASE("empty grid produces an empty table") {
  json templ = scenario_to_json(make_preset("fig5-sync-dpmsr"));
  SweepResult result = run_sweep(templ, {});
  CHECK(result.rows.empty());
  SweepResult with_empty_axis = run_sweep(templ, {{"/params/f", {}}});
  CHECK(with_empty_axis.rows.empty());
}

TEST_CASE("sweep records individual failures and continues") {
  json templ = scenario_to_json(make_preset("fig5-sync-dpmsr"));
  templ["horizon"] = 40;
  std::vector<SweepAxis> axes;
  axes.push_back({"/params/alpha", {json(3.67), json(0.5)}});  // 0.5 violates the window
  SweepResult result = run_sweep(templ, axes);
  REQUIRE(result.rows.size() == 2);
  CHECK_FALSE(result.rows[0].failed);
  CHECK(result.rows[1].failed);
  CHECK(result.failures == 1);
}

}  // TEST_SUITE
