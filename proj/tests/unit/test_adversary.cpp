#include <doctest.h>

#include <cmath>

#include "resim/adversary.hpp"
#include "resim/errors.hpp"
#include "resim/msr.hpp"
#include "test_support.hpp"

using namespace resim;

namespace {

// Drives a single agent under a strategy through the real step map.
std::vector<std::pair<double, double>> simulate_strategy(const Strategy& strat, double x0,
                                                         double v0, const SimParams& p,
                                                         long steps) {
  Trace t;
  t.n = 1;
  StepRecord rec;
  rec.k = 0;
  rec.positions = {x0};
  rec.velocities = {v0};
  t.steps.push_back(rec);

  std::vector<std::pair<double, double>> out{{x0, v0}};
  NetworkState s = NetworkState::make({x0}, {v0});
  for (long k = 0; k < steps; ++k) {
    StrategyContext ctx{t, nullptr, nullptr, p, k, 0};
    const double u = strat(ctx);
    s = step_state(s, {{u}}, p);
    StepRecord next;
    next.k = k + 1;
    next.positions = s.positions;
    next.velocities = s.velocities;
    t.steps.push_back(next);
    out.emplace_back(s.positions[0], s.velocities[0]);
  }
  return out;
}

}  // namespace

TEST_SUITE("adversary") {

TEST_CASE("model validation") {
  Digraph k5 = build_complete(5);
  CHECK(validate_model(k5, {AdversaryKind::FTotal, 1, {0}}));
  CHECK_FALSE(validate_model(k5, {AdversaryKind::FTotal, 1, {0, 1}}));
  // on the complete graph every normal agent neighbors both malicious ones
  CHECK_FALSE(validate_model(k5, {AdversaryKind::FLocal, 1, {0, 1}}));

  Digraph ring = testsup::ring_graph(6);
  CHECK(validate_model(ring, {AdversaryKind::FLocal, 1, {0, 3}}));
  CHECK_FALSE(validate_model(ring, {AdversaryKind::FLocal, 1, {0, 2}}));  // agent 2 hears both

  CHECK_THROWS_AS(validate_model(k5, {AdversaryKind::FTotal, 1, {7}}), std::invalid_argument);
}

TEST_CASE("f-total validity is monotone under shrinking the set") {
  Digraph g = build_complete(4);
  AdversaryModel m{AdversaryKind::FTotal, 2, {1, 3}};
  REQUIRE(validate_model(g, m));
  CHECK(validate_model(g, {AdversaryKind::FTotal, 2, {1}}));
  CHECK(validate_model(g, {AdversaryKind::FTotal, 2, {3}}));
  CHECK(validate_model(g, {AdversaryKind::FTotal, 2, {}}));
}

TEST_CASE("hold from rest is the zero control") {
  SimParams p{0.3, 3.67, 1, 0};
  auto traj = simulate_strategy(strategy_hold(10.0), 10.0, 0.0, p, 20);
  for (const auto& [x, v] : traj) {
    CHECK(x == 10.0);
    CHECK(v == 0.0);
  }
}

TEST_CASE("hold from a moving start pins the position and stops within two steps") {
  SimParams p{0.3, 3.67, 1, 0};
  auto traj = simulate_strategy(strategy_hold(10.0), 10.0, 2.0, p, 30);
  // one bounded excursion of T v / 4, then back on the spot at rest
  CHECK(traj[1].first == doctest::Approx(10.0 + 0.3 * 2.0 / 4.0));
  CHECK(traj[2].first == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(traj[2].second == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t k = 2; k < traj.size(); ++k) {
    CHECK(traj[k].first == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(traj[k].second) < 1e-9);
  }
}

TEST_CASE("the stock oscillator input reproduces the two-point orbit") {
  // u[k] = ((-1)^k / T^2) (-40 T + 14 (2k+1)) from (2, 20) with T = 0.3
  const double t = 0.3;
  SimParams p{t, 3.67, 1, 0};
  std::map<long, ScriptEntry> table;
  for (long k = 0; k <= 60; ++k) {
    ScriptEntry e;
    e.kind = ScriptEntry::Kind::RawU;
    e.value = (std::pow(-1.0, static_cast<double>(k)) / (t * t)) *
              (-40.0 * t + 14.0 * (2.0 * static_cast<double>(k) + 1.0));
    table[k] = e;
  }
  auto traj = simulate_strategy(strategy_scripted(table), 2.0, 20.0, p, 50);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double want = (k % 2 == 0) ? 2.0 : 9.0;
    CHECK(traj[k].first == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("generalized oscillator hits the endpoints with the right parity") {
  testsup::Rng rng(5);
  SimParams p = testsup::random_params(rng, 1, 0);
  auto traj = simulate_strategy(strategy_oscillate(2.0, 9.0), 9.0, 4.0, p, 100);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double want = (k % 2 == 0) ? 2.0 : 9.0;
    CHECK(std::abs(traj[k].first - want) < 1e-9);
  }

  auto flat = simulate_strategy(strategy_oscillate(5.0, 5.0), 1.0, 0.0, p, 10);
  for (std::size_t k = 1; k < flat.size(); ++k) CHECK(std::abs(flat[k].first - 5.0) < 1e-9);
}

TEST_CASE("scripted strategies") {
  SimParams p{0.3, 3.67, 1, 0};

  std::map<long, ScriptEntry> zeros;
  for (long k = 0; k < 10; ++k) zeros[k] = ScriptEntry{ScriptEntry::Kind::RawU, 0.0};
  auto still = simulate_strategy(strategy_scripted(zeros), 3.0, 0.0, p, 10);
  for (const auto& [x, v] : still) CHECK(x == 3.0);

  std::map<long, ScriptEntry> targets;
  for (long k = 0; k < 40; ++k)
    targets[k] = ScriptEntry{ScriptEntry::Kind::Target, (k + 1) % 2 == 0 ? 1.0 : 9.0};
  auto scripted = simulate_strategy(strategy_scripted(targets), 1.0, 0.0, p, 40);
  auto oscillated = simulate_strategy(strategy_oscillate(1.0, 9.0), 1.0, 0.0, p, 40);
  for (std::size_t k = 0; k < scripted.size(); ++k) {
    CHECK(scripted[k].first == oscillated[k].first);
    CHECK(scripted[k].second == oscillated[k].second);
  }

  std::map<long, ScriptEntry> hold_like;
  for (long k = 0; k < 10; ++k) hold_like[k] = ScriptEntry{ScriptEntry::Kind::Target, 10.0};
  auto held = simulate_strategy(strategy_scripted(hold_like), 10.0, 0.0, p, 10);
  auto held_ref = simulate_strategy(strategy_hold(10.0), 10.0, 0.0, p, 10);
  for (std::size_t k = 0; k < held.size(); ++k) CHECK(held[k].first == held_ref[k].first);

  CHECK_THROWS_AS(simulate_strategy(strategy_scripted({}), 0.0, 0.0, p, 1), ScheduleError);
  CHECK_THROWS_AS(make_strategy(StrategySpec{.type = "nonsense"}), ValidationError);
}

TEST_CASE("strategies are pure functions of their context") {
  testsup::Rng rng(6);
  SimParams p = testsup::random_params(rng, 1, 0);
  Trace t;
  t.n = 1;
  StepRecord rec;
  rec.k = 0;
  rec.positions = {4.0};
  rec.velocities = {-1.0};
  t.steps.push_back(rec);
  StrategyContext ctx{t, nullptr, nullptr, p, 0, 0};
  auto s = strategy_oscillate(1.0, 2.0);
  CHECK(s(ctx) == s(ctx));
}

TEST_CASE("a perturbed malicious input does not enter the next normal positions") {
  // two runs identical through step H-1, differing only in the malicious
  // input applied at the final step
  auto build = [&](double last_u) {
    Scenario sc;
    sc.mode = Mode::Sync;
    sc.params = {0.3, 3.67, 3, 1};
    Digraph g(3);
    g.add_edge(0, 1, 0.3);
    g.add_edge(2, 1, 0.3);
    g.add_edge(1, 0, 0.3);
    g.add_edge(2, 0, 0.3);
    g.add_edge(0, 2, 0.3);
    g.add_edge(1, 2, 0.3);
    g.validate();
    sc.graph = g;
    sc.x0 = {1.0, 5.0, 9.0};
    sc.v0 = {0.0, 1.0, -1.0};
    sc.offsets.assign(3, 0.0);
    sc.adversary = {AdversaryKind::FTotal, 1, {2}};
    StrategySpec spec;
    spec.type = "script";
    for (long k = 0; k < 10; ++k)
      spec.script[k] = ScriptEntry{ScriptEntry::Kind::RawU, k == 9 ? last_u : 0.5};
    sc.strategies[2] = spec;
    sc.horizon = 10;
    sc.name = "perturb";
    return run_sync(sc);
  };
  Trace a = build(0.5), b = build(123.0);
  for (int i = 0; i < 2; ++i)
    CHECK(a.steps.back().positions[i] == b.steps.back().positions[i]);
  // the malicious agent's own position does differ
  CHECK(a.steps.back().positions[2] != b.steps.back().positions[2]);
}

}  // TEST_SUITE
