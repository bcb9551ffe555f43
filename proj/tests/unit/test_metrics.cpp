#include <doctest.h>

#include <cmath>

#include "resim/metrics.hpp"
#include "resim/msr.hpp"
#include "resim/scenario.hpp"
#include "test_support.hpp"

using namespace resim;

namespace {

// the stock synchronous experiment data
const SimParams kParams{0.3, 3.67, 5, 1};

Trace synthetic_trace(const std::vector<std::vector<double>>& positions,
                      const std::vector<std::vector<double>>& velocities) {
  Trace t;
  t.n = static_cast<int>(positions.front().size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    StepRecord rec;
    rec.k = static_cast<long>(k);
    rec.positions = positions[k];
    rec.velocities = velocities.empty() ? std::vector<double>(t.n, 0.0) : velocities[k];
    t.steps.push_back(rec);
  }
  return t;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("synchronous safety interval on the stock data") {
  auto s0 = NetworkState::make({10, 4, 2.5, 1, 8}, {0, -6, -5, 1, 4});
  auto iv = safety_interval_sync(s0, kParams, {1, 2, 3, 4});
  CHECK(iv.lo == doctest::Approx(0.1909).epsilon(1e-9));
  CHECK(iv.hi == doctest::Approx(8.5394).epsilon(1e-9));
  CHECK_THROWS_AS(safety_interval_sync(s0, kParams, {}), std::invalid_argument);
}

TEST_CASE("zero initial velocities collapse the interval to the position range") {
  auto s0 = NetworkState::make({3, 1, 7}, {0, 0, 0});
  auto iv = safety_interval_sync(s0, {0.3, 3.67, 3, 0}, {0, 1, 2});
  CHECK(iv.lo == 1.0);
  CHECK(iv.hi == 7.0);
}

TEST_CASE("single normal agent with inward velocity") {
  const double c = 0.3 - 3.67 * 0.09 / 2.0;  // T - alpha T^2 / 2
  auto s0 = NetworkState::make({5.0, 0.0}, {-2.0, 0.0});
  auto iv = safety_interval_sync(s0, {0.3, 3.67, 2, 0}, {0});
  CHECK(iv.lo == doctest::Approx(5.0 + c * -2.0));
  CHECK(iv.hi == 5.0);
}

TEST_CASE("interval is invariant under permuting the normal set") {
  auto s0 = NetworkState::make({10, 4, 2.5, 1, 8}, {0, -6, -5, 1, 4});
  auto a = safety_interval_sync(s0, kParams, {1, 2, 3, 4});
  auto b = safety_interval_sync(s0, kParams, {4, 2, 1, 3});
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
}

TEST_CASE("delayed safety interval on the stock data") {
  std::vector<std::vector<double>> z0(12, {4, 10, 8, 9, 1});  // flat history, tau 11
  std::vector<double> v0{0, -1, -1, 4, 3};
  auto iv = safety_interval_async(z0, v0, kParams, {0, 1, 2, 4});
  CHECK(iv.lo == doctest::Approx(0.86515).epsilon(1e-9));
  CHECK(iv.hi == doctest::Approx(10.40455).epsilon(1e-9));  // normal agents only
  // including every agent's velocity instead reproduces the other endpoint
  auto iv_all = safety_interval_async(z0, v0, kParams, {0, 1, 2, 3, 4});
  CHECK(iv_all.hi == doctest::Approx(10.5394).epsilon(1e-9));
}

TEST_CASE("delayed interval with flat history equals the synchronous one") {
  auto s0 = NetworkState::make({3, -1, 2}, {1, 0, -1});
  auto sync_iv = safety_interval_sync(s0, {0.5, 3.0, 3, 0}, {0, 2});
  auto async_iv = safety_interval_async({{3, -1, 2}}, {1, 0, -1}, {0.5, 3.0, 3, 0}, {0, 2});
  CHECK(sync_iv.lo == async_iv.lo);
  CHECK(sync_iv.hi == async_iv.hi);
}

TEST_CASE("safety check flags the first violation") {
  Trace t = synthetic_trace({{1, 5}, {2, 5}, {9, 5}, {3, 5}}, {});
  auto ok = check_safety(t, {0.0, 8.0}, {0});
  REQUIRE_FALSE(ok.ok);
  CHECK(ok.first_violation->first == 2);
  CHECK(ok.first_violation->second == 0);
  CHECK(check_safety(t, {0.0, 9.5}, {0}).ok);

  Trace only_start = synthetic_trace({{1, 5}}, {});
  CHECK(check_safety(only_start, {0.0, 8.0}, {0, 1}).ok);
}

TEST_CASE("consensus on a constant trace") {
  std::vector<std::vector<double>> pos(60, {2.0, 2.0, 2.0});
  Trace t = synthetic_trace(pos, {});
  auto verdict = check_consensus(t, {0, 1, 2}, 1e-6, 50);
  CHECK(verdict.achieved);
  CHECK(*verdict.value == 2.0);
  CHECK(verdict.final_spread == 0.0);
  CHECK(*verdict.step_of_convergence == 0);
  CHECK_THROWS_AS(check_consensus(t, {0}, 1e-6, 100), std::invalid_argument);
  CHECK_THROWS_AS(check_consensus(t, {0}, -1.0, 10), std::invalid_argument);
}

TEST_CASE("consensus requires small velocities too") {
  std::vector<std::vector<double>> pos(60, {2.0, 2.0});
  std::vector<std::vector<double>> vel(60, {0.5, 0.0});
  Trace t = synthetic_trace(pos, vel);
  auto verdict = check_consensus(t, {0, 1}, 1e-6, 50);
  CHECK_FALSE(verdict.achieved);
  CHECK(verdict.max_speed_tail == 0.5);
}

TEST_CASE("envelopes of a constant trace are constant") {
  std::vector<std::vector<double>> pos(20, {1.0, 3.0});
  Trace t = synthetic_trace(pos, {});
  auto env = envelopes(t, {0, 1}, 2);
  for (double u : env.upper) CHECK(u == 3.0);
  for (double l : env.lower) CHECK(l == 1.0);
  CHECK(envelopes_monotone(env));
  CHECK_THROWS_AS(envelopes(t, {0, 1}, 0), std::invalid_argument);
}

TEST_CASE("envelope gap closes at consensus") {
  std::vector<std::vector<double>> pos;
  for (int k = 0; k < 80; ++k) {
    const double d = std::pow(0.5, k);
    pos.push_back({-d / 2, d / 2});
  }
  Trace t = synthetic_trace(pos, {});
  auto env = envelopes(t, {0, 1}, 2);
  CHECK(env.upper.back() - env.lower.back() < 1e-20);
  CHECK(envelopes_monotone(env));
}

TEST_CASE("rate fit on an exact geometric gap") {
  std::vector<std::vector<double>> pos;
  for (int k = 0; k < 120; ++k) {
    const double d = std::pow(0.5, k);
    pos.push_back({-d / 2, d / 2});
  }
  Trace t = synthetic_trace(pos, {});
  auto rate = rate_estimate(t, {0, 1});
  CHECK(rate.slope == doctest::Approx(std::log(0.5)).epsilon(1e-9));
  CHECK(rate.r_squared > 0.999);
  CHECK(rate.converging);
}

TEST_CASE("rate fit flags a non-converging trace") {
  Scenario sc = build_proposition1_scenario(1, 1.0, 9.0, 5.0, 300);
  Trace t = run_async(sc);
  auto rate = rate_estimate(t, t.normal_set());
  CHECK_FALSE(rate.converging);
  CHECK(std::abs(rate.slope) < 1e-3);
}

TEST_CASE("achieved consensus lands inside the safety interval") {
  testsup::Rng rng(91);
  for (int t = 0; t < 6; ++t) {
    Scenario sc = testsup::random_scenario(rng, false, 5, 2500);
    Trace trace = run_sync(sc);
    if (trace.aborted) continue;
    const auto normal = sc.normal_set();
    auto verdict = check_consensus(trace, normal, 1e-6, 50);
    if (!verdict.achieved) continue;
    auto iv = safety_interval_sync(sc.initial_state(), sc.params, normal);
    CHECK(*verdict.value >= iv.lo - 1e-9);
    CHECK(*verdict.value <= iv.hi + 1e-9);
  }
}

TEST_CASE("cluster summary splits on the largest gaps") {
  std::vector<std::vector<double>> pos(40, {1.0, 1.1, 5.0, 5.2});
  Trace t = synthetic_trace(pos, {});
  auto c = cluster_positions(t, {0, 1, 2, 3}, 20, 1.0);
  CHECK(c.count == 2);
  CHECK(c.split_gap == doctest::Approx(3.9));
  CHECK(c.sizes == std::vector<int>{2, 2});
  CHECK(c.max_agent_wobble == 0.0);
}

}  // TEST_SUITE
