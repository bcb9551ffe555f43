#include "resim/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resim/errors.hpp"

namespace resim {

bool validate_model(const Digraph& g, const AdversaryModel& m) {
  std::vector<char> is_mal(g.n(), 0);
  for (int v : m.malicious) {
    g.check_node(v);
    is_mal[v] = 1;
  }
  if (m.kind == AdversaryKind::FTotal)
    return static_cast<int>(m.malicious.size()) <= m.f;

  for (int i = 0; i < g.n(); ++i) {
    if (is_mal[i]) continue;
    int cnt = 0;
    for (const auto& [j, w] : g.in_edges(i))
      if (is_mal[j]) ++cnt;
    if (cnt > m.f) return false;
  }
  return true;
}

namespace {

double solve_position_row(double target, double x, double v, double t) {
  return (target - x - t * v) / (t * t / 2.0);
}

}  // namespace

Strategy strategy_hold(double position) {
  return [position](const StrategyContext& c) -> double {
    const auto& rec = c.trace.steps.back();
    const double x = rec.positions[c.agent];
    const double v = rec.velocities[c.agent];
    const double t = c.params.T;
    const double tol = 1e-9 * std::max(1.0, std::abs(position));
    if (std::abs(x - position) <= tol) {
      // on the spot: -1.5 v / T brings the velocity to zero two steps from
      // now (via one excursion of T v / 4) and is exactly zero when at rest
      return -1.5 * v / t;
    }
    return solve_position_row(position, x, v, t);
  };
}

Strategy strategy_oscillate(double low, double high) {
  return [low, high](const StrategyContext& c) -> double {
    const auto& rec = c.trace.steps.back();
    const double x = rec.positions[c.agent];
    const double v = rec.velocities[c.agent];
    const double target = ((c.k + 1) % 2 == 0) ? low : high;
    return solve_position_row(target, x, v, c.params.T);
  };
}

Strategy strategy_scripted(std::map<long, ScriptEntry> table) {
  return [table = std::move(table)](const StrategyContext& c) -> double {
    auto it = table.find(c.k);
    if (it == table.end())
      throw ScheduleError("scripted strategy: no entry for step " + std::to_string(c.k));
    if (it->second.kind == ScriptEntry::Kind::RawU) return it->second.value;
    const auto& rec = c.trace.steps.back();
    return solve_position_row(it->second.value, rec.positions[c.agent], rec.velocities[c.agent],
                              c.params.T);
  };
}

Strategy make_strategy(const StrategySpec& spec) {
  if (spec.type == "hold") return strategy_hold(spec.position);
  if (spec.type == "oscillate") return strategy_oscillate(spec.low, spec.high);
  if (spec.type == "script") return strategy_scripted(spec.script);
  throw ValidationError("unknown strategy type: " + spec.type);
}

}  // namespace resim
