#include "resim/msr.hpp"

#include <algorithm>
#include <cmath>

#include "resim/errors.hpp"

namespace resim {

namespace {

bool contains(const std::vector<int>& sorted, int v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

}  // namespace

RoundResult sync_round(const NetworkState& s, const Digraph& g, const SimParams& p,
                       const AdversaryRuntime& adv) {
  const int n = s.n();
  RoundResult out;
  out.filters.assign(n, FilterDecision{});
  out.controls.u.assign(n, 0.0);

  static const std::vector<int> kNoAgents;
  const std::vector<int>& malicious = adv.model ? adv.model->malicious : kNoAgents;
  std::vector<std::pair<int, double>> rel;
  std::vector<std::pair<double, double>> ws;

  for (int i = 0; i < n; ++i) {
    if (contains(malicious, i)) {
      StrategyContext ctx{*adv.trace, adv.updates, adv.delays, p, s.step, i};
      const double u = adv.strategies->at(i)(ctx);
      if (!std::isfinite(u))
        throw NumericError("strategy produced non-finite control for agent " + std::to_string(i + 1), i);
      out.controls.u[i] = u;
      continue;
    }
    rel.clear();
    for (const auto& [j, w] : g.in_edges(i)) rel.emplace_back(j, s.positions[j] - s.positions[i]);
    FilterDecision fd = dp_msr_filter(rel, p.f);
    fd.agent = i;

    ws.clear();
    for (const auto& [j, w] : g.in_edges(i)) {
      const bool kept = contains(fd.kept, j);
      char disp = kept ? 'k' : (contains(fd.dropped_high, j) ? 'h' : 'l');
      out.edge_uses.push_back({i, j, 0, disp});
      if (kept) ws.emplace_back(w, s.positions[j]);
    }
    out.controls.u[i] = control_from_samples(s.positions[i], s.velocities[i], ws, p.alpha);
    out.filters[i] = std::move(fd);
  }

  out.state = step_state(s, out.controls, p);
  return out;
}

std::map<int, Strategy> make_strategies(const Scenario& sc) {
  std::map<int, Strategy> out;
  for (const auto& [agent, spec] : sc.strategies) out[agent] = make_strategy(spec);
  return out;
}

Trace run_sync(const Scenario& sc) {
  validate_scenario(sc);
  const auto strategies = make_strategies(sc);

  Trace trace;
  trace.n = sc.params.n;
  trace.malicious = sc.adversary.malicious;

  NetworkState state = sc.initial_state();
  StepRecord first;
  first.k = 0;
  first.positions = state.positions;
  first.velocities = state.velocities;
  trace.steps.push_back(std::move(first));

  AdversaryRuntime adv{&sc.adversary, &strategies, &trace, &sc.updates, &sc.delays};

  for (long k = 0; k < sc.horizon; ++k) {
    RoundResult round = sync_round(state, sc.graph, sc.params, adv);

    auto& rec = trace.steps.back();
    rec.controls = round.controls.u;
    rec.updated.assign(trace.n, 1);
    rec.filters = std::move(round.filters);
    rec.edge_uses = std::move(round.edge_uses);

    state = std::move(round.state);
    StepRecord next;
    next.k = k + 1;
    next.positions = state.positions;
    next.velocities = state.velocities;
    trace.steps.push_back(std::move(next));

    const auto worst =
        std::max_element(state.positions.begin(), state.positions.end(),
                         [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (worst != state.positions.end() && std::abs(*worst) > kDivergenceGuard) {
      trace.aborted = true;
      trace.abort_reason =
          "position of agent " +
          std::to_string(std::distance(state.positions.begin(), worst) + 1) + " exceeded " +
          std::to_string(kDivergenceGuard) + " at step " + std::to_string(k + 1);
      break;
    }
  }
  return trace;
}

}  // namespace resim
