#include "resim/asyncsim.hpp"

#include <algorithm>
#include <cmath>

#include "resim/errors.hpp"

namespace resim {

HistoryBuffer::HistoryBuffer(int n, int tau) : n_(n), tau_(tau) {
  if (n < 1 || tau < 0) throw std::invalid_argument("HistoryBuffer: bad dimensions");
  slots_.assign(static_cast<std::size_t>(tau) + 1, std::vector<double>(n, 0.0));
}

void HistoryBuffer::reset(const std::vector<double>& x0,
                          const std::vector<std::vector<double>>& history) {
  if (static_cast<int>(x0.size()) != n_)
    throw std::invalid_argument("HistoryBuffer: x0 length mismatch");
  if (static_cast<int>(history.size()) > tau_)
    throw std::invalid_argument("HistoryBuffer: history longer than tau");
  head_ = 0;
  for (auto& slot : slots_) slot = x0;
  for (std::size_t back = 0; back < history.size(); ++back) {
    if (static_cast<int>(history[back].size()) != n_)
      throw std::invalid_argument("HistoryBuffer: history row length mismatch");
    slots_[back + 1] = history[back];
  }
}

void HistoryBuffer::push(const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("HistoryBuffer: push length mismatch");
  head_ = (head_ + slots_.size() - 1) % slots_.size();
  slots_[head_] = x;
}

double HistoryBuffer::at_age(int age, int agent) const {
  if (age < 0 || age > tau_)
    throw ScheduleError("sample age " + std::to_string(age) + " outside [0, tau]");
  if (agent < 0 || agent >= n_) throw std::invalid_argument("HistoryBuffer: bad agent");
  return slots_[(head_ + static_cast<std::size_t>(age)) % slots_.size()][agent];
}

namespace {

bool contains(const std::vector<int>& sorted, int v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

}  // namespace

RoundResult async_round(const NetworkState& s, AsyncEngineState& es, const Digraph& g,
                        const DelaySchedule& delays, const UpdateSchedule& updates,
                        const SimParams& p, const AdversaryRuntime& adv, long k) {
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
      StrategyContext ctx{*adv.trace, adv.updates, adv.delays, p, k, i};
      const double u = adv.strategies->at(i)(ctx);
      if (!std::isfinite(u))
        throw NumericError("strategy produced non-finite control for agent " + std::to_string(i + 1), i);
      out.controls.u[i] = u;
      continue;
    }

    const bool acquire = (k == 0) || updates.updates(i, k);
    if (acquire) {
      rel.clear();
      auto& held = es.held[i];
      for (const auto& [j, w] : g.in_edges(i)) {
        const int d = delays.delay(j, i, k);
        if (d < 0 || d > delays.tau)
          throw ScheduleError("delay " + std::to_string(d) + " on edge (" + std::to_string(j + 1) +
                              "," + std::to_string(i + 1) + ") leaves [0, tau]");
        const double sample = es.buffer.at_age(d, j);
        held[j] = HeldSample{sample, k, d};
        rel.emplace_back(j, sample - s.positions[i]);
      }
      FilterDecision fd = dp_msr_filter(rel, p.f);
      fd.agent = i;
      es.held_filters[i] = std::move(fd);
    }

    const FilterDecision& fd = es.held_filters[i];
    ws.clear();
    for (const auto& [j, w] : g.in_edges(i)) {
      const HeldSample& hs = es.held[i].at(j);
      const bool kept = contains(fd.kept, j);
      char disp = kept ? 'k' : (contains(fd.dropped_high, j) ? 'h' : 'l');
      out.edge_uses.push_back({i, j, hs.age(k), disp});
      if (kept) ws.emplace_back(w, hs.value);
    }
    out.controls.u[i] = control_from_samples(s.positions[i], s.velocities[i], ws, p.alpha);
    out.filters[i] = fd;
  }

  out.state = step_state(s, out.controls, p);
  es.buffer.push(out.state.positions);
  return out;
}

Trace run_async(const Scenario& sc) {
  validate_scenario(sc);
  const auto strategies = make_strategies(sc);

  Trace trace;
  trace.n = sc.params.n;
  trace.malicious = sc.adversary.malicious;
  trace.prehistory = sc.history;

  NetworkState state = sc.initial_state();
  AsyncEngineState es(sc.params.n, sc.tau);
  es.buffer.reset(state.positions, sc.history);

  StepRecord first;
  first.k = 0;
  first.positions = state.positions;
  first.velocities = state.velocities;
  trace.steps.push_back(std::move(first));

  AdversaryRuntime adv{&sc.adversary, &strategies, &trace, &sc.updates, &sc.delays};

  for (long k = 0; k < sc.horizon; ++k) {
    RoundResult round = async_round(state, es, sc.graph, sc.delays, sc.updates, sc.params, adv, k);

    auto& rec = trace.steps.back();
    rec.controls = round.controls.u;
    rec.updated.assign(trace.n, 0);
    for (int i = 0; i < trace.n; ++i) {
      if (contains(trace.malicious, i))
        rec.updated[i] = 1;
      else
        rec.updated[i] = (k == 0) || sc.updates.updates(i, k) ? 1 : 0;
    }
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

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> lambda_matrices(
    const Digraph& gk, const EdgeDelays& delays_k, const Digraph& gk_prev,
    const EdgeDelays& delays_prev, const SimParams& p, const std::vector<int>& malicious,
    int tau) {
  require_valid_params(p);
  const int n = gk.n();
  if (gk_prev.n() != n) throw std::invalid_argument("lambda_matrices: graph sizes differ");
  if (tau < 0) throw std::invalid_argument("lambda_matrices: tau must be >= 0");

  std::vector<char> is_mal(n, 0);
  for (int m : malicious) {
    if (m < 0 || m >= n) throw std::invalid_argument("lambda_matrices: malicious index out of range");
    is_mal[m] = 1;
  }

  const int cols = (tau + 1) * n;
  const double half_t2 = p.T * p.T / 2.0;

  // delay-partitioned Laplacian with malicious rows zeroed:
  // block 0 gets D[k] - A_0[k], block ell gets -A_ell[k]
  auto masked_ltau = [&](const Digraph& g, const EdgeDelays& ages) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, cols);
    for (int i = 0; i < n; ++i) {
      if (is_mal[i]) continue;
      double deg = 0.0;
      for (const auto& [j, w] : g.in_edges(i)) {
        const int d = ages.at(i).at(j);
        if (d < 0 || d > tau)
          throw ScheduleError("lambda_matrices: age " + std::to_string(d) + " outside [0, tau]");
        l(i, d * n + j) -= w;
        deg += w;
      }
      l(i, i) += deg;
    }
    return l;
  };

  Eigen::VectorXd normal = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i)
    if (is_mal[i]) normal(i) = 0.0;
  Eigen::MatrixXd r_mat = Eigen::MatrixXd::Identity(n, n) -
                          p.alpha * p.T * normal.asDiagonal().toDenseMatrix();

  Eigen::MatrixXd r_pad = Eigen::MatrixXd::Zero(n, cols);
  r_pad.leftCols(n) = r_mat;
  Eigen::MatrixXd eye_pad = Eigen::MatrixXd::Zero(n, cols);
  eye_pad.leftCols(n) = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd lambda1 = r_pad + eye_pad - half_t2 * masked_ltau(gk, delays_k);
  Eigen::MatrixXd lambda2 = -r_pad - half_t2 * masked_ltau(gk_prev, delays_prev);
  return {lambda1, lambda2};
}

Scenario build_proposition1_scenario(int f, double a, double b, double c, long horizon) {
  if (!(a < c && c < b))
    throw ValidationError("build_proposition1_scenario: need a < c < b");
  if (f < 1) throw std::invalid_argument("build_proposition1_scenario: need f >= 1");

  Scenario sc;
  sc.name = "prop1-blocking-f" + std::to_string(f);
  sc.mode = Mode::Async;
  // T = 1/2 and alpha = 3 sit inside the parameter window and keep every
  // operation exact in binary floating point for integer a, b, c
  sc.params = {0.5, 3.0, 7 * f, f};
  sc.graph = build_proposition_graph(f);
  sc.graph_desc = "proposition-f" + std::to_string(f);

  const int n = 7 * f;
  const int core_end = 4 * f, b2_end = 5 * f, b3_end = 6 * f;
  sc.x0.assign(n, c);
  sc.v0.assign(n, 0.0);
  sc.offsets.assign(n, 0.0);
  for (int i = core_end; i < b2_end; ++i) sc.x0[i] = a;  // oscillators start low (even step)
  for (int i = b2_end; i < b3_end; ++i) sc.x0[i] = a;
  for (int i = b3_end; i < n; ++i) sc.x0[i] = b;

  sc.adversary.kind = AdversaryKind::FTotal;
  sc.adversary.f = f;
  StrategySpec osc;
  osc.type = "oscillate";
  osc.low = a;
  osc.high = b;
  for (int i = core_end; i < b2_end; ++i) {
    sc.adversary.malicious.push_back(i);
    sc.strategies[i] = osc;
  }

  sc.tau = 1;
  sc.delays.tau = 1;
  DelayRule to_b3;  // fresh at even steps, one step old at odd steps
  to_b3.kind = DelayRule::Kind::Parity;
  to_b3.even = 0;
  to_b3.odd = 1;
  DelayRule to_b4;  // the mirror image
  to_b4.kind = DelayRule::Kind::Parity;
  to_b4.even = 1;
  to_b4.odd = 0;
  for (int j = core_end; j < b2_end; ++j) {
    for (int i = b2_end; i < b3_end; ++i)
      if (sc.graph.has_edge(j, i)) sc.delays.per_edge[{j, i}] = to_b3;
    for (int i = b3_end; i < n; ++i)
      if (sc.graph.has_edge(j, i)) sc.delays.per_edge[{j, i}] = to_b4;
  }

  // step -1 history: the oscillators were at b (odd step), everyone else at
  // their initial position
  std::vector<double> prev = sc.x0;
  for (int i = core_end; i < b2_end; ++i) prev[i] = b;
  sc.history.push_back(std::move(prev));

  sc.horizon = horizon;
  return sc;
}

}  // namespace resim
