#pragma once

// Shared generators and oracles for the unit and acceptance suites. The
// oracles re-derive expected behavior along an independent path from the
// library implementation they check.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "resim/adversary.hpp"
#include "resim/asyncsim.hpp"
#include "resim/graph.hpp"
#include "resim/scenario.hpp"

namespace testsup {

using Rng = std::mt19937_64;

inline resim::Digraph random_digraph(Rng& rng, int n, double edge_prob) {
  resim::Digraph g(n, 1.0 / n);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && coin(rng) < edge_prob) g.add_edge(j, i, 1.0 / n);
  g.validate();
  return g;
}

/// Rejection-samples a digraph that is (r, s)-robust.
inline resim::Digraph random_robust_graph(Rng& rng, int n, int r, int s) {
  for (int tries = 0; tries < 4000; ++tries) {
    resim::Digraph g = random_digraph(rng, n, 0.75);
    if (resim::is_rs_robust(g, r, s).holds) return g;
  }
  return resim::build_complete(n);
}

/// A bidirectional ring (each arc in both directions).
inline resim::Digraph ring_graph(int n) {
  resim::Digraph g(n, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    g.add_edge((i + 1) % n, i, 1.0 / n);
    g.add_edge((i + n - 1) % n, i, 1.0 / n);
  }
  g.validate();
  return g;
}

/// Parameters drawn uniformly from the admissible window
/// 1 + T^2/2 <= alpha T <= 2 - T^2/2.
inline resim::SimParams random_params(Rng& rng, int n, int f) {
  std::uniform_real_distribution<double> tdist(0.05, 1.0);
  const double t = tdist(rng);
  const double lo = 1.0 + t * t / 2.0, hi = 2.0 - t * t / 2.0;
  std::uniform_real_distribution<double> adist(lo, hi);
  return {t, adist(rng) / t, n, f};
}

/// Literal transcription of the two-sided trimming rule, used as the oracle
/// for dp_msr_filter: count the values >= 0; if fewer than f, ignore exactly
/// those, otherwise ignore the f largest; then the mirror image on the
/// remaining values <= 0. Ties by ascending index.
struct OracleFilter {
  std::vector<int> dropped_high, dropped_low, kept;
};

inline OracleFilter oracle_filter(const std::vector<std::pair<int, double>>& rel, int f) {
  OracleFilter out;
  std::vector<int> order(rel.size());
  for (std::size_t i = 0; i < rel.size(); ++i) order[i] = static_cast<int>(i);
  std::vector<char> gone(rel.size(), 0);

  auto high_sorted = order;
  std::sort(high_sorted.begin(), high_sorted.end(), [&](int a, int b) {
    if (rel[a].second != rel[b].second) return rel[a].second > rel[b].second;
    return rel[a].first < rel[b].first;
  });
  int nonneg = 0;
  for (const auto& e : rel)
    if (e.second >= 0.0) ++nonneg;
  const int high_quota = std::min(nonneg, f);
  for (int idx : high_sorted) {
    if (static_cast<int>(out.dropped_high.size()) == high_quota) break;
    if (rel[idx].second < 0.0) break;
    out.dropped_high.push_back(rel[idx].first);
    gone[idx] = 1;
  }

  auto low_sorted = order;
  std::sort(low_sorted.begin(), low_sorted.end(), [&](int a, int b) {
    if (rel[a].second != rel[b].second) return rel[a].second < rel[b].second;
    return rel[a].first < rel[b].first;
  });
  int nonpos_left = 0;
  for (std::size_t i = 0; i < rel.size(); ++i)
    if (!gone[i] && rel[i].second <= 0.0) ++nonpos_left;
  const int low_quota = std::min(nonpos_left, f);
  for (int idx : low_sorted) {
    if (static_cast<int>(out.dropped_low.size()) == low_quota) break;
    if (gone[idx]) continue;
    if (rel[idx].second > 0.0) break;
    out.dropped_low.push_back(rel[idx].first);
    gone[idx] = 1;
  }

  for (std::size_t i = 0; i < rel.size(); ++i)
    if (!gone[i]) out.kept.push_back(rel[i].first);
  std::sort(out.dropped_high.begin(), out.dropped_high.end());
  std::sort(out.dropped_low.begin(), out.dropped_low.end());
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

inline resim::StrategySpec random_strategy(Rng& rng) {
  std::uniform_real_distribution<double> pos(-8.0, 8.0);
  resim::StrategySpec s;
  switch (rng() % 3) {
    case 0:
      s.type = "hold";
      s.position = pos(rng);
      break;
    case 1: {
      s.type = "oscillate";
      const double a = pos(rng), b = pos(rng);
      s.low = std::min(a, b);
      s.high = std::max(a, b);
      break;
    }
    default: {
      s.type = "script";
      for (long k = 0; k < 4096; ++k) {
        resim::ScriptEntry e;
        e.kind = resim::ScriptEntry::Kind::RawU;
        e.value = pos(rng);
        s.script[k] = e;
      }
      break;
    }
  }
  return s;
}

/// Randomized but always-valid scenario: robust graph, admissible
/// parameters, a model-respecting malicious set, freshness-safe schedules.
inline resim::Scenario random_scenario(Rng& rng, bool async_mode, int max_n = 7,
                                       long horizon = 120) {
  std::uniform_int_distribution<int> ndist(3, max_n);
  const int n = ndist(rng);
  const int f = static_cast<int>(rng() % 2);  // 0 or 1

  resim::Scenario sc;
  sc.name = "random";
  sc.mode = async_mode ? resim::Mode::Async : resim::Mode::Sync;
  sc.params = random_params(rng, n, f);
  sc.graph = random_robust_graph(rng, n, f + 1, f + 1);

  std::uniform_real_distribution<double> pos(-10.0, 10.0), vel(-3.0, 3.0);
  for (int i = 0; i < n; ++i) {
    sc.x0.push_back(pos(rng));
    sc.v0.push_back(vel(rng));
  }
  sc.offsets.assign(n, 0.0);

  sc.adversary.kind = resim::AdversaryKind::FTotal;
  sc.adversary.f = f;
  if (f > 0 && rng() % 4 != 0) {
    const int m = static_cast<int>(rng() % n);
    sc.adversary.malicious.push_back(m);
    sc.strategies[m] = random_strategy(rng);
  }

  if (async_mode) {
    sc.tau = static_cast<int>(rng() % 7);
    sc.delays.tau = sc.tau;
    const long period = 1 + static_cast<long>(rng() % (sc.tau + 1));
    const int dmax = std::max(0, sc.tau - static_cast<int>(period) + 1);
    sc.updates.per_agent.assign(n, resim::UpdateRule{});
    for (int i = 0; i < n; ++i) {
      if (rng() % 2) continue;  // always-update
      resim::UpdateRule r;
      r.kind = resim::UpdateRule::Kind::Periodic;
      r.period = period;
      r.phase = static_cast<long>(rng() % period);
      sc.updates.per_agent[i] = r;
    }
    if (dmax > 0) {
      resim::DelayRule r;
      if (rng() % 2) {
        r.kind = resim::DelayRule::Kind::Constant;
        r.value = static_cast<int>(rng() % (dmax + 1));
      } else {
        r.kind = resim::DelayRule::Kind::Parity;
        r.even = static_cast<int>(rng() % (dmax + 1));
        r.odd = static_cast<int>(rng() % (dmax + 1));
      }
      sc.delays.default_rule = r;
    }
  }

  sc.horizon = horizon;
  return sc;
}

}  // namespace testsup
