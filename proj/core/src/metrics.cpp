#include "resim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "resim/errors.hpp"

namespace resim {

namespace {

void require_normals(const std::vector<int>& normal) {
  if (normal.empty()) throw std::invalid_argument("normal set must not be empty");
}

}  // namespace

SafetyInterval safety_interval_sync(const NetworkState& s0, const SimParams& p,
                                    const std::vector<int>& normal) {
  require_valid_params(p);
  require_normals(normal);
  const double c = p.T - p.alpha * p.T * p.T / 2.0;
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_v = 0.0, max_v = 0.0;
  for (int i : normal) {
    min_x = std::min(min_x, s0.positions[i]);
    max_x = std::max(max_x, s0.positions[i]);
    min_v = std::min(min_v, c * s0.velocities[i]);
    max_v = std::max(max_v, c * s0.velocities[i]);
  }
  return {min_x + min_v, max_x + max_v};
}

SafetyInterval safety_interval_async(const std::vector<std::vector<double>>& z0,
                                     const std::vector<double>& v0, const SimParams& p,
                                     const std::vector<int>& normal) {
  require_valid_params(p);
  require_normals(normal);
  if (z0.empty()) throw std::invalid_argument("safety_interval_async: empty history");
  const double c = p.T - p.alpha * p.T * p.T / 2.0;
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_v = 0.0, max_v = 0.0;
  for (const auto& row : z0)
    for (int i : normal) {
      min_x = std::min(min_x, row[i]);
      max_x = std::max(max_x, row[i]);
    }
  for (int i : normal) {
    min_v = std::min(min_v, c * v0[i]);
    max_v = std::max(max_v, c * v0[i]);
  }
  return {min_x + min_v, max_x + max_v};
}

SafetyCheck check_safety(const Trace& t, const SafetyInterval& s, const std::vector<int>& normal) {
  constexpr double kSlack = 1e-9;
  for (const auto& rec : t.steps)
    for (int i : normal)
      if (rec.positions[i] < s.lo - kSlack || rec.positions[i] > s.hi + kSlack)
        return {false, std::make_pair(rec.k, i)};
  return {true, std::nullopt};
}

double spread_at(const Trace& t, long k, const std::vector<int>& normal) {
  const auto& rec = t.steps.at(static_cast<std::size_t>(k));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i : normal) {
    lo = std::min(lo, rec.positions[i]);
    hi = std::max(hi, rec.positions[i]);
  }
  return hi - lo;
}

ConsensusVerdict check_consensus(const Trace& t, const std::vector<int>& normal, double tol,
                                 long tail) {
  require_normals(normal);
  if (!(tol > 0.0)) throw std::invalid_argument("check_consensus: tol must be positive");
  const long len = static_cast<long>(t.steps.size());
  if (len < tail) throw std::invalid_argument("check_consensus: trace shorter than the tail window");

  auto step_ok = [&](long k) {
    if (spread_at(t, k, normal) > tol) return false;
    const auto& rec = t.steps[static_cast<std::size_t>(k)];
    for (int i : normal)
      if (std::abs(rec.velocities[i]) > tol) return false;
    return true;
  };

  ConsensusVerdict v;
  v.final_spread = spread_at(t, len - 1, normal);
  v.max_speed_tail = 0.0;
  for (long k = len - tail; k < len; ++k) {
    const auto& rec = t.steps[static_cast<std::size_t>(k)];
    for (int i : normal) v.max_speed_tail = std::max(v.max_speed_tail, std::abs(rec.velocities[i]));
  }

  bool ok = true;
  for (long k = len - tail; k < len && ok; ++k) ok = step_ok(k);
  v.achieved = ok;
  if (ok) {
    double sum = 0.0;
    for (int i : normal) sum += t.steps.back().positions[i];
    v.value = sum / static_cast<double>(normal.size());
    long k = len - 1;
    while (k > 0 && step_ok(k - 1)) --k;
    v.step_of_convergence = k;
  }
  return v;
}

EnvelopeSeries envelopes(const Trace& t, const std::vector<int>& normal, int depth) {
  require_normals(normal);
  if (depth < 1) throw std::invalid_argument("envelopes: depth must be >= 1");
  EnvelopeSeries e;
  const long len = static_cast<long>(t.steps.size());
  for (long k = 1; k < len; ++k) {
    double hi = -std::numeric_limits<double>::infinity(), lo = -hi;
    for (int back = 0; back < depth; ++back)
      for (int i : normal) {
        const double x = t.position(k - back, i);
        hi = std::max(hi, x);
        lo = std::min(lo, x);
      }
    e.upper.push_back(hi);
    e.lower.push_back(lo);
  }
  return e;
}

bool envelopes_monotone(const EnvelopeSeries& e, double slack) {
  for (std::size_t k = 1; k < e.upper.size(); ++k) {
    if (e.upper[k] > e.upper[k - 1] + slack) return false;
    if (e.lower[k] < e.lower[k - 1] - slack) return false;
  }
  return true;
}

RateEstimate rate_estimate(const Trace& t, const std::vector<int>& normal) {
  require_normals(normal);
  RateEstimate out;
  if (t.steps.size() < 3) return out;

  EnvelopeSeries env = envelopes(t, normal, 2);
  const std::size_t len = env.upper.size();
  std::vector<double> gap(len);
  for (std::size_t k = 0; k < len; ++k) gap[k] = env.upper[k] - env.lower[k];

  const double v1 = gap.front();
  if (!(v1 > 0.0)) {
    out.converging = true;
    out.r_squared = 1.0;
    return out;
  }
  const double floor = std::max(v1 * 1e-13, std::numeric_limits<double>::min() * 16);
  std::size_t end = 0;
  while (end < len && gap[end] > floor) ++end;

  out.converging = gap.back() <= std::max(floor, 1e-6);
  if (end < 8) return out;  // too short to fit

  // least squares on (k, log gap)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < end; ++k) {
    const double x = static_cast<double>(k);
    const double y = std::log(std::max(gap[k], std::numeric_limits<double>::epsilon() * v1));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(end);
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return out;
  out.slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - out.slope * sx) / m;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / m;
  for (std::size_t k = 0; k < end; ++k) {
    const double y = std::log(std::max(gap[k], std::numeric_limits<double>::epsilon() * v1));
    const double fit = intercept + out.slope * static_cast<double>(k);
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

ClusterSummary cluster_positions(const Trace& t, const std::vector<int>& normal, long tail,
                                 double gap_threshold) {
  require_normals(normal);
  const long len = static_cast<long>(t.steps.size());
  tail = std::min(tail, len);

  ClusterSummary out;
  std::vector<std::pair<double, int>> means;  // (mean position, agent)
  for (int i : normal) {
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (long k = len - tail; k < len; ++k) {
      const double x = t.steps[static_cast<std::size_t>(k)].positions[i];
      sum += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    means.emplace_back(sum / static_cast<double>(tail), i);
    out.max_agent_wobble = std::max(out.max_agent_wobble, hi - lo);
  }
  std::sort(means.begin(), means.end());

  std::size_t start = 0;
  for (std::size_t k = 1; k <= means.size(); ++k) {
    const bool cut = k == means.size() || means[k].first - means[k - 1].first > gap_threshold;
    if (!cut) continue;
    if (k < means.size()) out.split_gap = std::max(out.split_gap, means[k].first - means[k - 1].first);
    double sum = 0.0;
    for (std::size_t j = start; j < k; ++j) sum += means[j].first;
    out.centers.push_back(sum / static_cast<double>(k - start));
    out.sizes.push_back(static_cast<int>(k - start));
    start = k;
  }
  out.count = static_cast<int>(out.centers.size());
  return out;
}

}  // namespace resim
