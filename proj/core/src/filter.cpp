#include "resim/filter.hpp"

#include <algorithm>
#include <stdexcept>

namespace resim {

FilterDecision dp_msr_filter(const std::vector<std::pair<int, double>>& rel_values, int f) {
  if (f < 0) throw std::invalid_argument("dp_msr_filter: f must be >= 0");

  FilterDecision d;
  const std::size_t m = rel_values.size();
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::vector<char> dropped(m, 0);

  // high side: the largest values first, index ascending among ties
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rel_values[a].second != rel_values[b].second)
      return rel_values[a].second > rel_values[b].second;
    return rel_values[a].first < rel_values[b].first;
  });
  int taken = 0;
  for (std::size_t idx : order) {
    if (taken == f) break;
    if (rel_values[idx].second < 0.0) break;
    dropped[idx] = 1;
    d.dropped_high.push_back(rel_values[idx].first);
    ++taken;
  }

  // low side: the smallest remaining values, index ascending among ties
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rel_values[a].second != rel_values[b].second)
      return rel_values[a].second < rel_values[b].second;
    return rel_values[a].first < rel_values[b].first;
  });
  taken = 0;
  for (std::size_t idx : order) {
    if (taken == f) break;
    if (rel_values[idx].second > 0.0) break;
    if (dropped[idx]) continue;
    dropped[idx] = 1;
    d.dropped_low.push_back(rel_values[idx].first);
    ++taken;
  }

  for (std::size_t i = 0; i < m; ++i)
    if (!dropped[i]) d.kept.push_back(rel_values[i].first);

  std::sort(d.kept.begin(), d.kept.end());
  std::sort(d.dropped_high.begin(), d.dropped_high.end());
  std::sort(d.dropped_low.begin(), d.dropped_low.end());
  return d;
}

}  // namespace resim
