#pragma once

#include <utility>
#include <vector>

namespace resim {

/// Outcome of the position filter for one agent at one step. The three sets
/// partition the agent's in-neighborhood; at most f neighbors appear on each
/// dropped side.
struct FilterDecision {
  int agent = -1;
  std::vector<int> kept;
  std::vector<int> dropped_high;
  std::vector<int> dropped_low;
};

/// Position filter over relative values (neighbor, sample - own position):
/// drops up to f neighbors with the largest values among those >= 0, then up
/// to f remaining neighbors with the smallest values among those <= 0. A
/// value of exactly zero is eligible on both sides but each neighbor is
/// dropped at most once (high side first). Ties break by ascending neighbor
/// index.
FilterDecision dp_msr_filter(const std::vector<std::pair<int, double>>& rel_values, int f);

}  // namespace resim
