#include "resim/schedules.hpp"

#include <algorithm>

#include "resim/errors.hpp"

namespace resim {

bool UpdateRule::updates(long k) const {
  switch (kind) {
    case Kind::Always:
      return true;
    case Kind::Periodic:
      return period > 0 && (k % period + period) % period == (phase % period + period) % period;
    case Kind::Table:
      if (k < 0 || static_cast<std::size_t>(k) >= table.size())
        throw ScheduleError("update table does not cover step " + std::to_string(k));
      return table[static_cast<std::size_t>(k)] != 0;
  }
  return true;
}

bool UpdateSchedule::updates(int agent, long k) const {
  if (per_agent.empty()) return true;
  if (agent < 0 || static_cast<std::size_t>(agent) >= per_agent.size())
    throw ScheduleError("update schedule missing agent " + std::to_string(agent + 1));
  return per_agent[static_cast<std::size_t>(agent)].updates(k);
}

long UpdateSchedule::max_gap(int agent, long horizon) const {
  long last = 0;  // every agent acquires at k = 0
  long gap = 0;
  for (long k = 1; k < horizon; ++k) {
    if (updates(agent, k)) {
      gap = std::max(gap, k - last);
      last = k;
    }
  }
  gap = std::max(gap, horizon - last);
  return gap;
}

int DelayRule::delay(long k) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Parity:
      return (k % 2 == 0) ? even : odd;
    case Kind::Table:
      if (k < 0 || static_cast<std::size_t>(k) >= table.size())
        throw ScheduleError("delay table does not cover step " + std::to_string(k));
      return table[static_cast<std::size_t>(k)];
  }
  return 0;
}

int DelayRule::max_value(long horizon) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Parity:
      return std::max(even, odd);
    case Kind::Table: {
      int m = 0;
      for (long k = 0; k < horizon && static_cast<std::size_t>(k) < table.size(); ++k)
        m = std::max(m, table[static_cast<std::size_t>(k)]);
      return m;
    }
  }
  return 0;
}

int DelaySchedule::delay(int j, int i, long k) const {
  auto it = per_edge.find({j, i});
  const DelayRule& rule = (it == per_edge.end()) ? default_rule : it->second;
  return rule.delay(k);
}

}  // namespace resim
