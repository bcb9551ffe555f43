#pragma once

#include <map>
#include <utility>
#include <vector>

namespace resim {

/// When an agent refreshes its neighbor samples. Rules are closed-form
/// (always / periodic with phase) or explicit step tables.
struct UpdateRule {
  enum class Kind { Always, Periodic, Table };
  Kind kind = Kind::Always;
  long period = 1;
  long phase = 0;
  std::vector<char> table;  // indexed by k; must cover the horizon

  bool updates(long k) const;
};

struct UpdateSchedule {
  std::vector<UpdateRule> per_agent;  // empty means every agent always updates

  bool updates(int agent, long k) const;
  /// Largest gap between consecutive update steps of `agent` over the first
  /// `horizon` steps (starting from the forced acquisition at k = 0).
  long max_gap(int agent, long horizon) const;
};

/// Per-edge sample age at acquisition time. Constant, parity-switched, or an
/// explicit table indexed by step.
struct DelayRule {
  enum class Kind { Constant, Parity, Table };
  Kind kind = Kind::Constant;
  int value = 0;
  int even = 0, odd = 0;
  std::vector<int> table;

  int delay(long k) const;
  int max_value(long horizon) const;
};

struct DelaySchedule {
  int tau = 0;
  DelayRule default_rule;                            // constant 0 unless set
  std::map<std::pair<int, int>, DelayRule> per_edge; // keyed by (j, i)

  int delay(int j, int i, long k) const;
};

}  // namespace resim
