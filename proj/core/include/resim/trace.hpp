#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "resim/filter.hpp"

namespace resim {

/// One in-edge as seen by its receiving agent at one step: the age of the
/// position sample that was on the table and what the filter did with it.
struct EdgeUse {
  int agent = -1;
  int neighbor = -1;
  int age = 0;
  char disposition = 'k';  // 'k' kept, 'h' dropped high, 'l' dropped low
};

/// State at time k plus the quantities applied at k (control, update flags,
/// filter decisions). The final record of a run carries zero controls since
/// no further step was taken.
struct StepRecord {
  long k = 0;
  std::vector<double> positions;
  std::vector<double> velocities;
  std::vector<double> controls;
  std::vector<char> updated;
  std::vector<FilterDecision> filters;  // agent == -1 marks "not filtering" (malicious)
  std::vector<EdgeUse> edge_uses;
};

struct Trace {
  int n = 0;
  std::vector<int> malicious;                    // sorted agent indices
  std::vector<std::vector<double>> prehistory;   // [0] = x(-1), [1] = x(-2), ...
  std::vector<StepRecord> steps;
  bool aborted = false;
  std::string abort_reason;

  long horizon() const { return static_cast<long>(steps.size()) - 1; }

  /// Position lookup with negative steps resolved through the prehistory;
  /// history older than the recorded prefix extends flat.
  double position(long k, int agent) const;

  std::vector<int> normal_set() const;
};

/// Columns: k, x1..xn, v1..vn, u1..un, upd1..updn. Floats carry 17
/// significant digits so a read-back is bit exact.
void write_trace_csv(const Trace& t, std::ostream& out);
std::string trace_csv_string(const Trace& t);

/// Reads back the main CSV schema. Filter decisions and edge uses live in
/// the sidecar and are not restored; prehistory is assumed flat.
Trace read_trace_csv(std::istream& in);

/// Sidecar log, one row per (step, receiving agent, in-edge):
/// k, agent, neighbor, age, disposition.
void write_edge_log_csv(const Trace& t, std::ostream& out);

}  // namespace resim
