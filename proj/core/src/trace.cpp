#include "resim/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "resim/errors.hpp"

namespace resim {

double Trace::position(long k, int agent) const {
  if (k >= 0) {
    if (static_cast<std::size_t>(k) >= steps.size())
      throw std::invalid_argument("Trace::position: step beyond trace");
    return steps[static_cast<std::size_t>(k)].positions[agent];
  }
  const std::size_t back = static_cast<std::size_t>(-k) - 1;
  if (back < prehistory.size()) return prehistory[back][agent];
  if (!prehistory.empty()) return prehistory.back()[agent];
  return steps.front().positions[agent];
}

std::vector<int> Trace::normal_set() const {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!std::binary_search(malicious.begin(), malicious.end(), i)) out.push_back(i);
  return out;
}

namespace {

void append_g17(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}

}  // namespace

std::string trace_csv_string(const Trace& t) {
  std::string out;
  out += "k";
  for (int i = 1; i <= t.n; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= t.n; ++i) out += ",v" + std::to_string(i);
  for (int i = 1; i <= t.n; ++i) out += ",u" + std::to_string(i);
  for (int i = 1; i <= t.n; ++i) out += ",upd" + std::to_string(i);
  out += "\n";

  for (const auto& rec : t.steps) {
    out += std::to_string(rec.k);
    for (double x : rec.positions) {
      out += ',';
      append_g17(out, x);
    }
    for (double v : rec.velocities) {
      out += ',';
      append_g17(out, v);
    }
    if (rec.controls.empty()) {
      for (int i = 0; i < t.n; ++i) out += ",0";
    } else {
      for (double u : rec.controls) {
        out += ',';
        append_g17(out, u);
      }
    }
    if (rec.updated.empty()) {
      for (int i = 0; i < t.n; ++i) out += ",0";
    } else {
      for (char c : rec.updated) out += c ? ",1" : ",0";
    }
    out += "\n";
  }
  return out;
}

void write_trace_csv(const Trace& t, std::ostream& out) { out << trace_csv_string(t); }

Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace csv: empty file");
  // infer n from the header: 1 + 4n columns
  const std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (cols < 5 || (cols - 1) % 4 != 0) throw ValidationError("trace csv: bad header");
  const int n = static_cast<int>((cols - 1) / 4);

  Trace t;
  t.n = n;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    StepRecord rec;
    rec.positions.resize(n);
    rec.velocities.resize(n);
    rec.controls.resize(n);
    rec.updated.resize(n);
    char comma;
    if (!(ls >> rec.k)) throw ValidationError("trace csv: malformed row");
    auto read_double = [&](double& v) {
      if (!(ls >> comma >> v)) throw ValidationError("trace csv: malformed row");
    };
    for (int i = 0; i < n; ++i) read_double(rec.positions[i]);
    for (int i = 0; i < n; ++i) read_double(rec.velocities[i]);
    for (int i = 0; i < n; ++i) read_double(rec.controls[i]);
    for (int i = 0; i < n; ++i) {
      int u;
      if (!(ls >> comma >> u)) throw ValidationError("trace csv: malformed row");
      rec.updated[i] = u ? 1 : 0;
    }
    t.steps.push_back(std::move(rec));
  }
  if (t.steps.empty()) throw ValidationError("trace csv: no rows");
  return t;
}

void write_edge_log_csv(const Trace& t, std::ostream& out) {
  out << "k,agent,neighbor,age,disposition\n";
  for (const auto& rec : t.steps) {
    for (const auto& e : rec.edge_uses) {
      out << rec.k << ',' << (e.agent + 1) << ',' << (e.neighbor + 1) << ',' << e.age << ','
          << e.disposition << "\n";
    }
  }
}

}  // namespace resim
