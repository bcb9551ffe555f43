#include "resim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "resim/asyncsim.hpp"
#include "resim/errors.hpp"

namespace resim {

using nlohmann::json;

std::vector<int> Scenario::normal_set() const {
  std::vector<int> out;
  for (int i = 0; i < params.n; ++i)
    if (!std::binary_search(adversary.malicious.begin(), adversary.malicious.end(), i))
      out.push_back(i);
  return out;
}

NetworkState Scenario::initial_state() const { return NetworkState::make(x0, v0, offsets); }

ScenarioCheck validate_scenario(const Scenario& sc) {
  ScenarioCheck out;
  require_valid_params(sc.params);

  const int n = sc.params.n;
  if (sc.graph.n() != n) throw ValidationError("scenario: graph size differs from params.n");
  if (static_cast<int>(sc.x0.size()) != n || static_cast<int>(sc.v0.size()) != n)
    throw ValidationError("scenario: initial vectors must have length n");
  if (!sc.offsets.empty() && static_cast<int>(sc.offsets.size()) != n)
    throw ValidationError("scenario: offsets must have length n");
  auto all_finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!all_finite(sc.x0) || !all_finite(sc.v0) || !all_finite(sc.offsets))
    throw ValidationError("scenario: initial data must be finite");
  if (sc.horizon < 0) throw ValidationError("scenario: horizon must be >= 0");

  if (!std::is_sorted(sc.adversary.malicious.begin(), sc.adversary.malicious.end()))
    throw ValidationError("scenario: malicious set must be sorted");
  if (!validate_model(sc.graph, sc.adversary))
    throw ValidationError("scenario: adversary set violates the declared model bound");
  for (int m : sc.adversary.malicious)
    if (!sc.strategies.count(m))
      throw ValidationError("scenario: malicious agent " + std::to_string(m + 1) +
                            " has no strategy");
  for (const auto& [agent, spec] : sc.strategies)
    if (!std::binary_search(sc.adversary.malicious.begin(), sc.adversary.malicious.end(), agent))
      out.warnings.push_back("strategy given for normal agent " + std::to_string(agent + 1) +
                             " is ignored");

  if (sc.mode == Mode::Async) {
    if (sc.tau < 0) throw ValidationError("scenario: tau must be >= 0");
    if (static_cast<int>(sc.history.size()) > sc.tau)
      throw ValidationError("scenario: explicit history longer than tau");
    for (const auto& row : sc.history)
      if (static_cast<int>(row.size()) != n || !all_finite(row))
        throw ValidationError("scenario: history rows must be finite length-n vectors");

    if (!sc.updates.per_agent.empty() &&
        static_cast<int>(sc.updates.per_agent.size()) != n)
      throw ValidationError("scenario: update schedule must cover all agents");
    for (const auto& rule : sc.updates.per_agent)
      if (rule.kind == UpdateRule::Kind::Table &&
          static_cast<long>(rule.table.size()) < sc.horizon)
        throw ValidationError("scenario: update table does not cover the horizon");

    auto check_delay_rule = [&](const DelayRule& rule) {
      if (rule.kind == DelayRule::Kind::Table &&
          static_cast<long>(rule.table.size()) < sc.horizon)
        throw ValidationError("scenario: delay table does not cover the horizon");
      if (rule.max_value(std::max(sc.horizon, 1L)) > sc.tau ||
          (rule.kind == DelayRule::Kind::Parity && std::min(rule.even, rule.odd) < 0) ||
          (rule.kind == DelayRule::Kind::Constant && rule.value < 0))
        throw ValidationError("scenario: delay rule leaves [0, tau]");
    };
    check_delay_rule(sc.delays.default_rule);
    for (const auto& [edge, rule] : sc.delays.per_edge) check_delay_rule(rule);

    // a held sample ages by one per step between updates; warn when a
    // schedule lets that age pass tau
    const auto normals = sc.normal_set();
    for (int i : normals) {
      int dmax = 0;
      for (const auto& [j, w] : sc.graph.in_edges(i)) {
        auto it = sc.delays.per_edge.find({j, i});
        const DelayRule& rule = it == sc.delays.per_edge.end() ? sc.delays.default_rule : it->second;
        dmax = std::max(dmax, rule.max_value(std::max(sc.horizon, 1L)));
      }
      const long gap = sc.updates.max_gap(i, std::max(sc.horizon, 1L));
      if (dmax + gap - 1 > sc.tau)
        out.warnings.push_back("agent " + std::to_string(i + 1) + ": held samples can reach age " +
                               std::to_string(dmax + gap - 1) + " > tau");
    }
  }
  return out;
}

namespace {

Digraph graph_from_json(const json& jg, const std::string& base_dir, std::string& desc) {
  Digraph g;
  if (jg.contains("generator")) {
    const std::string gen = jg.at("generator").get<std::string>();
    if (gen == "complete") {
      g = build_complete(jg.at("n").get<int>());
      desc = "complete" + std::to_string(g.n());
    } else if (gen == "example5") {
      g = example_graph_5();
      desc = "example5";
    } else if (gen == "proposition") {
      g = build_proposition_graph(jg.at("f").get<int>());
      desc = "proposition-f" + std::to_string(jg.at("f").get<int>());
    } else {
      throw ValidationError("scenario: unknown graph generator '" + gen + "'");
    }
  } else if (jg.contains("edges")) {
    const auto& je = jg.at("edges");
    const int n = je.at("n").get<int>();
    g = Digraph(n);
    for (const auto& row : je.at("list")) {
      if (!row.is_array() || row.size() != 3)
        throw ValidationError("scenario: edge rows are [j, i, weight]");
      g.add_edge(row[0].get<int>() - 1, row[1].get<int>() - 1, row[2].get<double>());
    }
    g.validate();
    desc = "inline";
  } else if (jg.contains("file")) {
    std::filesystem::path p = jg.at("file").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    g = load_edge_list(p.string());
    desc = "file:" + p.string();
  } else {
    throw ValidationError("scenario: graph needs one of generator/edges/file");
  }
  return g;
}

StrategySpec strategy_from_json(const json& js) {
  StrategySpec s;
  s.type = js.at("type").get<std::string>();
  if (s.type == "hold") {
    s.position = js.at("position").get<double>();
  } else if (s.type == "oscillate") {
    s.low = js.at("low").get<double>();
    s.high = js.at("high").get<double>();
  } else if (s.type == "script") {
    for (const auto& e : js.at("entries")) {
      ScriptEntry entry;
      const long k = e.at("k").get<long>();
      if (e.contains("u")) {
        entry.kind = ScriptEntry::Kind::RawU;
        entry.value = e.at("u").get<double>();
      } else {
        entry.kind = ScriptEntry::Kind::Target;
        entry.value = e.at("target").get<double>();
      }
      s.script[k] = entry;
    }
  } else {
    throw ValidationError("scenario: unknown strategy type '" + s.type + "'");
  }
  return s;
}

json strategy_to_json(const StrategySpec& s) {
  json j{{"type", s.type}};
  if (s.type == "hold") j["position"] = s.position;
  if (s.type == "oscillate") {
    j["low"] = s.low;
    j["high"] = s.high;
  }
  if (s.type == "script") {
    json entries = json::array();
    for (const auto& [k, e] : s.script) {
      json je{{"k", k}};
      je[e.kind == ScriptEntry::Kind::RawU ? "u" : "target"] = e.value;
      entries.push_back(je);
    }
    j["entries"] = entries;
  }
  return j;
}

UpdateRule update_rule_from_json(const json& jr) {
  UpdateRule r;
  const std::string type = jr.at("type").get<std::string>();
  if (type == "always") {
    r.kind = UpdateRule::Kind::Always;
  } else if (type == "periodic") {
    r.kind = UpdateRule::Kind::Periodic;
    r.period = jr.at("period").get<long>();
    r.phase = jr.at("phase").get<long>();
    if (r.period <= 0) throw ValidationError("scenario: update period must be positive");
  } else if (type == "table") {
    r.kind = UpdateRule::Kind::Table;
    for (const auto& v : jr.at("steps")) r.table.push_back(v.get<int>() ? 1 : 0);
  } else {
    throw ValidationError("scenario: unknown update rule '" + type + "'");
  }
  return r;
}

DelayRule delay_rule_from_json(const json& jr) {
  DelayRule r;
  const std::string type = jr.at("type").get<std::string>();
  if (type == "constant") {
    r.kind = DelayRule::Kind::Constant;
    r.value = jr.at("value").get<int>();
  } else if (type == "parity") {
    r.kind = DelayRule::Kind::Parity;
    r.even = jr.at("even").get<int>();
    r.odd = jr.at("odd").get<int>();
  } else if (type == "table") {
    r.kind = DelayRule::Kind::Table;
    for (const auto& v : jr.at("values")) r.table.push_back(v.get<int>());
  } else {
    throw ValidationError("scenario: unknown delay rule '" + type + "'");
  }
  return r;
}

}  // namespace

Scenario scenario_from_json(const json& j, const std::string& base_dir) {
  Scenario sc;
  sc.schema_version = j.value("schema_version", 1);
  if (sc.schema_version != 1)
    throw ValidationError("scenario: unsupported schema_version " +
                          std::to_string(sc.schema_version));
  sc.name = j.value("name", "scenario");
  const std::string mode = j.value("mode", "sync");
  if (mode == "sync") sc.mode = Mode::Sync;
  else if (mode == "async") sc.mode = Mode::Async;
  else throw ValidationError("scenario: mode must be sync or async");

  const auto& jp = j.at("params");
  sc.params.T = jp.at("T").get<double>();
  sc.params.alpha = jp.at("alpha").get<double>();
  sc.params.f = jp.value("f", 0);

  sc.graph = graph_from_json(j.at("graph"), base_dir, sc.graph_desc);
  if (j.contains("graph_edits")) {
    const auto& je = j.at("graph_edits");
    for (const auto& e : je.value("remove_edges", json::array()))
      sc.graph.remove_edge(e[0].get<int>() - 1, e[1].get<int>() - 1);
    for (const auto& e : je.value("add_edges", json::array()))
      sc.graph.add_edge(e[0].get<int>() - 1, e[1].get<int>() - 1, e[2].get<double>());
    sc.graph.validate();
    sc.graph_desc += "+edits";
  }
  sc.params.n = sc.graph.n();

  const auto& ji = j.at("initial");
  sc.x0 = ji.at("positions").get<std::vector<double>>();
  sc.v0 = ji.at("velocities").get<std::vector<double>>();
  sc.offsets = ji.value("offsets", std::vector<double>(sc.x0.size(), 0.0));

  if (j.contains("adversary")) {
    const auto& ja = j.at("adversary");
    const std::string kind = ja.value("kind", "f-total");
    if (kind == "f-total") sc.adversary.kind = AdversaryKind::FTotal;
    else if (kind == "f-local") sc.adversary.kind = AdversaryKind::FLocal;
    else throw ValidationError("scenario: adversary kind must be f-total or f-local");
    sc.adversary.f = ja.value("f", sc.params.f);
    for (const auto& v : ja.value("malicious", json::array()))
      sc.adversary.malicious.push_back(v.get<int>() - 1);
    std::sort(sc.adversary.malicious.begin(), sc.adversary.malicious.end());
    if (ja.contains("strategies"))
      for (const auto& [key, js] : ja.at("strategies").items())
        sc.strategies[std::stoi(key) - 1] = strategy_from_json(js);
  }

  if (j.contains("async")) {
    const auto& jy = j.at("async");
    sc.tau = jy.value("tau", 0);
    if (jy.contains("updates")) {
      sc.updates.per_agent.assign(sc.params.n, UpdateRule{});
      for (const auto& jr : jy.at("updates")) {
        UpdateRule rule = update_rule_from_json(jr);
        for (const auto& a : jr.at("agents"))
          sc.updates.per_agent.at(a.get<int>() - 1) = rule;
      }
    }
    if (jy.contains("delays")) {
      for (const auto& jr : jy.at("delays")) {
        DelayRule rule = delay_rule_from_json(jr);
        if (jr.contains("edges")) {
          for (const auto& e : jr.at("edges"))
            sc.delays.per_edge[{e[0].get<int>() - 1, e[1].get<int>() - 1}] = rule;
        } else {
          sc.delays.default_rule = rule;
        }
      }
    }
    sc.delays.tau = sc.tau;
    if (jy.contains("history"))
      for (const auto& row : jy.at("history"))
        sc.history.push_back(row.get<std::vector<double>>());
  }

  sc.horizon = j.value("horizon", 0L);
  sc.seed = j.value("seed", 0ULL);
  return sc;
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = sc.schema_version;
  j["name"] = sc.name;
  j["mode"] = sc.mode == Mode::Sync ? "sync" : "async";
  j["params"] = {{"T", sc.params.T}, {"alpha", sc.params.alpha}, {"f", sc.params.f}};

  json edges = json::array();
  for (int i = 0; i < sc.graph.n(); ++i)
    for (const auto& [v, w] : sc.graph.in_edges(i)) edges.push_back({v + 1, i + 1, w});
  j["graph"] = {{"edges", {{"n", sc.graph.n()}, {"list", edges}}}};

  j["initial"] = {{"positions", sc.x0}, {"velocities", sc.v0}, {"offsets", sc.offsets}};

  json mal = json::array();
  for (int m : sc.adversary.malicious) mal.push_back(m + 1);
  json strategies = json::object();
  for (const auto& [agent, spec] : sc.strategies)
    strategies[std::to_string(agent + 1)] = strategy_to_json(spec);
  j["adversary"] = {{"kind", sc.adversary.kind == AdversaryKind::FTotal ? "f-total" : "f-local"},
                    {"f", sc.adversary.f},
                    {"malicious", mal},
                    {"strategies", strategies}};

  if (sc.mode == Mode::Async) {
    json jy;
    jy["tau"] = sc.tau;
    if (!sc.updates.per_agent.empty()) {
      json rules = json::array();
      for (int i = 0; i < static_cast<int>(sc.updates.per_agent.size()); ++i) {
        const auto& r = sc.updates.per_agent[i];
        json jr{{"agents", {i + 1}}};
        switch (r.kind) {
          case UpdateRule::Kind::Always:
            jr["type"] = "always";
            break;
          case UpdateRule::Kind::Periodic:
            jr["type"] = "periodic";
            jr["period"] = r.period;
            jr["phase"] = r.phase;
            break;
          case UpdateRule::Kind::Table: {
            jr["type"] = "table";
            json steps = json::array();
            for (char c : r.table) steps.push_back(c ? 1 : 0);
            jr["steps"] = steps;
            break;
          }
        }
        rules.push_back(jr);
      }
      jy["updates"] = rules;
    }
    json delay_rules = json::array();
    auto delay_rule_json = [](const DelayRule& r) {
      json jr;
      switch (r.kind) {
        case DelayRule::Kind::Constant:
          jr["type"] = "constant";
          jr["value"] = r.value;
          break;
        case DelayRule::Kind::Parity:
          jr["type"] = "parity";
          jr["even"] = r.even;
          jr["odd"] = r.odd;
          break;
        case DelayRule::Kind::Table:
          jr["type"] = "table";
          jr["values"] = r.table;
          break;
      }
      return jr;
    };
    if (!(sc.delays.default_rule.kind == DelayRule::Kind::Constant &&
          sc.delays.default_rule.value == 0))
      delay_rules.push_back(delay_rule_json(sc.delays.default_rule));
    for (const auto& [edge, rule] : sc.delays.per_edge) {
      json jr = delay_rule_json(rule);
      jr["edges"] = {{edge.first + 1, edge.second + 1}};
      delay_rules.push_back(jr);
    }
    if (!delay_rules.empty()) jy["delays"] = delay_rules;
    if (!sc.history.empty()) jy["history"] = sc.history;
    j["async"] = jy;
  }

  j["horizon"] = sc.horizon;
  j["seed"] = sc.seed;
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("scenario json parse failure: " + std::string(e.what()));
  }
  return scenario_from_json(j, std::filesystem::path(path).parent_path().string());
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write scenario file: " + path);
  out << scenario_to_json(sc).dump(2) << "\n";
}

namespace {

Scenario sync_figure_base() {
  Scenario sc;
  sc.mode = Mode::Sync;
  sc.params = {0.3, 3.67, 5, 1};
  sc.graph = example_graph_5();
  sc.graph_desc = "example5";
  sc.x0 = {10, 4, 2.5, 1, 8};
  sc.v0 = {0, -6, -5, 1, 4};
  sc.offsets.assign(5, 0.0);
  sc.adversary = {AdversaryKind::FTotal, 1, {0}};
  sc.strategies[0] = StrategySpec{.type = "hold", .position = 10.0};
  return sc;
}

Scenario async_figure_base() {
  Scenario sc;
  sc.mode = Mode::Async;
  sc.params = {0.3, 3.67, 5, 1};
  sc.graph = example_graph_5();
  sc.graph_desc = "example5";
  sc.x0 = {4, 10, 8, 9, 1};
  sc.v0 = {0, -1, -1, 4, 3};
  sc.offsets.assign(5, 0.0);
  sc.adversary = {AdversaryKind::FTotal, 1, {3}};
  StrategySpec osc;
  osc.type = "oscillate";
  osc.low = 2.0;
  osc.high = 9.0;
  sc.strategies[3] = osc;
  sc.tau = 11;
  sc.delays.tau = 11;
  sc.updates.per_agent.assign(5, UpdateRule{});
  auto periodic = [](long phase) {
    UpdateRule r;
    r.kind = UpdateRule::Kind::Periodic;
    r.period = 12;
    r.phase = phase;
    return r;
  };
  sc.updates.per_agent[0] = periodic(6);
  sc.updates.per_agent[1] = periodic(9);
  sc.updates.per_agent[2] = periodic(11);
  sc.updates.per_agent[4] = periodic(4);
  sc.horizon = 5000;
  return sc;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig4-sync-conventional", "fig5-sync-dpmsr",    "fig6-sync-nonrobust",
          "fig6-async-robust-fail", "fig7-async-complete", "prop1-blocking"};
}

Scenario make_preset(const std::string& name) {
  if (name == "fig4-sync-conventional") {
    Scenario sc = sync_figure_base();
    sc.name = name;
    sc.params.f = 0;  // no filtering: the plain relative-position control
    sc.horizon = 500;
    return sc;
  }
  if (name == "fig5-sync-dpmsr") {
    Scenario sc = sync_figure_base();
    sc.name = name;
    sc.horizon = 2000;
    return sc;
  }
  if (name == "fig6-sync-nonrobust") {
    Scenario sc = sync_figure_base();
    sc.name = name;
    sc.graph.remove_edge(1, 4);  // edge (2,5), 1-based
    sc.graph_desc = "example5 minus (2,5)";
    sc.horizon = 2000;
    return sc;
  }
  if (name == "fig6-async-robust-fail") {
    Scenario sc = async_figure_base();
    sc.name = name;
    return sc;
  }
  if (name == "fig7-async-complete") {
    Scenario sc = async_figure_base();
    sc.name = name;
    sc.graph = build_complete(5);
    sc.graph_desc = "complete5";
    return sc;
  }
  if (name == "prop1-blocking") {
    Scenario sc = build_proposition1_scenario(1, 1.0, 9.0, 5.0);
    sc.name = name;
    return sc;
  }
  throw ValidationError("unknown preset: " + name);
}

}  // namespace resim
