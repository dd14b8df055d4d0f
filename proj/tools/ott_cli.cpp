#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "ott/config.hpp"
#include "ott/error.hpp"
#include "ott/formulations.hpp"
#include "ott/mcheck.hpp"
#include "ott/milp/mps.hpp"
#include "ott/scenario.hpp"
#include "ott/solver_driver.hpp"
#include "ott/trajectories.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ott;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitLimit = 3;

// Thrown by command handlers to leave with a specific exit code.
struct ExitWith {
  int code;
  std::string message;
};

std::string fmt9(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// Rounds every float in a document to 9 significant digits; non-finite
// values become strings since JSON has no literal for them.
json round9(const json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) return fmt9(x);
    return std::stod(fmt9(x));
  }
  if (j.is_array() || j.is_object()) {
    json r = j;
    for (auto it = r.begin(); it != r.end(); ++it) *it = round9(*it);
    return r;
  }
  return j;
}

void emit_json(const json& j, const std::string& path) {
  const std::string text = round9(j).dump(1) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

int exit_for(milp::SolveStatus s) {
  switch (s) {
    case milp::SolveStatus::optimal: return kExitOk;
    case milp::SolveStatus::gap_limit:
    case milp::SolveStatus::node_limit: return kExitLimit;
    default: return kExitInfeasible;
  }
}

json report_json(const MetricReport& r) {
  json j;
  j["H_b"] = r.H_b;
  j["H_b_l1"] = r.H_b_l1;
  j["H_v"] = r.H_v;
  j["H_c"] = r.H_c;
  j["H_p"] = r.H_p;
  j["H_n"] = r.H_n;
  j["H_p_transitional"] = r.H_p_transitional;
  j["H_p_intermediate"] = r.H_p_intermediate;
  j["condition1"] = r.condition1;
  j["condition2"] = r.condition2;
  j["condition4"] = r.condition4;
  j["condition5"] = r.condition5;
  j["batches"] = json::array();
  for (const BatchCheck& b : r.batches)
    j["batches"].push_back({{"t", b.t},
                            {"connected", b.connected},
                            {"transitional_violation", b.transitional_violation},
                            {"intermediate_violation", b.intermediate_violation},
                            {"disconnected_variants", b.disconnected_variants},
                            {"single_agent", b.single_agent}});
  j["details"] = r.details;
  return j;
}

std::string report_csv(const MetricReport& r, double objective) {
  std::ostringstream os;
  os << "H_b,H_b_l1,H_v,H_c,H_p,H_n,objective,condition1,condition2,condition4,condition5\n";
  os << fmt9(r.H_b) << ',' << fmt9(r.H_b_l1) << ',' << fmt9(r.H_v) << ',' << fmt9(r.H_c) << ',' << fmt9(r.H_p)
     << ',' << fmt9(r.H_n) << ',' << fmt9(objective) << ',' << r.condition1 << ',' << r.condition2 << ','
     << r.condition4 << ',' << r.condition5 << '\n';
  return os.str();
}

json runs_json(const std::vector<SolveRecord>& runs) {
  json a = json::array();
  for (const SolveRecord& r : runs)
    a.push_back({{"T_u", r.T_u},
                 {"necessary_only", r.necessary_only},
                 {"warm_started", r.warm_started},
                 {"status", milp::to_string(r.status)},
                 {"objective", r.objective},
                 {"decoded_T", r.decoded_T},
                 {"nodes", r.nodes},
                 {"lp_iterations", r.lp_iterations},
                 {"seconds", r.seconds}});
  return a;
}

Topology read_topology(const std::string& path) {
  const json j = read_json_file(path);
  return topology_from_json(j.is_object() ? j.at("topology") : j);
}

Trajectory read_trajectory(const json& j) {
  return trajectory_from_json(j.is_object() && j.contains("trajectory") ? j.at("trajectory") : j);
}

// --- shared option groups --------------------------------------------------

struct ScenarioArgs {
  std::string scenario, case_path, z0, zT, pg;
  double load_scale = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--scenario", scenario, "scenario JSON (case, z0, zT, pg)");
    app->add_option("--case", case_path, "case JSON, used when no scenario is given");
    app->add_option("--z0", z0, "initial topology JSON (default: case status)");
    app->add_option("--zT", zT, "terminal topology JSON");
    app->add_option("--pg", pg, "frozen dispatch JSON (default: optimal dispatch at zT)");
    app->add_option("--load-scale", load_scale, "multiply every load")->check(CLI::PositiveNumber);
  }

  Scenario load() const {
    Scenario s;
    if (!scenario.empty()) {
      s = load_scenario(scenario, load_scale);
    } else {
      if (case_path.empty()) throw ExitWith{kExitUsage, "either --scenario or --case is required"};
      const GridCase g = GridCase::load(case_path);
      s.grid = load_scale == 1.0 ? g : g.with_load_scale(load_scale);
      s.id = fs::path(case_path).stem().string();
      s.z0 = s.grid.initial_topology();
    }
    if (!z0.empty()) s.z0 = read_topology(z0);
    if (!zT.empty()) s.zT = read_topology(zT);
    if (!pg.empty()) s.pg = dispatch_from_json(s.grid, read_json_file(pg));
    s.grid.check_topology(s.z0);
    if (s.zT) s.grid.check_topology(*s.zT);
    return s;
  }
};

SwitchMode parse_mode(const std::string& m) { return m == "as" ? SwitchMode::as : SwitchMode::ss; }

struct ModelArgs {
  std::string config, mode;
  std::optional<std::size_t> T_u, n_e;
  bool necessary_only = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "run configuration JSON");
    app->add_option("--mode", mode, "switching mode")->check(CLI::IsMember({"ss", "as"}));
    app->add_option("--Tu", T_u, "topology-count horizon")->check(CLI::PositiveNumber);
    app->add_option("--ne", n_e, "extra switching actions allowed");
    app->add_flag("--necessary-only", necessary_only, "switch only branches that differ");
  }

  RunConfig load() const {
    RunConfig c = config.empty() ? RunConfig{} : load_run_config(config);
    if (!mode.empty()) c.ott.mode = parse_mode(mode);
    if (T_u) c.ott.T_u = *T_u;
    if (n_e) c.ott.n_e = *n_e;
    if (necessary_only) c.ott.necessary_only = true;
    if (c.ott.durations.size() + 1 != c.ott.T_u && !c.ott.durations.empty()) c.ott.durations.resize(c.ott.T_u - 1, 1.0);
    c.tetop.ott = c.ott;
    return c;
  }
};

std::vector<double> frozen_dispatch(const Scenario& s, const Topology& zT, const DriverOptions& opts) {
  return s.pg ? *s.pg : dispatch_at(s.grid, zT, opts);
}

// --- commands ----------------------------------------------------------------

int cmd_solve_ots(const ScenarioArgs& sa, const ModelArgs& ma, std::optional<std::size_t> n_s,
                  std::size_t n_s_min, const std::string& out) {
  const Scenario s = sa.load();
  const RunConfig cfg = ma.load();
  const std::size_t budget = n_s.value_or(cfg.tetop.n_s);
  const OtsResult r = solve_ots(s.grid, s.z0, budget, n_s_min, cfg.driver, cfg.ott.big_m_floor);
  json j;
  j["status"] = milp::to_string(r.status);
  j["nodes"] = r.nodes;
  j["seconds"] = r.seconds;
  if (r.has_solution()) {
    j["topology"] = topology_to_json(r.solution.z);
    j["pg"] = r.solution.pg;
    j["cost"] = r.solution.cost;
  }
  emit_json(j, out);
  if (!r.has_solution()) {
    std::cerr << milp::to_string(r.status) << "\n";
    return exit_for(r.status) == kExitOk ? kExitInfeasible : exit_for(r.status);
  }
  return exit_for(r.status);
}

int cmd_solve_ott(const ScenarioArgs& sa, const ModelArgs& ma, const std::string& algorithm,
                  const std::string& mps, const std::string& out, const std::string& report) {
  const Scenario s = sa.load();
  if (!s.zT) throw ExitWith{kExitUsage, "solve-ott needs a terminal topology (--zT or scenario zT)"};
  const RunConfig cfg = ma.load();
  const std::vector<double> pg = frozen_dispatch(s, *s.zT, cfg.driver);
  if (!mps.empty()) {
    cfg.ott.validate(s.grid);
    milp::export_mps(formulations::build_ott(s.grid, s.z0, *s.zT, pg, cfg.ott), mps);
    return kExitOk;
  }
  const OttResult r = algorithm == "alg1" ? algorithm1(s.grid, s.z0, *s.zT, pg, cfg.ott, cfg.driver)
                                          : solve_ott_direct(s.grid, s.z0, *s.zT, pg, cfg.ott, cfg.driver,
                                                             {cfg.ott.mode == SwitchMode::ss
                                                                  ? adhoc_syn(s.z0, *s.zT)
                                                                  : adhoc_asy(s.grid, s.z0, *s.zT)});
  json j;
  j["status"] = milp::to_string(r.status);
  j["algorithm"] = algorithm;
  j["objective"] = r.objective;
  j["T_u"] = r.T_u;
  j["nodes"] = r.nodes;
  j["lp_iterations"] = r.lp_iterations;
  j["seconds"] = r.seconds;
  j["second_pass"] = r.second_pass;
  j["runs"] = runs_json(r.runs);
  j["pg"] = pg;
  if (r.has_solution()) {
    j["T"] = r.decision.T;
    j["trajectory"] = trajectory_to_json(s.grid, r.decision.trajectory);
    j["report"] = report_json(r.report);
    if (!report.empty()) emit_text(report_csv(r.report, r.objective), report);
  }
  emit_json(j, out);
  if (!r.has_solution()) {
    std::cerr << milp::to_string(r.status) << "\n";
    return exit_for(r.status) == kExitOk ? kExitInfeasible : exit_for(r.status);
  }
  return exit_for(r.status);
}

int cmd_solve_tetop(const ScenarioArgs& sa, const ModelArgs& ma, const std::string& algorithm,
                    std::optional<std::size_t> n_s, std::optional<std::size_t> n_s_min, bool single_switch,
                    const std::string& mps, const std::string& out, const std::string& report) {
  const Scenario s = sa.load();
  RunConfig cfg = ma.load();
  if (n_s) cfg.tetop.n_s = *n_s;
  if (n_s_min) cfg.tetop.n_s_min = *n_s_min;
  if (single_switch) cfg.tetop.ott.single_switch_batches = true;
  if (!mps.empty()) {
    cfg.tetop.validate(s.grid);
    milp::export_mps(formulations::build_tetop(s.grid, s.z0, cfg.tetop), mps);
    return kExitOk;
  }
  const TetopResult r = algorithm == "alg1" ? tetop_algorithm1(s.grid, s.z0, cfg.tetop, cfg.driver)
                                            : solve_tetop_direct(s.grid, s.z0, cfg.tetop, cfg.driver);
  json j;
  j["status"] = milp::to_string(r.status);
  j["algorithm"] = algorithm;
  j["objective"] = r.objective;
  j["T_u"] = r.T_u;
  j["nodes"] = r.nodes;
  j["seconds"] = r.seconds;
  j["runs"] = runs_json(r.runs);
  if (r.has_solution()) {
    j["T"] = r.decision.T;
    j["terminal"] = topology_to_json(r.decision.terminal);
    j["pg"] = r.decision.pg;
    j["dispatch_cost"] = r.dispatch_cost;
    j["trajectory"] = trajectory_to_json(s.grid, r.decision.trajectory);
    j["report"] = report_json(r.report);
    if (!report.empty()) emit_text(report_csv(r.report, r.objective), report);
  }
  emit_json(j, out);
  if (!r.has_solution()) {
    std::cerr << milp::to_string(r.status) << "\n";
    return exit_for(r.status) == kExitOk ? kExitInfeasible : exit_for(r.status);
  }
  return exit_for(r.status);
}

int cmd_adhoc(const std::string& kind, const ScenarioArgs& sa, const ModelArgs& ma, const std::string& order_path,
              const std::string& out, const std::string& report) {
  const Scenario s = sa.load();
  if (!s.zT) throw ExitWith{kExitUsage, "adhoc needs a terminal topology"};
  RunConfig cfg = ma.load();
  Trajectory traj;
  if (kind == "syn") {
    traj = adhoc_syn(s.z0, *s.zT);
  } else if (kind == "asy") {
    traj = adhoc_asy(s.grid, s.z0, *s.zT);
    cfg.ott.mode = SwitchMode::as;
  } else {
    std::optional<std::vector<std::size_t>> order;
    if (!order_path.empty()) {
      order.emplace();
      // Inline array or a file holding one.
      const json ids = order_path.front() == '[' ? json::parse(order_path) : read_json_file(order_path);
      for (int id : ids.get<std::vector<int>>()) order->push_back(s.grid.branch_index(id));
    }
    traj = adhoc_one(s.z0, *s.zT, order);
  }
  const std::vector<double> pg = frozen_dispatch(s, *s.zT, cfg.driver);
  const MetricReport rep = validate_trajectory(s.grid, traj, pg, cfg.ott.mode, dcflow::Condition4Mode::assumption,
                                               cfg.ott.property_weights);
  const double obj = model_objective(rep, cfg.ott.weights);
  json j;
  j["kind"] = kind;
  j["T"] = traj.T();
  j["objective"] = obj;
  j["pg"] = pg;
  j["trajectory"] = trajectory_to_json(s.grid, traj);
  j["report"] = report_json(rep);
  emit_json(j, out);
  if (!report.empty()) emit_text(report_csv(rep, obj), report);
  return kExitOk;
}

int cmd_validate(const ScenarioArgs& sa, const ModelArgs& ma, const std::string& traj_path, const std::string& c4,
                 std::size_t cap, const std::string& out, const std::string& report) {
  const Scenario s = sa.load();
  const RunConfig cfg = ma.load();
  const json tj = read_json_file(traj_path);
  const Trajectory traj = read_trajectory(tj);
  for (const Topology& z : traj.topologies) s.grid.check_topology(z);
  std::vector<double> pg;
  if (s.pg) pg = *s.pg;
  else if (tj.is_object() && tj.contains("pg")) pg = dispatch_from_json(s.grid, tj.at("pg"));
  else pg = dispatch_at(s.grid, traj.topologies.back(), cfg.driver);
  const auto mode = c4 == "exhaustive" ? dcflow::Condition4Mode::exhaustive : dcflow::Condition4Mode::assumption;
  const MetricReport rep = validate_trajectory(s.grid, traj, pg, cfg.ott.mode, mode, cfg.ott.property_weights, cap);
  const double obj = model_objective(rep, cfg.ott.weights);
  json j = report_json(rep);
  j["objective"] = obj;
  j["condition4_mode"] = c4;
  emit_json(j, out);
  if (!report.empty()) emit_text(report_csv(rep, obj), report);
  return kExitOk;
}

int cmd_rho(const std::vector<std::string>& scenarios, const std::vector<std::string>& trajectories,
            const ModelArgs& ma, const std::string& mode, std::optional<std::size_t> samples,
            std::optional<std::uint64_t> seed, std::optional<std::size_t> cap, const std::string& out) {
  if (scenarios.size() != trajectories.size())
    throw ExitWith{kExitUsage, "give one --trajectory per --scenario"};
  RunConfig cfg = ma.load();
  if (!mode.empty()) cfg.rho.mode = mode == "sample" ? mcheck::RhoMode::sample : mcheck::RhoMode::exhaustive;
  if (samples) cfg.rho.samples = *samples;
  if (seed) cfg.rho.seed = *seed;
  if (cap) cfg.rho.cap = *cap;

  std::vector<Scenario> loaded;
  loaded.reserve(scenarios.size());
  std::vector<mcheck::RhoScenario> input;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    loaded.push_back(load_scenario(scenarios[i]));
    const Scenario& s = loaded.back();
    const json tj = read_json_file(trajectories[i]);
    mcheck::RhoScenario rs;
    rs.id = s.id;
    rs.grid = &s.grid;
    rs.trajectory = read_trajectory(tj);
    if (tj.is_object() && tj.contains("pg")) rs.pg = dispatch_from_json(s.grid, tj.at("pg"));
    else if (s.pg) rs.pg = *s.pg;
    else rs.pg = dispatch_at(s.grid, rs.trajectory.topologies.back(), cfg.driver);
    input.push_back(std::move(rs));
  }
  const mcheck::RhoResult r = mcheck::rho_probability(input, cfg.rho);
  std::ostringstream os;
  mcheck::write_rho_csv(os, r);
  emit_text(os.str(), out);
  std::cerr << "rho " << fmt9(r.rho) << " se " << fmt9(r.standard_error)
            << (r.no_intermediates ? " (no intermediates)" : "") << "\n";
  return kExitOk;
}

// --- batch -------------------------------------------------------------------

using Record = std::map<std::string, double>;

constexpr double kHpTol = 1e-6;

Record run_batch_job(const Scenario& s, const RunConfig& base) {
  Record rec;
  const bool with_as = s.grid.num_agents() > 0;
  const ModelComparison ss = [&] {
    TetopConfig t = base.tetop;
    t.ott.mode = SwitchMode::ss;
    return run_models_123(s.grid, s.z0, t, base.driver);
  }();
  if (!ss.ots.has_solution()) {
    rec["ots_feasible"] = 0;
    return rec;
  }
  rec["ots_feasible"] = 1;
  rec["ots_cost"] = ss.ots.solution.cost;

  Topology zT = ss.ots.solution.z;
  std::vector<double> pg = ss.ots.solution.pg;
  if (s.zT) {
    zT = *s.zT;
    pg = s.pg ? *s.pg : dispatch_at(s.grid, zT, base.driver);
  }
  rec["terminal_changes"] = static_cast<double>(hamming_distance(s.z0, zT));

  const auto put_report = [&](const std::string& p, const MetricReport& r) {
    rec[p + "_H_p"] = r.H_p;
    rec[p + "_H_b"] = r.H_b;
    rec[p + "_H_v"] = r.H_v;
  };
  put_report("one", validate_trajectory(s.grid, adhoc_one(s.z0, zT), pg, SwitchMode::ss,
                                        dcflow::Condition4Mode::assumption, base.ott.property_weights));

  const auto per_mode = [&](SwitchMode mode, const std::string& tag, const ModelComparison& mc) {
    OttConfig c = base.ott;
    c.mode = mode;
    const Trajectory adhoc = mode == SwitchMode::ss ? adhoc_syn(s.z0, zT) : adhoc_asy(s.grid, s.z0, zT);
    put_report("adhoc_" + tag, validate_trajectory(s.grid, adhoc, pg, mode, dcflow::Condition4Mode::assumption,
                                                   c.property_weights));
    const OttResult ott = algorithm1(s.grid, s.z0, zT, pg, c, base.driver);
    rec["ott_" + tag + "_solved"] = ott.has_solution();
    if (ott.has_solution()) put_report("ott_" + tag, ott.report);
    rec["critical_" + tag] = mc.model1.second_pass || !mc.model1.has_solution();
    rec["model1_" + tag + "_H_p"] = mc.model1.has_solution() ? mc.model1.report.H_p : milp::kInf;
    rec["model2_" + tag + "_solved"] = mc.model2.has_solution();
    rec["model3_" + tag + "_solved"] = mc.model3.has_solution();
    if (mc.model2.has_solution()) {
      rec["model2_" + tag + "_H_p"] = mc.model2.report.H_p;
      rec["r_f2_" + tag] = mc.r_f2;
    }
    if (mc.model3.has_solution()) rec["r_f3_" + tag] = mc.r_f3;
  };
  per_mode(SwitchMode::ss, "ss", ss);
  rec["has_agents"] = with_as;
  if (with_as) {
    TetopConfig t = base.tetop;
    t.ott.mode = SwitchMode::as;
    per_mode(SwitchMode::as, "as", run_models_123(s.grid, s.z0, t, base.driver));
  }
  return rec;
}

void write_record(const fs::path& path, const std::string& id, double scale, const Record& rec,
                  const std::string& error) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "key,value\nid," << id << "\nscale," << fmt9(scale) << "\n";
  if (!error.empty()) out << "error," << error << "\n";
  for (const auto& [k, v] : rec) out << k << ',' << fmt9(v) << '\n';
}

Record read_record(const fs::path& path, std::string& error) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path.string());
  Record rec;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    const std::string key = line.substr(0, comma), val = line.substr(comma + 1);
    if (key == "id" || key == "scale") continue;
    if (key == "error") {
      error = val;
      continue;
    }
    rec[key] = val == "inf" ? milp::kInf : std::stod(val);
  }
  return rec;
}

struct Ratio {
  std::size_t num = 0, den = 0;
  double value() const { return den == 0 ? std::nan("") : static_cast<double>(num) / static_cast<double>(den); }
};

std::string batch_metrics_csv(const std::vector<Record>& recs) {
  std::ostringstream os;
  os << "metric,value,numerator,denominator\n";
  const auto row = [&](const std::string& name, const Ratio& r) {
    os << name << ',' << fmt9(r.value()) << ',' << r.num << ',' << r.den << '\n';
  };
  const auto get = [](const Record& r, const std::string& k, double fallback = std::nan("")) {
    const auto it = r.find(k);
    return it == r.end() ? fallback : it->second;
  };
  std::vector<const Record*> ok;
  for (const Record& r : recs)
    if (get(r, "ots_feasible", 0) == 1) ok.push_back(&r);

  Ratio r1o;
  for (const Record* r : ok) {
    ++r1o.den;
    if (get(*r, "one_H_p") > kHpTol) ++r1o.num;
  }
  for (const std::string tag : {"ss", "as"}) {
    const char suffix = tag == "ss" ? 's' : 'a';
    const auto name = [&](const std::string& base) { return base + suffix; };
    Ratio r1, r2, r3, r4, r5, r6, r7;
    double e1 = std::nan(""), e2 = std::nan("");
    for (const Record* r : ok) {
      if (tag == "as" && get(*r, "has_agents", 0) != 1) continue;
      const double hp_adhoc = get(*r, "adhoc_" + tag + "_H_p");
      const bool ott_ok = get(*r, "ott_" + tag + "_solved", 0) == 1;
      ++r1.den;
      if (hp_adhoc > kHpTol) {
        ++r1.num;
        ++r2.den;
        if (ott_ok) {
          const double hp_ott = get(*r, "ott_" + tag + "_H_p");
          if (hp_ott <= kHpTol) ++r2.num;
          const double ratio = hp_ott / hp_adhoc;
          if (std::isnan(e1) || ratio > e1) e1 = ratio;
        }
      }
      ++r4.den;
      if (ott_ok && get(*r, "ott_" + tag + "_H_b") < get(*r, "adhoc_" + tag + "_H_b") - 1e-9 &&
          get(*r, "ott_" + tag + "_H_v") < get(*r, "adhoc_" + tag + "_H_v") - 1e-9)
        ++r4.num;
      ++r3.den;
      if (get(*r, "critical_" + tag, 0) == 1) {
        ++r3.num;
        ++r5.den;
        if (get(*r, "model1_" + tag + "_H_p") > kHpTol && get(*r, "model2_" + tag + "_solved", 0) == 1 &&
            get(*r, "model2_" + tag + "_H_p") <= kHpTol)
          ++r5.num;
      }
      if (get(*r, "model2_" + tag + "_solved", 0) == 1) {
        const double rf2 = get(*r, "r_f2_" + tag);
        ++r6.den;
        if (rf2 < 2e-3) ++r6.num;
        if (std::isnan(e2) || rf2 > e2) e2 = rf2;
        if (get(*r, "model3_" + tag + "_solved", 0) == 1) {
          ++r7.den;
          if (get(*r, "r_f3_" + tag) > rf2 + 1e-9) ++r7.num;
        }
      }
    }
    row(name("r_1"), r1);
    if (tag == "ss") row("r_1o", r1o);
    row(name("r_2"), r2);
    os << name("e_1") << ',' << fmt9(e1) << ",," << r2.den << '\n';
    row(name("r_3"), r3);
    row(name("r_4"), r4);
    row(name("r_5"), r5);
    row(name("r_6"), r6);
    os << name("e_2") << ',' << fmt9(e2) << ",," << r6.den << '\n';
    row(name("r_7"), r7);
  }
  return os.str();
}

int cmd_batch(const std::vector<std::string>& scenarios, std::vector<double> scales, const std::string& profile,
              const ModelArgs& ma, const std::string& out_dir, int threads, const std::string& out) {
  if (scenarios.empty()) throw ExitWith{kExitUsage, "batch needs at least one --scenario"};
  if (!profile.empty()) scales = read_json_file(profile).get<std::vector<double>>();
  if (scales.empty()) scales = {1.0};
  for (double f : scales)
    if (!(f > 0)) throw ExitWith{kExitUsage, "load scales must be positive"};
  const RunConfig cfg = ma.load();
  fs::create_directories(out_dir);

  struct Job {
    std::string scenario;
    double scale;
    fs::path file;
  };
  std::vector<Job> jobs;
  for (const std::string& sc : scenarios)
    for (std::size_t k = 0; k < scales.size(); ++k)
      jobs.push_back({sc, scales[k],
                      fs::path(out_dir) / (fs::path(sc).stem().string() + "_" + std::to_string(k) + ".csv")});

  std::vector<std::string> io_errors(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(jobs.size()); ++i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    Record rec;
    std::string error, id = fs::path(job.scenario).stem().string();
    try {
      const Scenario s = load_scenario(job.scenario, job.scale);
      id = s.id;
      rec = run_batch_job(s, cfg);
    } catch (const std::exception& e) {
      error = e.what();
    }
    try {
      write_record(job.file, id, job.scale, rec, error);
    } catch (const std::exception& e) {
      io_errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const std::string& e : io_errors)
    if (!e.empty()) throw InvalidInput(e);

  std::vector<Record> recs;
  for (const Job& job : jobs) {
    std::string error;
    Record r = read_record(job.file, error);
    if (!error.empty()) {
      std::cerr << job.file.string() << ": " << error << "\n";
      continue;
    }
    recs.push_back(std::move(r));
  }
  const std::string csv = batch_metrics_csv(recs);
  emit_text(csv, (fs::path(out_dir) / "metrics.csv").string());
  emit_text(csv, out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal topology transition planning for DC power networks"};
  app.require_subcommand(1);

  ScenarioArgs sa;
  ModelArgs ma;
  std::string out, report, algorithm = "direct", mps;

  auto* ots = app.add_subcommand("solve-ots", "optimal transmission switching from z0");
  sa.attach(ots);
  ma.attach(ots);
  std::optional<std::size_t> n_s, n_s_min_opt;
  std::size_t n_s_min = 0;
  ots->add_option("--ns", n_s, "switching budget relative to z0");
  ots->add_option("--ns-min", n_s_min, "minimum number of switched-on branches");
  ots->add_option("--out", out, "output JSON (default stdout)");

  auto* ott = app.add_subcommand("solve-ott", "optimal transition trajectory between z0 and zT");
  sa.attach(ott);
  ma.attach(ott);
  ott->add_option("--algorithm", algorithm, "direct solve or progressive horizon")
      ->check(CLI::IsMember({"direct", "alg1"}));
  ott->add_option("--export-mps", mps, "write the model as MPS and exit without solving");
  ott->add_option("--out", out, "output JSON (default stdout)");
  ott->add_option("--report", report, "metric report CSV");

  auto* tetop = app.add_subcommand("solve-tetop", "transition-embedded topology optimization");
  sa.attach(tetop);
  ma.attach(tetop);
  bool single_switch = false;
  tetop->add_option("--algorithm", algorithm, "direct solve or progressive horizon")
      ->check(CLI::IsMember({"direct", "alg1"}));
  tetop->add_option("--ns", n_s, "terminal switching budget relative to z0");
  tetop->add_option("--ns-min", n_s_min_opt, "minimum number of switched-on branches");
  tetop->add_flag("--single-switch", single_switch, "at most one switching action per batch");
  tetop->add_option("--export-mps", mps, "write the model as MPS and exit without solving");
  tetop->add_option("--out", out, "output JSON (default stdout)");
  tetop->add_option("--report", report, "metric report CSV");

  auto* adhoc = app.add_subcommand("adhoc", "ad hoc trajectory and its metrics");
  std::string kind, order;
  adhoc->add_option("kind", kind, "syn, asy or one")->required()->check(CLI::IsMember({"syn", "asy", "one"}));
  sa.attach(adhoc);
  ma.attach(adhoc);
  adhoc->add_option("--order", order, "branch ids giving the switching order (one), inline JSON array or file");
  adhoc->add_option("--out", out, "output JSON (default stdout)");
  adhoc->add_option("--report", report, "metric report CSV");

  auto* validate = app.add_subcommand("validate", "check a trajectory against the transition conditions");
  std::string traj_path, c4 = "assumption";
  std::size_t cap = VariantSpace::kDefaultCap;
  sa.attach(validate);
  ma.attach(validate);
  validate->add_option("--trajectory", traj_path, "trajectory JSON")->required();
  validate->add_option("--condition4", c4, "intermediate-topology check")
      ->check(CLI::IsMember({"exhaustive", "assumption"}));
  validate->add_option("--cap", cap, "largest batch enumerated exhaustively");
  validate->add_option("--out", out, "output JSON (default stdout)");
  validate->add_option("--report", report, "metric report CSV");

  auto* rho = app.add_subcommand("rho", "intermediate-topology violation probability");
  std::vector<std::string> rho_scenarios, rho_trajs;
  std::string rho_mode;
  std::optional<std::size_t> samples, rho_cap;
  std::optional<std::uint64_t> seed;
  rho->add_option("--scenario", rho_scenarios, "scenario JSON (repeatable)")->required();
  rho->add_option("--trajectory", rho_trajs, "trajectory JSON, one per scenario")->required();
  rho->add_option("--config", ma.config, "run configuration JSON");
  rho->add_option("--rho-mode", rho_mode, "exhaustive or sample")->check(CLI::IsMember({"exhaustive", "sample"}));
  rho->add_option("--samples", samples, "draws per batch in sample mode");
  rho->add_option("--seed", seed, "sampling seed");
  rho->add_option("--cap", rho_cap, "largest batch enumerated exhaustively");
  rho->add_option("--out", out, "output CSV (default stdout)");

  auto* batch = app.add_subcommand("batch", "ratio metrics over load-scaled scenarios");
  std::vector<std::string> batch_scenarios;
  std::vector<double> scales;
  std::string profile, out_dir;
  int threads = 1;
  batch->add_option("--scenario", batch_scenarios, "scenario JSON (repeatable)")->required();
  batch->add_option("--scales", scales, "load scaling factors")->delimiter(',');
  batch->add_option("--profile", profile, "JSON array of load scaling factors");
  batch->add_option("--config", ma.config, "run configuration JSON");
  batch->add_option("--out-dir", out_dir, "directory for per-scenario results")->required();
  batch->add_option("--threads", threads, "worker threads");
  batch->add_option("--out", out, "metrics CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ots) return cmd_solve_ots(sa, ma, n_s, n_s_min, out);
    if (*ott) return cmd_solve_ott(sa, ma, algorithm, mps, out, report);
    if (*tetop) return cmd_solve_tetop(sa, ma, algorithm, n_s, n_s_min_opt, single_switch, mps, out, report);
    if (*adhoc) return cmd_adhoc(kind, sa, ma, order, out, report);
    if (*validate) return cmd_validate(sa, ma, traj_path, c4, cap, out, report);
    if (*rho) return cmd_rho(rho_scenarios, rho_trajs, ma, rho_mode, samples, seed, rho_cap, out);
    if (*batch) return cmd_batch(batch_scenarios, scales, profile, ma, out_dir, threads, out);
  } catch (const ExitWith& e) {
    std::cerr << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
