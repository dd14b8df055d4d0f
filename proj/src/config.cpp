#include "ott/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ott/error.hpp"

namespace ott {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
  }
}

SwitchMode parse_mode(const std::string& s) {
  if (s == "ss" || s == "SS") return SwitchMode::ss;
  if (s == "as" || s == "AS") return SwitchMode::as;
  throw InvalidInput("mode must be 'ss' or 'as'");
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j,
                 {"T_u", "mode", "weights", "property_weights", "n_e", "durations", "big_m_floor", "boundedness",
                  "necessary_only", "single_switch_batches", "tetop", "solver", "rho"},
                 "config");
  RunConfig c;
  OttConfig& o = c.ott;
  read(j, "T_u", o.T_u);
  if (j.contains("mode")) o.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    reject_unknown(w, {"alpha_b", "alpha_v", "alpha_c", "alpha_p", "alpha_n"}, "weights");
    read(w, "alpha_b", o.weights.alpha_b);
    read(w, "alpha_v", o.weights.alpha_v);
    read(w, "alpha_c", o.weights.alpha_c);
    read(w, "alpha_p", o.weights.alpha_p);
    read(w, "alpha_n", o.weights.alpha_n);
  }
  if (j.contains("property_weights")) {
    const json& w = j.at("property_weights");
    reject_unknown(w, {"w_b_flow", "w_v_flow", "w_b_angle", "w_v_angle"}, "property_weights");
    read(w, "w_b_flow", o.property_weights.w_b_flow);
    read(w, "w_v_flow", o.property_weights.w_v_flow);
    read(w, "w_b_angle", o.property_weights.w_b_angle);
    read(w, "w_v_angle", o.property_weights.w_v_angle);
  }
  read(j, "n_e", o.n_e);
  read(j, "durations", o.durations);
  read(j, "big_m_floor", o.big_m_floor);
  if (j.contains("boundedness")) {
    const std::string b = j.at("boundedness").get<std::string>();
    if (b == "l1") o.boundedness = BoundednessVariant::l1;
    else if (b == "quadratic") o.boundedness = BoundednessVariant::quadratic_export;
    else throw InvalidInput("boundedness must be 'l1' or 'quadratic'");
  }
  read(j, "necessary_only", o.necessary_only);
  read(j, "single_switch_batches", o.single_switch_batches);

  if (j.contains("tetop")) {
    const json& t = j.at("tetop");
    reject_unknown(t, {"beta", "n_s", "n_s_min"}, "tetop");
    read(t, "beta", c.tetop.beta);
    read(t, "n_s", c.tetop.n_s);
    read(t, "n_s_min", c.tetop.n_s_min);
  }
  c.tetop.ott = o;

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, {"gap", "node_limit", "time_limit_seconds", "max_iterations", "slack_tolerance"}, "solver");
    read(s, "gap", c.driver.bb.gap);
    read(s, "node_limit", c.driver.bb.node_limit);
    read(s, "time_limit_seconds", c.driver.bb.time_limit_seconds);
    read(s, "max_iterations", c.driver.max_iterations);
    read(s, "slack_tolerance", c.driver.slack_tolerance);
  }
  if (j.contains("rho")) {
    const json& r = j.at("rho");
    reject_unknown(r, {"mode", "samples", "seed", "cap"}, "rho");
    if (r.contains("mode")) {
      const std::string m = r.at("mode").get<std::string>();
      if (m == "exhaustive") c.rho.mode = mcheck::RhoMode::exhaustive;
      else if (m == "sample") c.rho.mode = mcheck::RhoMode::sample;
      else throw InvalidInput("rho mode must be 'exhaustive' or 'sample'");
    }
    read(r, "samples", c.rho.samples);
    read(r, "seed", c.rho.seed);
    read(r, "cap", c.rho.cap);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const RunConfig& c) {
  const OttConfig& o = c.ott;
  json j;
  j["T_u"] = o.T_u;
  j["mode"] = o.mode == SwitchMode::ss ? "ss" : "as";
  j["weights"] = {{"alpha_b", o.weights.alpha_b}, {"alpha_v", o.weights.alpha_v}, {"alpha_c", o.weights.alpha_c},
                  {"alpha_p", o.weights.alpha_p}, {"alpha_n", o.weights.alpha_n}};
  json pw = json::object();
  if (!o.property_weights.w_b_flow.empty()) pw["w_b_flow"] = o.property_weights.w_b_flow;
  if (!o.property_weights.w_v_flow.empty()) pw["w_v_flow"] = o.property_weights.w_v_flow;
  if (!o.property_weights.w_b_angle.empty()) pw["w_b_angle"] = o.property_weights.w_b_angle;
  if (!o.property_weights.w_v_angle.empty()) pw["w_v_angle"] = o.property_weights.w_v_angle;
  j["property_weights"] = pw;
  j["n_e"] = o.n_e;
  j["durations"] = o.durations;
  j["big_m_floor"] = o.big_m_floor;
  j["boundedness"] = o.boundedness == BoundednessVariant::l1 ? "l1" : "quadratic";
  j["necessary_only"] = o.necessary_only;
  j["single_switch_batches"] = o.single_switch_batches;
  j["tetop"] = {{"beta", c.tetop.beta}, {"n_s", c.tetop.n_s}, {"n_s_min", c.tetop.n_s_min}};
  json solver = {{"gap", c.driver.bb.gap},
                 {"node_limit", c.driver.bb.node_limit},
                 {"max_iterations", c.driver.max_iterations},
                 {"slack_tolerance", c.driver.slack_tolerance}};
  if (std::isfinite(c.driver.bb.time_limit_seconds)) solver["time_limit_seconds"] = c.driver.bb.time_limit_seconds;
  j["solver"] = solver;
  j["rho"] = {{"mode", c.rho.mode == mcheck::RhoMode::exhaustive ? "exhaustive" : "sample"},
              {"samples", c.rho.samples},
              {"seed", c.rho.seed},
              {"cap", c.rho.cap}};
  return j;
}

}  // namespace ott
