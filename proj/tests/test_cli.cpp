#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "support/cases.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
  if (const char* p = std::getenv("OTT_CLI")) return p;
  return OTT_CLI_PATH;
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("ott_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(const std::string& args) {
  const fs::path o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
  const std::string cmd = "\"" + cli() + "\" " + args + " >\"" + o.string() + "\" 2>\"" + e.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

std::string data(const std::string& rel) { return "\"" + ott::testing::data_path(rel) + "\""; }

fs::path write(const std::string& name, const json& j) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << j.dump(1);
  return p;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("--help").code == 0);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("solve-ots").code == 1);
  CHECK(run("solve-ots --scenario /nonexistent/scenario.json").code == 1);
  CHECK(run("solve-ott --scenario " + data("scenarios/five_bus_fig2.json") + " --mode xx").code == 1);
  const fs::path bad = write("bad_config.json", json{{"no_such_key", 1}});
  CHECK(run("solve-ott --scenario " + data("scenarios/five_bus_fig2.json") + " --config \"" + bad.string() + "\"")
            .code == 1);
}

TEST_CASE("solve-ots") {
  const Run r = run("solve-ots --scenario " + data("scenarios/four_bus_swap.json"));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("status") == "optimal");
  CHECK(j.at("cost").get<double>() == doctest::Approx(2.3));
  CHECK(j.at("topology") == json({1, 1, 1, 0, 1}));
  CHECK(run("solve-ots --scenario " + data("scenarios/four_bus_swap.json") + " --load-scale 1.5").code == 2);
}

TEST_CASE("solve-ott writes a trajectory that validate accepts") {
  const fs::path out = scratch() / "ott.json", rep = scratch() / "ott_report.csv";
  const Run r = run("solve-ott --scenario " + data("scenarios/five_bus_fig2.json") + " --Tu 2 --out \"" +
                    out.string() + "\" --report \"" + rep.string() + "\"");
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("status") == "optimal");
  CHECK(j.at("report").at("H_p").get<double>() <= 1e-9);
  CHECK(j.at("T").get<int>() == 2);
  CHECK_FALSE(slurp(rep).empty());

  const fs::path traj = write("traj.json", j.at("trajectory"));
  const Run v = run("validate --scenario " + data("scenarios/five_bus_fig2.json") + " --trajectory \"" +
                    traj.string() + "\"");
  REQUIRE(v.code == 0);
  const json vj = json::parse(v.out);
  CHECK(vj.at("condition1") == true);

  const Run a = run("solve-ott --scenario " + data("scenarios/five_bus_fig2.json") + " --Tu 2 --algorithm alg1");
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out).at("objective").get<double>() ==
        doctest::Approx(j.at("objective").get<double>()).epsilon(1e-9));
}

TEST_CASE("solve-ott reports infeasible and limit exits") {
  // One batch cannot keep the five-bus network connected.
  CHECK(run("solve-ott --scenario " + data("scenarios/five_bus_fig2.json") + " --Tu 1").code == 2);
  const fs::path cfg = write("limit.json", json{{"solver", {{"node_limit", 1}}}});
  const Run r = run("solve-ott --scenario " + data("scenarios/five_bus_tight.json") + " --Tu 4 --config \"" +
                    cfg.string() + "\"");
  CHECK(r.code == 3);
}

TEST_CASE("mps export") {
  const fs::path mps = scratch() / "model.mps";
  REQUIRE(run("solve-ott --scenario " + data("scenarios/five_bus_fig2.json") + " --Tu 2 --export-mps \"" +
              mps.string() + "\"")
              .code == 0);
  const std::string text = slurp(mps);
  CHECK(text.find("ROWS") != std::string::npos);
  CHECK(text.find("ENDATA") != std::string::npos);
  const fs::path tmps = scratch() / "tetop.mps";
  CHECK(run("solve-tetop --scenario " + data("scenarios/four_bus_swap.json") + " --Tu 2 --export-mps \"" +
            tmps.string() + "\"")
            .code == 0);
  CHECK(fs::file_size(tmps) > 0);
}

TEST_CASE("solve-tetop") {
  const Run r = run("solve-tetop --scenario " + data("scenarios/four_bus_swap.json") + " --Tu 2");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("dispatch_cost").get<double>() == doctest::Approx(2.35));
  CHECK(j.at("terminal") == json({1, 1, 1, 1, 0}));
  CHECK(j.at("report").at("H_p").get<double>() == 0.0);
}

TEST_CASE("adhoc orders") {
  for (const char* kind : {"syn", "asy", "one"}) {
    const Run r = run(std::string("adhoc ") + kind + " --scenario " + data("scenarios/five_bus_fig2.json"));
    CAPTURE(kind);
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.contains("trajectory"));
    CHECK(j.contains("report"));
  }
  const Run o = run("adhoc one --scenario " + data("scenarios/five_bus_fig2.json") + " --order \"[3,7,5,2,6]\"");
  REQUIRE(o.code == 0);
  const json ob = json::parse(o.out).at("trajectory").at("batches");
  CHECK(ob.at(0).at("opened") == json({3}));
  CHECK(ob.at(4).at("closed") == json({6}));
  CHECK(run("adhoc one --scenario " + data("scenarios/five_bus_fig2.json") + " --order \"[5,6]\"").code == 1);
  CHECK(run("adhoc sideways --scenario " + data("scenarios/five_bus_fig2.json")).code == 1);
}

TEST_CASE("rho on the hand-built four-bus swap") {
  const fs::path sc =
      write("rho_scenario.json", json{{"case", ott::testing::data_path("cases/four_bus_rho.json")}});
  const fs::path tr = write("rho_traj.json", json{{"topologies", json::array({json({1, 1, 1, 0}), json({1, 0, 1, 1})})}});
  const Run r = run("rho --scenario \"" + sc.string() + "\" --trajectory \"" + tr.string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("total,,3,1,0.333333333") != std::string::npos);
  const Run s = run("rho --scenario \"" + sc.string() + "\" --trajectory \"" + tr.string() +
                    "\" --rho-mode sample --samples 2000 --seed 3");
  CHECK(s.code == 0);
  CHECK(s.err.find("se ") != std::string::npos);
  CHECK(run("rho --scenario \"" + sc.string() + "\"").code == 1);
}

TEST_CASE("batch metrics") {
  const fs::path dir = scratch() / "batch";
  const Run r = run("batch --scenario " + data("scenarios/four_bus_swap.json") + " --scales 0.8,1.0 --out-dir \"" +
                    dir.string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(r.out == slurp(dir / "metrics.csv"));
  CHECK(r.out.find("r_1s") != std::string::npos);
  CHECK(run("batch --scenario " + data("scenarios/four_bus_swap.json") + " --scales 0.8,-1 --out-dir \"" +
            dir.string() + "\"")
            .code == 1);
}
