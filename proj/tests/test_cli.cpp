#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fedswitch/config.hpp"

using namespace fedswitch;
namespace fs = std::filesystem;

namespace {

json base_config() {
  return json{
      {"problem",
       {{"type", "np_synthetic"},
        {"rows", 80},
        {"d_feat", 8},
        {"class_balance", 0.5},
        {"margin", 3.0},
        {"seed", 7},
        {"domain", {{"kind", "ball"}, {"radius", 10.0}}},
        {"partition", "iid"},
        {"batch_size", 0}}},
      {"rounds",
       {{"T", 6},
        {"E", 2},
        {"n", 4},
        {"m", 2},
        {"seed", 11},
        {"switch", {{"mode", "hard"}, {"epsilon", 0.3}}},
        {"compression",
         {{"enabled", true},
          {"uplink", {{"kind", "top_k"}, {"k", 2}}},
          {"downlink", {{"kind", "top_k"}, {"k", 4}}}}}}},
      {"params", {{"mode", "manual"}, {"eta", 0.05}}},
      {"output_dir", "out"},
      {"snapshot_cadence", 1},
      {"threads", 1}};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round-trips through parse and serialize") {
  const json original = base_config();
  const RunSpec spec = parse_run_spec(original);
  const json first = to_json(spec);
  const RunSpec reparsed = parse_run_spec(first);
  CHECK(to_json(reparsed) == first);
  CHECK(spec.T == 6);
  CHECK(spec.uplink.kind == "top_k");
  CHECK(spec.uplink.k == 2);
}

TEST_CASE("config errors carry field paths") {
  json bad = base_config();
  bad["rounds"].erase("T");
  CHECK_THROWS_WITH_AS(parse_run_spec(bad), doctest::Contains("rounds.T"), ConfigError);

  bad = base_config();
  bad["rounds"]["switch"]["mode"] = "fuzzy";
  CHECK_THROWS_WITH_AS(parse_run_spec(bad), doctest::Contains("rounds.switch.mode"),
                       ConfigError);

  bad = base_config();
  bad["params"]["eta"] = "fast";
  CHECK_THROWS_WITH_AS(parse_run_spec(bad), doctest::Contains("params.eta"), ConfigError);
}

TEST_CASE("theorem mode forbids manual step sizes and thresholds") {
  json cfg = base_config();
  cfg["params"] = {{"mode", "theorem"}, {"eta", 0.1}};
  CHECK_THROWS_WITH_AS(parse_run_spec(cfg), doctest::Contains("params.eta"), ConfigError);

  cfg["params"] = {{"mode", "theorem"}, {"delta", 0.1}};
  // switch.epsilon is still set in the base config: prepare_run must reject it
  const RunSpec spec = parse_run_spec(cfg);
  CHECK_THROWS_WITH_AS(prepare_run(spec), doctest::Contains("epsilon"), ConfigError);
}

TEST_CASE("theorem mode derives parameters from the problem") {
  json cfg = base_config();
  cfg["problem"] = {{"type", "linear_ball"}, {"d", 2},       {"direction", {1.0, 1.0}},
                    {"radius", 1.0},         {"halfwidth", 2.0}, {"perturbation", 0.25},
                    {"seed", 5}};
  cfg["rounds"]["n"] = 8;
  cfg["rounds"]["m"] = 8;
  cfg["rounds"]["T"] = 64;
  cfg["rounds"]["E"] = 4;
  cfg["rounds"].erase("compression");
  cfg["rounds"]["switch"] = {{"mode", "hard"}};
  cfg["params"] = {{"mode", "theorem"}};

  const RunSpec spec = parse_run_spec(cfg);
  const PreparedRun prep = prepare_run(spec);
  REQUIRE(prep.theorem.has_value());

  TheoremInputs ti;
  ti.D = diameter(prep.problem.domain);
  ti.G = prep.problem.lipschitz_G();
  ti.E = 4;
  ti.T = 64;
  ti.n = 8;
  ti.m = 8;
  const TheoremOutputs expected = theorem1_params(ti, Regime::full);
  CHECK(prep.round_config.eta == expected.eta);
  CHECK(prep.round_config.switch_mode.epsilon == expected.epsilon);
  CHECK(prep.theorem->gamma == expected.gamma);
}

TEST_CASE("theorem mode requires an explicit q for quantizers") {
  json cfg = base_config();
  cfg["rounds"]["compression"]["uplink"] = {{"kind", "uniform_quant"}, {"bits", 4}};
  cfg["rounds"]["switch"] = {{"mode", "hard"}};
  cfg["params"] = {{"mode", "theorem"}, {"delta", 0.1}};
  const RunSpec spec = parse_run_spec(cfg);
  CHECK_THROWS_WITH_AS(prepare_run(spec), doctest::Contains("params.q"), ConfigError);
}

TEST_CASE("theorem partial regime requires delta") {
  json cfg = base_config();
  cfg["rounds"]["switch"] = {{"mode", "hard"}};
  cfg["rounds"].erase("compression");
  cfg["params"] = {{"mode", "theorem"}};
  const RunSpec spec = parse_run_spec(cfg);  // m = 2 < n = 4: partial
  CHECK_THROWS_WITH_AS(prepare_run(spec), doctest::Contains("params.delta"), ConfigError);
}

TEST_CASE("soft mode needs beta unless the theorem provides epsilon") {
  json cfg = base_config();
  cfg["rounds"]["switch"] = {{"mode", "soft"}, {"epsilon", 0.3}};
  CHECK_THROWS_WITH_AS(prepare_run(parse_run_spec(cfg)), doctest::Contains("beta"),
                       ConfigError);

  cfg["rounds"]["switch"]["beta"] = 40.0;
  const PreparedRun prep = prepare_run(parse_run_spec(cfg));
  CHECK(prep.round_config.switch_mode.beta == 40.0);
}

TEST_CASE("theorem soft mode defaults beta to 2/epsilon") {
  json cfg = base_config();
  cfg["rounds"]["m"] = 4;  // full participation
  cfg["rounds"].erase("compression");
  cfg["rounds"]["switch"] = {{"mode", "soft"}};
  cfg["params"] = {{"mode", "theorem"}};
  const PreparedRun prep = prepare_run(parse_run_spec(cfg));
  const double eps = prep.round_config.switch_mode.epsilon;
  REQUIRE(eps > 0.0);
  CHECK(prep.round_config.switch_mode.beta == 2.0 / eps);
}

TEST_CASE("csv-backed problems flow through the config layer") {
  const fs::path csv = fs::temp_directory_path() / "fsw_cli_data.csv";
  {
    std::ofstream out(csv);
    for (int i = 0; i < 12; ++i)
      out << (i % 3) << "," << (i * 0.5 - 3.0) << "," << (i % 2) << "\n";
  }
  const fs::path dir = fresh_dir("fsw_cli_csv");
  json cfg = base_config();
  cfg["problem"] = {{"type", "np_csv"},
                    {"path", csv.string()},
                    {"domain", {{"kind", "box"}, {"halfwidth", 4.0}}}};
  cfg["rounds"]["n"] = 3;
  cfg["rounds"]["m"] = 2;
  cfg["rounds"].erase("compression");  // the CSV problem has only 2 features
  cfg["output_dir"] = dir.string();
  const json summary = execute_run(parse_run_spec(cfg));
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(summary["final_f"].is_number());
}

TEST_CASE("execute_run writes byte-identical traces for identical configs") {
  const fs::path dir1 = fresh_dir("fsw_cli_run1");
  const fs::path dir2 = fresh_dir("fsw_cli_run2");

  json cfg = base_config();
  cfg["output_dir"] = dir1.string();
  const json summary1 = execute_run(parse_run_spec(cfg));
  cfg["output_dir"] = dir2.string();
  const json summary2 = execute_run(parse_run_spec(cfg));

  CHECK(slurp(dir1 / "trace.csv") == slurp(dir2 / "trace.csv"));
  CHECK(fs::exists(dir1 / "summary.json"));

  for (const char* key :
       {"config", "seed", "final_f", "final_g", "epsilon", "eta", "gamma", "A_size",
        "w_bar_verdict"}) {
    CHECK_MESSAGE(summary1.contains(key), "missing summary key: ", key);
  }
  CHECK(summary1["final_f"] == summary2["final_f"]);
  CHECK(summary1["seed"] == 11);
  CHECK(summary1["gamma"].is_null());  // manual mode
}

TEST_CASE("theorem-mode run certifies its own averaged iterate") {
  const fs::path dir = fresh_dir("fsw_cli_theorem");
  json cfg = base_config();
  cfg["problem"] = {{"type", "linear_ball"}, {"d", 2},       {"direction", {1.0, 1.0}},
                    {"radius", 1.0},         {"halfwidth", 2.0}, {"perturbation", 0.25},
                    {"seed", 5}};
  cfg["rounds"]["n"] = 8;
  cfg["rounds"]["m"] = 8;
  cfg["rounds"]["T"] = 1024;
  cfg["rounds"]["E"] = 4;
  cfg["rounds"].erase("compression");
  cfg["rounds"]["switch"] = {{"mode", "hard"}};
  cfg["params"] = {{"mode", "theorem"}};
  cfg["output_dir"] = dir.string();

  const json summary = execute_run(parse_run_spec(cfg));
  REQUIRE(summary["w_bar_verdict"].contains("is_eps_solution"));
  CHECK(summary["w_bar_verdict"]["is_eps_solution"] == true);
  CHECK(summary["gamma"] == 32.0);  // 2 E^2 at E = 4, no compression
}

TEST_CASE("missing dataset files fail before any round runs") {
  json cfg = base_config();
  cfg["problem"] = {{"type", "np_csv"},
                    {"path", "/nonexistent/data.csv"},
                    {"domain", {{"kind", "ball"}, {"radius", 5.0}}}};
  const RunSpec spec = parse_run_spec(cfg);
  CHECK_THROWS_AS(execute_run(spec), std::runtime_error);
}

TEST_CASE("sweeps run the Cartesian product of their axes") {
  const fs::path dir = fresh_dir("fsw_cli_sweep");
  json cfg = base_config();
  cfg["rounds"]["T"] = 3;
  cfg["output_dir"] = dir.string();
  cfg["sweep"] = {{"rounds.E", {1, 2}}, {"rounds.m", {1, 2, 4}}};

  const RunSpec spec = parse_run_spec(cfg);
  const int failures = execute_sweep(spec);
  CHECK(failures == 0);
  CHECK(fs::exists(dir / "index.csv"));

  int cell_dirs = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) {
      ++cell_dirs;
      CHECK(fs::exists(entry.path() / "trace.csv"));
      CHECK(fs::exists(entry.path() / "summary.json"));
    }
  CHECK(cell_dirs == 6);

  const std::string index = slurp(dir / "index.csv");
  CHECK(index.find("rounds.E=1") != std::string::npos);
  CHECK(index.find("rounds.E=2") != std::string::npos);
  // header + 6 cells
  CHECK(std::count(index.begin(), index.end(), '\n') == 7);
}

TEST_CASE("sweep cells keep running after one cell fails") {
  const fs::path dir = fresh_dir("fsw_cli_sweep_fail");
  json cfg = base_config();
  cfg["rounds"]["T"] = 3;
  cfg["output_dir"] = dir.string();
  cfg["sweep"] = {{"rounds.m", {2, 99}}};  // m = 99 > n is invalid

  const int failures = execute_sweep(parse_run_spec(cfg));
  CHECK(failures == 1);
  const std::string index = slurp(dir / "index.csv");
  CHECK(index.find("ok") != std::string::npos);
  CHECK(index.find("failed") != std::string::npos);
}

TEST_CASE("an empty sweep is an error") {
  json cfg = base_config();
  CHECK_THROWS_AS(execute_sweep(parse_run_spec(cfg)), ConfigError);
  cfg["sweep"] = json::object();
  CHECK_THROWS_AS(execute_sweep(parse_run_spec(cfg)), ConfigError);
}

TEST_CASE("apply_override reaches nested fields") {
  json cfg = base_config();
  cfg = apply_override(cfg, "rounds.compression.uplink.k", 3);
  CHECK(cfg["rounds"]["compression"]["uplink"]["k"] == 3);
  cfg = apply_override(cfg, "problem.rows", 40);
  CHECK(cfg["problem"]["rows"] == 40);
}

TEST_CASE("w0 must match the problem dimension") {
  json cfg = base_config();
  cfg["w0"] = {1.0, 2.0};  // d_feat is 8
  CHECK_THROWS_WITH_AS(prepare_run(parse_run_spec(cfg)), doctest::Contains("w0"),
                       ConfigError);
}
