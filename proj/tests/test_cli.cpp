#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch2/catch_amalgamated.hpp"
#include "vamsim/compare.hpp"
#include "vamsim/io.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(VAMSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_config(const fs::path& path, const std::string& extra) {
  std::ofstream out(path);
  out << "{\n"
      << "  \"scenario.kind\": \"platoon\",\n"
      << "  \"scenario.platoon.bikes\": 5,\n"
      << "  \"duration_s\": 15,\n"
      << "  \"warmup_s\": 5\n"
      << extra << "}\n";
}

}  // namespace

TEST_CASE("cli usage errors exit with code 2") {
  CHECK(run_cli("gen-scenario warp-drive") == 2);
  CHECK(run_cli("gen-scenario platoon --bikes 0 --out /tmp/vamsim_cli_bad") == 2);
  CHECK(run_cli("run --config /nonexistent/config.json") == 2);
}

TEST_CASE("cli pipeline: gen-scenario, run, rerun, compare") {
  fs::path root = fresh_dir("vamsim_cli_pipe");

  SECTION("scenario generation writes trace and obstacles") {
    REQUIRE(run_cli("gen-scenario platoon --bikes 4 --seed 1 --duration 15 --out " +
                    (root / "scen").string()) == 0);
    CHECK(fs::exists(root / "scen/trace.csv"));
    CHECK(fs::exists(root / "scen/obstacles.csv"));
    vamsim::MobilityTrace t = vamsim::load_trace((root / "scen/trace.csv").string());
    CHECK(t.vru_count() == 4);
  }

  SECTION("run and deterministic rerun") {
    write_config(root / "cfg.json", "");
    REQUIRE(run_cli("run --config " + (root / "cfg.json").string() + " --out " +
                    (root / "out1").string()) == 0);
    REQUIRE(run_cli("run --config " + (root / "cfg.json").string() + " --out " +
                    (root / "out2").string()) == 0);
    fs::path run1 = root / "out1/run_off_s1";
    fs::path run2 = root / "out2/run_off_s1";
    REQUIRE(fs::exists(run1 / "frames.csv"));
    for (const char* name : {"frames.csv", "rx.csv", "cbr.csv", "vpr.csv",
                             "mitigation.csv", "tx_counts.csv", "manifest.json"}) {
      INFO(name);
      CHECK(file_bytes(run1 / name) == file_bytes(run2 / name));
    }
  }

  SECTION("compare across modes") {
    write_config(root / "cfg_matrix.json",
                 ",  \"seeds\": [1, 2],\n  \"modes\": [\"off\", \"standard\", \"adapted\"]\n");
    REQUIRE(run_cli("run --config " + (root / "cfg_matrix.json").string() + " --out " +
                    (root / "matrix").string()) == 0);
    REQUIRE(run_cli("compare " + (root / "matrix").string() + " --out " +
                    (root / "report").string()) == 0);
    CHECK(fs::exists(root / "report/report.json"));
    CHECK(fs::exists(root / "report/report.txt"));
  }

  SECTION("compare refuses a single mode") {
    write_config(root / "cfg_single.json", ",  \"mode\": \"off\"\n");
    REQUIRE(run_cli("run --config " + (root / "cfg_single.json").string() + " --out " +
                    (root / "single").string()) == 0);
    CHECK(run_cli("compare " + (root / "single").string()) == 2);
  }

  SECTION("compare refuses mismatched seed sets") {
    write_config(root / "cfg_a.json", ",  \"mode\": \"off\", \"seed\": 1\n");
    write_config(root / "cfg_b.json", ",  \"mode\": \"standard\", \"seed\": 2\n");
    REQUIRE(run_cli("run --config " + (root / "cfg_a.json").string() + " --out " +
                    (root / "ma").string()) == 0);
    REQUIRE(run_cli("run --config " + (root / "cfg_b.json").string() + " --out " +
                    (root / "mb").string()) == 0);
    CHECK(run_cli("compare " + (root / "ma").string() + " " + (root / "mb").string()) == 2);
  }
}

TEST_CASE("comparison report orders modes and carries stats") {
  using namespace vamsim;
  PlatoonParams p;
  p.n_bikes = 12;
  p.gap_m = 1.5;
  RunConfig cfg;
  cfg.scenario = p;
  cfg.duration_us = 30'000'000;
  cfg.warmup_us = 10'000'000;

  auto outputs = run_matrix(cfg, {1, 2}, {RmMode::off, RmMode::standard, RmMode::adapted});
  std::vector<LoadedRun> runs;
  for (const auto& out : outputs) runs.push_back(loaded_from_output(out, cfg));
  ComparisonReport report = build_comparison(runs);

  REQUIRE(report.per_mode.size() == 3);
  CHECK(report.per_mode[0].mode == RmMode::off);
  CHECK(report.per_mode[0].run_count == 2);
  CHECK(report.per_mode[0].ego_speed.n == 0);  // off never mitigates
  CHECK(report.per_mode[1].ego_speed.n > 0);
  CHECK(report.max_cbr_order_ok.has_value());
  CHECK(!report.max_cbr_ranking.empty());

  std::string text = comparison_to_text(report);
  CHECK(text.find("CBR") != std::string::npos);
  CHECK(text.find("verdicts") != std::string::npos);
  nlohmann::json j = comparison_to_json(report);
  CHECK(j["modes"].contains("off"));
  CHECK(j["modes"]["off"]["ego_speed_at_mitigation"].is_null());
}

TEST_CASE("comparison rejects different scenarios") {
  using namespace vamsim;
  PlatoonParams p;
  p.n_bikes = 4;
  RunConfig cfg_a;
  cfg_a.scenario = p;
  cfg_a.duration_us = 15'000'000;
  cfg_a.warmup_us = 5'000'000;
  RunConfig cfg_b = cfg_a;
  p.n_bikes = 5;
  cfg_b.scenario = p;

  RunConfig a_off = cfg_a;
  a_off.rm.mode = RmMode::off;
  RunConfig b_std = cfg_b;
  b_std.rm.mode = RmMode::standard;
  std::vector<LoadedRun> runs{loaded_from_output(run(a_off), cfg_a),
                              loaded_from_output(run(b_std), cfg_b)};
  CHECK_THROWS_AS(build_comparison(runs), CompareError);
}
