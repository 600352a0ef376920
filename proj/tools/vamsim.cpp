// vamsim command line: scenario generation, run/matrix execution and
// mode comparison reports.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vamsim/vamsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int cmd_gen_scenario(const std::string& generator, const std::string& out_dir,
                     std::uint64_t seed, double duration_s, int bikes,
                     double red_s, double accel, double cruise, double gap,
                     double flow_a, double flow_b, double approach) {
  vamsim::MobilityTrace trace;
  std::vector<vamsim::Obstacle> obstacles;
  if (generator == "platoon") {
    vamsim::PlatoonParams p;
    p.n_bikes = bikes;
    p.red_duration_s = red_s;
    p.accel_mps2 = accel;
    p.cruise_mps = cruise;
    p.gap_m = gap;
    p.duration_s = duration_s;
    trace = vamsim::gen_platoon_scenario(p, seed);
  } else if (generator == "crossing") {
    vamsim::CrossingParams p;
    p.flow_a_per_min = flow_a;
    p.flow_b_per_min = flow_b;
    p.cruise_mps = cruise;
    p.approach_m = approach;
    p.duration_s = duration_s;
    trace = vamsim::gen_crossing_scenario(p, seed);
    obstacles.push_back(vamsim::default_crossing_building(p));
  } else {
    std::cerr << "unknown generator '" << generator << "' (platoon|crossing)\n";
    return kExitUsage;
  }

  std::filesystem::create_directories(out_dir);
  vamsim::save_trace(trace, out_dir + "/trace.csv");
  vamsim::save_obstacles(obstacles, out_dir + "/obstacles.csv");
  if (trace.empty()) {
    std::cout << "wrote " << out_dir << ": 0 VRUs\n";
  } else {
    std::cout << "wrote " << out_dir << ": " << trace.vru_count() << " VRUs, lifespan ["
              << vamsim::us_to_seconds(trace.span_start()) << " s, "
              << vamsim::us_to_seconds(trace.span_end()) << " s]\n";
  }
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& mode_override, std::int64_t seed_override) {
  vamsim::MatrixConfig cfg = vamsim::load_config(config_path);
  if (!mode_override.empty()) cfg.modes = {vamsim::parse_mode(mode_override)};
  if (seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed_override)};

  std::vector<vamsim::RunOutput> outputs =
      vamsim::run_matrix(cfg.base, cfg.seeds, cfg.modes);
  vamsim::write_matrix_output(outputs, cfg.base, out_dir);
  std::int64_t frames = 0;
  for (const auto& out : outputs) frames += static_cast<std::int64_t>(out.frames.size());
  std::cout << "wrote " << out_dir << ": " << outputs.size() << " run(s), " << frames
            << " transmissions after warmup\n";
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& out_dir) {
  std::vector<vamsim::LoadedRun> runs = vamsim::load_run_dirs(dirs);
  vamsim::ComparisonReport report = vamsim::build_comparison(runs);
  std::string text = vamsim::comparison_to_text(report);
  std::cout << text;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream jf(out_dir + "/report.json");
    jf << vamsim::comparison_to_json(report).dump(2) << "\n";
    std::ofstream tf(out_dir + "/report.txt");
    tf << text;
    std::cout << "wrote " << out_dir << "/report.json\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VAM exchange simulator with redundancy mitigation"};
  app.require_subcommand(1);

  // gen-scenario
  auto* gen = app.add_subcommand("gen-scenario",
                                 "generate a mobility trace and obstacle file");
  std::string generator;
  std::string gen_out = "scenario";
  std::uint64_t gen_seed = 1;
  double gen_duration = 50.0;
  int bikes = 30;
  double red_s = 15.0, accel = 1.0, cruise = 5.0, gap = 1.5;
  double flow_a = 60.0, flow_b = 60.0, approach = 150.0;
  gen->add_option("generator", generator, "platoon|crossing")->required();
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--duration", gen_duration, "trace duration [s]");
  gen->add_option("--bikes", bikes, "platoon: number of bicycles");
  gen->add_option("--red", red_s, "platoon: red phase duration [s]");
  gen->add_option("--accel", accel, "platoon: acceleration [m/s^2]");
  gen->add_option("--cruise", cruise, "cruise speed [m/s]");
  gen->add_option("--gap", gap, "platoon: queue gap [m]");
  gen->add_option("--flow-a", flow_a, "crossing: eastbound flow [bikes/min]");
  gen->add_option("--flow-b", flow_b, "crossing: northbound flow [bikes/min]");
  gen->add_option("--approach", approach, "crossing: arm length [m]");

  // run
  auto* run_cmd = app.add_subcommand("run", "execute a run or seed x mode matrix");
  std::string config_path;
  std::string run_out = "out";
  std::string mode_override;
  std::int64_t seed_override = -1;
  run_cmd->add_option("--config", config_path, "config file (JSON, flat keys)")
      ->required();
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_option("--mode", mode_override, "override: off|standard|adapted");
  run_cmd->add_option("--seed", seed_override, "override: single seed");

  // compare
  auto* cmp = app.add_subcommand("compare", "compare run outputs across modes");
  std::vector<std::string> cmp_dirs;
  std::string cmp_out;
  cmp->add_option("dirs", cmp_dirs, "run or matrix output directories")->required();
  cmp->add_option("--out", cmp_out, "directory for report.json / report.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_scenario(generator, gen_out, gen_seed, gen_duration, bikes,
                              red_s, accel, cruise, gap, flow_a, flow_b, approach);
    }
    if (run_cmd->parsed()) {
      return cmd_run(config_path, run_out, mode_override, seed_override);
    }
    if (cmp->parsed()) {
      return cmd_compare(cmp_dirs, cmp_out);
    }
  } catch (const vamsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const vamsim::CompareError& e) {
    std::cerr << "compare error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
