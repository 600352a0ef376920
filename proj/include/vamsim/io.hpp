#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vamsim/config.hpp"
#include "vamsim/csv.hpp"
#include "vamsim/engine.hpp"

namespace vamsim {

constexpr int kOutputFormatVersion = 1;

inline std::string run_dir_name(RmMode mode, std::uint64_t seed) {
  return std::string("run_") + to_string(mode) + "_s" + std::to_string(seed);
}

// One run -> one directory of CSVs plus a manifest.
inline void write_run_output(const RunOutput& out, const RunConfig& cfg,
                             const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    csv::Writer w(dir + "/frames.csv", "t_start_us,airtime_us,tx_id");
    for (const auto& rec : out.frames) {
      w.row(std::to_string(rec.frame.t_start) + "," +
            std::to_string(rec.frame.airtime_us) + "," +
            std::to_string(rec.frame.tx_id));
    }
  }
  {
    csv::Writer w(dir + "/rx.csv", "t_start_us,airtime_us,tx_id,rx_id,outcome");
    for (const auto& rec : out.frames) {
      for (const auto& rx : rec.rx) {
        w.row(std::to_string(rx.t_start) + "," + std::to_string(rx.airtime_us) +
              "," + std::to_string(rx.tx_id) + "," + std::to_string(rx.rx_id) +
              "," + to_string(rx.outcome));
      }
    }
  }
  {
    csv::Writer w(dir + "/cbr.csv", "t_us,node,cbr");
    for (const auto& s : out.cbr_series) {
      w.row(std::to_string(s.t) + "," + std::to_string(s.node) + "," +
            csv::fmt(s.cbr, 9));
    }
  }
  {
    csv::Writer w(dir + "/vpr.csv", "t_us,observer,aware,in_range");
    for (const auto& s : out.vpr_series) {
      w.row(std::to_string(s.t) + "," + std::to_string(s.observer_id) + "," +
            std::to_string(s.aware_count) + "," + std::to_string(s.in_range_count));
    }
  }
  {
    csv::Writer w(dir + "/mitigation.csv",
                  "t_us,mode,ego,ref,ego_speed,d_pos,d_speed,d_heading");
    for (const auto& d : out.diff_records) {
      w.row(std::to_string(d.t) + "," + to_string(d.mode) + "," +
            std::to_string(d.ego_id) + "," + std::to_string(d.ref_id) + "," +
            csv::fmt(d.ego_speed_truth) + "," + csv::fmt(d.d_pos) + "," +
            csv::fmt(d.d_speed) + "," + csv::fmt(d.d_heading));
    }
  }
  {
    csv::Writer w(dir + "/tx_counts.csv", "node,tx_count");
    for (const auto& [node, count] : out.tx_counts) {
      w.row(std::to_string(node) + "," + std::to_string(count));
    }
  }

  nlohmann::json manifest;
  manifest["format_version"] = kOutputFormatVersion;
  manifest["seed"] = out.seed;
  manifest["mode"] = to_string(out.mode);
  manifest["duration_s"] = us_to_seconds(out.duration_us);
  manifest["warmup_s"] = us_to_seconds(out.warmup_us);
  manifest["vru_count"] = out.vru_count;
  manifest["dropped_ref_despawned"] = out.dropped_ref_despawned;
  manifest["dropped_rx_despawned"] = out.dropped_rx_despawned;
  manifest["config"] = config_echo(cfg);
  std::ofstream mf(dir + "/manifest.json");
  mf << manifest.dump(2) << "\n";
}

// Matrix layout: one subdirectory per (mode, seed) plus a top manifest.
inline std::vector<std::string> write_matrix_output(
    const std::vector<RunOutput>& outputs, const RunConfig& base,
    const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  nlohmann::json runs = nlohmann::json::array();
  std::vector<std::string> dirs;
  for (const RunOutput& out : outputs) {
    std::string sub = run_dir_name(out.mode, out.seed);
    RunConfig cfg = base;
    cfg.seed = out.seed;
    cfg.rm.mode = out.mode;
    write_run_output(out, cfg, out_dir + "/" + sub);
    runs.push_back({{"mode", to_string(out.mode)}, {"seed", out.seed}, {"dir", sub}});
    dirs.push_back(out_dir + "/" + sub);
  }
  nlohmann::json manifest;
  manifest["format_version"] = kOutputFormatVersion;
  manifest["runs"] = runs;
  manifest["config"] = config_echo(base);
  std::ofstream mf(out_dir + "/manifest.json");
  mf << manifest.dump(2) << "\n";
  return dirs;
}

struct LoadedRun {
  std::string dir;
  std::uint64_t seed = 0;
  RmMode mode = RmMode::off;
  nlohmann::json config;
  std::vector<CbrSample> cbr;
  std::vector<VprSample> vpr;
  std::vector<DiffRecord> diffs;
};

// In-memory counterpart of read_run_dir for freshly computed outputs.
inline LoadedRun loaded_from_output(const RunOutput& out, const RunConfig& base) {
  LoadedRun run;
  run.dir = "<memory>";
  run.seed = out.seed;
  run.mode = out.mode;
  RunConfig cfg = base;
  cfg.seed = out.seed;
  cfg.rm.mode = out.mode;
  run.config = config_echo(cfg);
  run.cbr = out.cbr_series;
  run.vpr = out.vpr_series;
  run.diffs = out.diff_records;
  return run;
}

inline LoadedRun read_run_dir(const std::string& dir) {
  LoadedRun run;
  run.dir = dir;
  std::ifstream mf(dir + "/manifest.json");
  if (!mf) throw std::runtime_error(dir + ": missing manifest.json");
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(dir + ": bad manifest.json: " + e.what());
  }
  if (!manifest.contains("format_version") ||
      manifest["format_version"].get<int>() != kOutputFormatVersion) {
    throw std::runtime_error(dir + ": unsupported or missing format_version");
  }
  if (!manifest.contains("seed") || !manifest.contains("mode")) {
    throw std::runtime_error(dir + ": manifest is not a run manifest");
  }
  run.seed = manifest["seed"].get<std::uint64_t>();
  run.mode = parse_mode(manifest["mode"].get<std::string>());
  run.config = manifest["config"];

  for (const auto& row : csv::read_rows(dir + "/cbr.csv")) {
    if (csv::looks_like_header(row)) continue;
    run.cbr.push_back({csv::parse_int(row.fields[0], row.line_no, "t_us"),
                       csv::parse_int(row.fields[1], row.line_no, "node"),
                       csv::parse_double(row.fields[2], row.line_no, "cbr")});
  }
  for (const auto& row : csv::read_rows(dir + "/vpr.csv")) {
    if (csv::looks_like_header(row)) continue;
    VprSample s;
    s.t = csv::parse_int(row.fields[0], row.line_no, "t_us");
    s.observer_id = csv::parse_int(row.fields[1], row.line_no, "observer");
    s.aware_count = static_cast<int>(csv::parse_int(row.fields[2], row.line_no, "aware"));
    s.in_range_count =
        static_cast<int>(csv::parse_int(row.fields[3], row.line_no, "in_range"));
    run.vpr.push_back(s);
  }
  for (const auto& row : csv::read_rows(dir + "/mitigation.csv")) {
    if (csv::looks_like_header(row)) continue;
    DiffRecord d;
    d.t = csv::parse_int(row.fields[0], row.line_no, "t_us");
    d.mode = parse_mode(csv::trim(row.fields[1]));
    d.ego_id = csv::parse_int(row.fields[2], row.line_no, "ego");
    d.ref_id = csv::parse_int(row.fields[3], row.line_no, "ref");
    d.ego_speed_truth = csv::parse_double(row.fields[4], row.line_no, "ego_speed");
    d.d_pos = csv::parse_double(row.fields[5], row.line_no, "d_pos");
    d.d_speed = csv::parse_double(row.fields[6], row.line_no, "d_speed");
    d.d_heading = csv::parse_double(row.fields[7], row.line_no, "d_heading");
    run.diffs.push_back(d);
  }
  return run;
}

// Accepts either a run directory or a matrix directory; expands the latter.
inline std::vector<LoadedRun> load_run_dirs(const std::vector<std::string>& paths) {
  std::vector<LoadedRun> runs;
  for (const std::string& path : paths) {
    std::ifstream mf(path + "/manifest.json");
    if (!mf) throw std::runtime_error(path + ": missing manifest.json");
    nlohmann::json manifest;
    mf >> manifest;
    if (manifest.contains("runs")) {
      for (const auto& r : manifest["runs"]) {
        runs.push_back(read_run_dir(path + "/" + r["dir"].get<std::string>()));
      }
    } else {
      runs.push_back(read_run_dir(path));
    }
  }
  return runs;
}

}  // namespace vamsim
