#pragma once

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vamsim/engine.hpp"

namespace vamsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline RmMode parse_mode(const std::string& s) {
  if (s == "off") return RmMode::off;
  if (s == "standard") return RmMode::standard;
  if (s == "adapted") return RmMode::adapted;
  throw ConfigError("mode: expected off|standard|adapted, got '" + s + "'");
}

// One declarative config drives both single runs and seed x mode matrices.
struct MatrixConfig {
  RunConfig base;
  std::vector<std::uint64_t> seeds{1};
  std::vector<RmMode> modes{RmMode::off};
};

namespace detail_config {

using nlohmann::json;

inline double num(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  return v.get<double>();
}

inline std::int64_t integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
  return v.get<std::int64_t>();
}

inline bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key + ": expected true/false");
  return v.get<bool>();
}

inline std::string str(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

inline Micros ms_to_us(double ms) { return static_cast<Micros>(std::llround(ms * 1000.0)); }

}  // namespace detail_config

// Flat namespaced keys; every key is validated, unknown keys are rejected.
inline MatrixConfig parse_config(const nlohmann::json& j) {
  using nlohmann::json;
  namespace dc = detail_config;
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  MatrixConfig out;
  RunConfig& cfg = out.base;
  std::string scenario_kind;
  PlatoonParams platoon;
  CrossingParams crossing;
  TraceFileScenario trace_files;
  bool have_seed = false;
  bool have_mode = false;

  for (const auto& [key, v] : j.items()) {
    if (key == "seed") {
      out.seeds = {static_cast<std::uint64_t>(dc::integer(v, key))};
      have_seed = true;
    } else if (key == "seeds") {
      if (!v.is_array() || v.empty()) throw ConfigError("seeds: expected a non-empty array");
      out.seeds.clear();
      for (const auto& s : v) out.seeds.push_back(static_cast<std::uint64_t>(dc::integer(s, key)));
      have_seed = true;
    } else if (key == "mode") {
      out.modes = {parse_mode(dc::str(v, key))};
      have_mode = true;
    } else if (key == "modes") {
      if (!v.is_array() || v.empty()) throw ConfigError("modes: expected a non-empty array");
      out.modes.clear();
      for (const auto& s : v) out.modes.push_back(parse_mode(dc::str(s, key)));
      have_mode = true;
    } else if (key == "duration_s") {
      cfg.duration_us = seconds_to_us(dc::num(v, key));
    } else if (key == "warmup_s") {
      cfg.warmup_us = seconds_to_us(dc::num(v, key));
    } else if (key == "scenario.kind") {
      scenario_kind = dc::str(v, key);
    } else if (key == "scenario.trace.path") {
      trace_files.trace_path = dc::str(v, key);
    } else if (key == "scenario.trace.obstacles") {
      trace_files.obstacles_path = dc::str(v, key);
    } else if (key == "scenario.platoon.bikes") {
      platoon.n_bikes = static_cast<int>(dc::integer(v, key));
    } else if (key == "scenario.platoon.red_s") {
      platoon.red_duration_s = dc::num(v, key);
    } else if (key == "scenario.platoon.accel_mps2") {
      platoon.accel_mps2 = dc::num(v, key);
    } else if (key == "scenario.platoon.cruise_mps") {
      platoon.cruise_mps = dc::num(v, key);
    } else if (key == "scenario.platoon.gap_m") {
      platoon.gap_m = dc::num(v, key);
    } else if (key == "scenario.crossing.flow_a_per_min") {
      crossing.flow_a_per_min = dc::num(v, key);
    } else if (key == "scenario.crossing.flow_b_per_min") {
      crossing.flow_b_per_min = dc::num(v, key);
    } else if (key == "scenario.crossing.cruise_mps") {
      crossing.cruise_mps = dc::num(v, key);
    } else if (key == "scenario.crossing.approach_m") {
      crossing.approach_m = dc::num(v, key);
    } else if (key == "gen.t_min_ms") {
      cfg.gen.t_gen_min_us = dc::ms_to_us(dc::num(v, key));
    } else if (key == "gen.t_max_ms") {
      cfg.gen.t_gen_max_us = dc::ms_to_us(dc::num(v, key));
    } else if (key == "gen.heading_deg") {
      cfg.gen.delta_heading_deg = dc::num(v, key);
    } else if (key == "gen.speed_mps") {
      cfg.gen.delta_speed_mps = dc::num(v, key);
    } else if (key == "gen.dist_m") {
      cfg.gen.delta_dist_m = dc::num(v, key);
    } else if (key == "rm.num_skip") {
      cfg.rm.num_skip = static_cast<int>(dc::integer(v, key));
    } else if (key == "rm.heading_deg") {
      cfg.rm.rm_heading_deg = dc::num(v, key);
    } else if (key == "rm.speed_mps") {
      cfg.rm.rm_speed_mps = dc::num(v, key);
    } else if (key == "rm.dist_m") {
      cfg.rm.rm_dist_m = dc::num(v, key);
    } else if (key == "rm.freshness_filter") {
      cfg.rm.freshness_filter = dc::boolean(v, key);
    } else if (key == "rm.apply_num_skip_in_adapted") {
      cfg.rm.apply_num_skip_in_adapted = dc::boolean(v, key);
    } else if (key == "channel.bitrate_bps") {
      cfg.channel.bitrate_bps = dc::integer(v, key);
    } else if (key == "channel.frame_bytes") {
      cfg.channel.frame_size_bytes = static_cast<int>(dc::integer(v, key));
    } else if (key == "channel.phy_overhead_us") {
      cfg.channel.phy_overhead_us = dc::integer(v, key);
    } else if (key == "channel.comm_radius_m") {
      cfg.channel.comm_radius_m = dc::num(v, key);
    } else if (key == "channel.p_loss_los") {
      cfg.channel.p_loss_los = dc::num(v, key);
    } else if (key == "channel.p_loss_nlos") {
      cfg.channel.p_loss_nlos = dc::num(v, key);
    } else if (key == "channel.collisions") {
      cfg.channel.collisions_enabled = dc::boolean(v, key);
    } else if (key == "channel.cbr_window_ms") {
      cfg.channel.cbr_window_us = dc::ms_to_us(dc::num(v, key));
    } else if (key == "metrics.cadence_ms") {
      cfg.metrics.cadence_us = dc::ms_to_us(dc::num(v, key));
    } else if (key == "metrics.vpr_radius_m") {
      cfg.metrics.vpr_radius_m = dc::num(v, key);
    } else if (key == "metrics.vpr_validity_ms") {
      cfg.metrics.vpr_validity_us = dc::ms_to_us(dc::num(v, key));
    } else if (key == "metrics.roi") {
      if (!v.is_array() || v.size() != 4) throw ConfigError("metrics.roi: expected [x0,y0,x1,y1]");
      cfg.metrics.roi = {{dc::num(v[0], key), dc::num(v[1], key), dc::num(v[2], key),
                          dc::num(v[3], key)}};
    } else if (key == "metrics.static_observers") {
      if (!v.is_array()) throw ConfigError("metrics.static_observers: expected [[x,y],...]");
      for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2) {
          throw ConfigError("metrics.static_observers: expected [[x,y],...]");
        }
        cfg.metrics.static_observers.push_back({dc::num(p[0], key), dc::num(p[1], key)});
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  if (scenario_kind.empty()) throw ConfigError("missing required key 'scenario.kind'");
  if (scenario_kind == "platoon") {
    cfg.scenario = platoon;
  } else if (scenario_kind == "crossing") {
    cfg.scenario = crossing;
  } else if (scenario_kind == "trace") {
    if (trace_files.trace_path.empty()) {
      throw ConfigError("scenario.kind=trace requires scenario.trace.path");
    }
    cfg.scenario = trace_files;
  } else {
    throw ConfigError("scenario.kind: expected platoon|crossing|trace, got '" +
                      scenario_kind + "'");
  }
  (void)have_seed;
  (void)have_mode;

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

inline MatrixConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

// Effective settings re-serialized as the same flat key set; seed and mode
// are deliberately excluded so comparability checks can use echo equality.
inline nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["duration_s"] = us_to_seconds(cfg.duration_us);
  j["warmup_s"] = us_to_seconds(cfg.warmup_us);
  if (const auto* p = std::get_if<PlatoonParams>(&cfg.scenario)) {
    j["scenario.kind"] = "platoon";
    j["scenario.platoon.bikes"] = p->n_bikes;
    j["scenario.platoon.red_s"] = p->red_duration_s;
    j["scenario.platoon.accel_mps2"] = p->accel_mps2;
    j["scenario.platoon.cruise_mps"] = p->cruise_mps;
    j["scenario.platoon.gap_m"] = p->gap_m;
  } else if (const auto* c = std::get_if<CrossingParams>(&cfg.scenario)) {
    j["scenario.kind"] = "crossing";
    j["scenario.crossing.flow_a_per_min"] = c->flow_a_per_min;
    j["scenario.crossing.flow_b_per_min"] = c->flow_b_per_min;
    j["scenario.crossing.cruise_mps"] = c->cruise_mps;
    j["scenario.crossing.approach_m"] = c->approach_m;
  } else if (const auto* t = std::get_if<TraceFileScenario>(&cfg.scenario)) {
    j["scenario.kind"] = "trace";
    j["scenario.trace.path"] = t->trace_path;
    j["scenario.trace.obstacles"] = t->obstacles_path;
  } else {
    j["scenario.kind"] = "inline";
  }
  j["gen.t_min_ms"] = static_cast<double>(cfg.gen.t_gen_min_us) / 1000.0;
  j["gen.t_max_ms"] = static_cast<double>(cfg.gen.t_gen_max_us) / 1000.0;
  j["gen.heading_deg"] = cfg.gen.delta_heading_deg;
  j["gen.speed_mps"] = cfg.gen.delta_speed_mps;
  j["gen.dist_m"] = cfg.gen.delta_dist_m;
  j["rm.num_skip"] = cfg.rm.num_skip;
  j["rm.heading_deg"] = cfg.rm.rm_heading_deg;
  j["rm.speed_mps"] = cfg.rm.rm_speed_mps;
  j["rm.dist_m"] = cfg.rm.rm_dist_m;
  j["rm.freshness_filter"] = cfg.rm.freshness_filter;
  j["rm.apply_num_skip_in_adapted"] = cfg.rm.apply_num_skip_in_adapted;
  j["channel.bitrate_bps"] = cfg.channel.bitrate_bps;
  j["channel.frame_bytes"] = cfg.channel.frame_size_bytes;
  j["channel.phy_overhead_us"] = cfg.channel.phy_overhead_us;
  j["channel.comm_radius_m"] = cfg.channel.comm_radius_m;
  j["channel.p_loss_los"] = cfg.channel.p_loss_los;
  j["channel.p_loss_nlos"] = cfg.channel.p_loss_nlos;
  j["channel.collisions"] = cfg.channel.collisions_enabled;
  j["channel.cbr_window_ms"] = static_cast<double>(cfg.channel.cbr_window_us) / 1000.0;
  j["metrics.cadence_ms"] = static_cast<double>(cfg.metrics.cadence_us) / 1000.0;
  j["metrics.vpr_radius_m"] = cfg.metrics.vpr_radius_m;
  j["metrics.vpr_validity_ms"] = static_cast<double>(cfg.metrics.vpr_validity_us) / 1000.0;
  if (cfg.metrics.roi) {
    j["metrics.roi"] = {(*cfg.metrics.roi)[0], (*cfg.metrics.roi)[1],
                        (*cfg.metrics.roi)[2], (*cfg.metrics.roi)[3]};
  }
  if (!cfg.metrics.static_observers.empty()) {
    nlohmann::json obs = nlohmann::json::array();
    for (const Vec2& p : cfg.metrics.static_observers) obs.push_back({p.x, p.y});
    j["metrics.static_observers"] = obs;
  }
  return j;
}

}  // namespace vamsim
