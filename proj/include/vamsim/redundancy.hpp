#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "vamsim/vam.hpp"

namespace vamsim {

enum class RmMode { off, standard, adapted };

inline const char* to_string(RmMode m) {
  switch (m) {
    case RmMode::off: return "off";
    case RmMode::standard: return "standard";
    case RmMode::adapted: return "adapted";
  }
  return "?";
}

struct RmConfig {
  RmMode mode = RmMode::off;
  int num_skip = 2;  // numSkipVamsForRedundancyMitigation, [2, 10]
  double rm_heading_deg = 4.0;
  double rm_speed_mps = 0.5;
  double rm_dist_m = 4.0;
  bool freshness_filter = true;
  bool apply_num_skip_in_adapted = true;

  Micros skip_window_us(const GenThresholds& th) const {
    return static_cast<Micros>(num_skip) * th.t_gen_max_us;
  }

  void validate() const {
    if (num_skip < 2 || num_skip > 10) {
      throw std::invalid_argument("rm.num_skip must be in [2, 10]");
    }
    if (rm_heading_deg <= 0 || rm_speed_mps <= 0 || rm_dist_m <= 0) {
      throw std::invalid_argument("rm thresholds must be positive");
    }
  }
};

// Per-node protocol state. redundant_list is used by the adapted engine
// only and is cleared on every ego transmission.
struct RmNodeState {
  std::optional<Micros> last_tx_time;
  std::optional<EgoRef> ego_ref;
  std::vector<std::pair<Vam, Micros>> redundant_list;  // (vam, rx_time)

  void on_transmit(const VruState& ego, Micros now) {
    last_tx_time = now;
    ego_ref = make_ego_ref(ego, now);
    redundant_list.clear();
  }
};

// Emitted whenever an ego VAM is suppressed (standard: at the suppressed
// generation instant; adapted: when the redundant VAM is received).
// Ground-truth states are captured at emission; ref_truth is absent when
// the reference VRU has already despawned.
struct MitigationEvent {
  Micros t = 0;
  VruId ego_id = 0;
  VruId ref_id = 0;
  VruState ego_truth;
  std::optional<VruState> ref_truth;
  Vam ref_vam;
  RmMode mode = RmMode::off;
};

// The three kinematic redundancy rules; strict (<) per the standard's
// wording, unlike the inclusive generation rules.
inline bool rm_kinematics_match(const VruState& ego, const Vam& vam,
                                const RmConfig& cfg) {
  return heading_diff(ego.heading, vam.heading) < cfg.rm_heading_deg &&
         std::fabs(ego.speed - vam.speed) < cfg.rm_speed_mps &&
         dist(ego.pos, vam.pos) < cfg.rm_dist_m;
}

// Standardized redundancy check, run after a generation rule has triggered.
// Returns the reference VAM justifying suppression, or nullopt to transmit.
// Rule i limits suppression to num_skip * T_GenVamMax since the last actual
// transmission; with the freshness filter only entries whose t_expected has
// not passed are considered. Scan order: most recent rx_time first.
inline std::optional<Vam> rm_standard_check(const VruState& ego, const Ldm& ldm,
                                            const RmNodeState& state,
                                            const RmConfig& cfg,
                                            const GenThresholds& th, Micros now) {
  if (!state.last_tx_time) return std::nullopt;
  if (now - *state.last_tx_time > cfg.skip_window_us(th)) return std::nullopt;
  std::vector<LdmEntry> candidates =
      cfg.freshness_filter ? ldm.fresh_entries(now) : ldm.all_entries();
  for (const LdmEntry& e : candidates) {
    if (e.vam.station_id == ego.vru_id) continue;
    if (rm_kinematics_match(ego, e.vam, cfg)) return e.vam;
  }
  return std::nullopt;
}

// Adapted engine, listening phase: if the received VAM is redundant to the
// CURRENT ego state, snapshot the ego status as if an own VAM had been sent
// and remember the VAM. Never triggers a transmission by itself. Returns
// true when redundancy was detected.
//
// Rule i still applies (configurable): a node that has never transmitted,
// or whose last transmission is older than the skip window, must not start
// or keep suppressing.
inline bool rm_adapted_on_receive(const VruState& ego, const Vam& rx_vam,
                                  RmNodeState& state, const RmConfig& cfg,
                                  const GenThresholds& th, Micros now) {
  if (rx_vam.station_id == ego.vru_id) return false;
  if (cfg.apply_num_skip_in_adapted) {
    if (!state.last_tx_time) return false;
    if (now - *state.last_tx_time > cfg.skip_window_us(th)) return false;
  }
  if (!rm_kinematics_match(ego, rx_vam, cfg)) return false;

  state.ego_ref = make_ego_ref(ego, now);  // latest redundancy wins
  for (auto& [vam, rx] : state.redundant_list) {
    if (vam.station_id == rx_vam.station_id) {
      vam = rx_vam;
      rx = now;
      return true;
    }
  }
  state.redundant_list.emplace_back(rx_vam, now);
  return true;
}

enum class AdaptedDecision { transmit, silent };

// Adapted engine, generation phase. Precondition: ego_ref exists and the
// caller enforced T_GenVamMin spacing since last_tx_time.
//
// Ordered branches:
//   (0) num_skip window since the last actual transmission has expired:
//       the virtual reference no longer authorizes silence -> transmit.
//       (The flowchart omits this, but without it a node kept silent by
//       on-receive snapshots can exceed the rule-i silence cap.)
//   (1) generation rules fire against ego_ref -> transmit.
//   (2) empty redundant list -> silent.
//   (3) drop every listed VAM the ego has diverged from (TIME measured
//       against that VAM's gen_time); transmit iff the list empties.
inline AdaptedDecision rm_adapted_on_generate(const VruState& ego,
                                              RmNodeState& state,
                                              const RmConfig& cfg,
                                              const GenThresholds& th,
                                              Micros now) {
  auto transmit = [&] {
    state.on_transmit(ego, now);
    return AdaptedDecision::transmit;
  };

  if (cfg.apply_num_skip_in_adapted && state.last_tx_time &&
      now - *state.last_tx_time > cfg.skip_window_us(th)) {
    return transmit();
  }

  const EgoRef& ref = *state.ego_ref;
  if (check_generation_rules(ego, ref, th, now).triggered) {
    return transmit();
  }
  if (state.redundant_list.empty()) return AdaptedDecision::silent;

  auto diverged = [&](const std::pair<Vam, Micros>& entry) {
    EgoRef vam_ref{entry.first.gen_time, entry.first.pos, entry.first.speed,
                   entry.first.heading};
    return check_generation_rules(ego, vam_ref, th, now).triggered;
  };
  std::erase_if(state.redundant_list, diverged);
  if (state.redundant_list.empty()) return transmit();
  return AdaptedDecision::silent;
}

}  // namespace vamsim
