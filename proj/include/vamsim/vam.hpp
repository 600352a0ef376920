#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "vamsim/geometry.hpp"
#include "vamsim/scenario.hpp"

namespace vamsim {

// Broadcast VRU awareness message: Basic + High Frequency container fields.
struct Vam {
  VruId station_id = 0;
  Micros gen_time = 0;
  Vec2 pos;
  double speed = 0.0;
  double heading = 0.0;
  int size_bytes = 300;
};

// Kinematic snapshot the generation rules measure change against. Updated
// on every transmission; in adapted mode also on redundancy detection.
struct EgoRef {
  Micros t = 0;
  Vec2 pos;
  double speed = 0.0;
  double heading = 0.0;
};

inline EgoRef make_ego_ref(const VruState& s, Micros t) {
  return {t, s.pos, s.speed, s.heading};
}

struct GenThresholds {
  double delta_heading_deg = 4.0;
  double delta_speed_mps = 0.5;
  double delta_dist_m = 4.0;
  Micros t_gen_min_us = 100'000;    // T_GenVamMin
  Micros t_gen_max_us = 5'000'000;  // T_GenVamMax

  void validate() const {
    if (delta_heading_deg <= 0 || delta_speed_mps <= 0 || delta_dist_m <= 0) {
      throw std::invalid_argument("generation thresholds must be positive");
    }
    if (t_gen_min_us <= 0 || t_gen_min_us >= t_gen_max_us) {
      throw std::invalid_argument("need 0 < t_gen_min < t_gen_max");
    }
  }
};

// TRAJECTORY / CLUSTER / SAFE_DISTANCE are reserved tags; those rules are
// not evaluated but keep log values stable if they ever are.
enum class GenRule : unsigned {
  TIME = 1u << 0,
  HEADING = 1u << 1,
  SPEED = 1u << 2,
  DISTANCE = 1u << 3,
  TRAJECTORY = 1u << 4,
  CLUSTER = 1u << 5,
  SAFE_DISTANCE = 1u << 6,
};

struct GenDecision {
  bool triggered = false;
  unsigned rules = 0;  // bitmask of GenRule

  bool has(GenRule r) const { return (rules & static_cast<unsigned>(r)) != 0; }
};

// Kinematic thresholds are inclusive (>=): those rules fire at a "minimum
// absolute difference of" each threshold. The TIME rule is strict: it fires
// once the elapsed time exceeds T_GenVamMax. The advisory decision ignores
// T_GenVamMin spacing; callers enforce it.
inline GenDecision check_generation_rules(const VruState& ego, const EgoRef& ref,
                                          const GenThresholds& th, Micros now) {
  GenDecision d;
  if (now - ref.t > th.t_gen_max_us) d.rules |= static_cast<unsigned>(GenRule::TIME);
  if (heading_diff(ego.heading, ref.heading) >= th.delta_heading_deg) {
    d.rules |= static_cast<unsigned>(GenRule::HEADING);
  }
  if (std::fabs(ego.speed - ref.speed) >= th.delta_speed_mps) {
    d.rules |= static_cast<unsigned>(GenRule::SPEED);
  }
  if (dist(ego.pos, ref.pos) >= th.delta_dist_m) {
    d.rules |= static_cast<unsigned>(GenRule::DISTANCE);
  }
  d.triggered = d.rules != 0;
  return d;
}

// Latest time a new VAM from this sender should arrive: the sender must
// retransmit once it travels delta_dist, and it may have slowed by
// delta_speed without notice. At or below delta_speed the travel-time term
// is unbounded, so T_GenVamMax caps the wait.
inline Micros compute_t_expected(const Vam& vam, Micros rx_time,
                                 const GenThresholds& th) {
  if (vam.speed <= th.delta_speed_mps) return rx_time + th.t_gen_max_us;
  double travel_s = th.delta_dist_m / (vam.speed - th.delta_speed_mps);
  Micros travel_us = seconds_to_us(travel_s);
  return rx_time + std::min(travel_us, th.t_gen_max_us);
}

struct LdmEntry {
  Vam vam;
  Micros rx_time = 0;
  Micros t_expected = 0;
};

// Per-node store of the newest received VAM per remote station.
class Ldm {
 public:
  // Newest generation time wins; late out-of-order duplicates are dropped.
  void insert(const Vam& vam, Micros rx_time, const GenThresholds& th) {
    auto it = entries_.find(vam.station_id);
    if (it != entries_.end() && it->second.vam.gen_time >= vam.gen_time) return;
    entries_[vam.station_id] = {vam, rx_time, compute_t_expected(vam, rx_time, th)};
  }

  std::size_t size() const { return entries_.size(); }

  // Entries whose t_expected has not passed (boundary inclusive), most
  // recently received first; station id breaks rx-time ties.
  std::vector<LdmEntry> fresh_entries(Micros now) const {
    std::vector<LdmEntry> out;
    for (const auto& [_, e] : entries_) {
      if (e.t_expected >= now) out.push_back(e);
    }
    sort_by_recency(out);
    return out;
  }

  std::vector<LdmEntry> all_entries() const {
    std::vector<LdmEntry> out;
    for (const auto& [_, e] : entries_) out.push_back(e);
    sort_by_recency(out);
    return out;
  }

  const LdmEntry* find(VruId station) const {
    auto it = entries_.find(station);
    return it == entries_.end() ? nullptr : &it->second;
  }

 private:
  static void sort_by_recency(std::vector<LdmEntry>& v) {
    std::sort(v.begin(), v.end(), [](const LdmEntry& a, const LdmEntry& b) {
      if (a.rx_time != b.rx_time) return a.rx_time > b.rx_time;
      return a.vam.station_id < b.vam.station_id;
    });
  }

  std::map<VruId, LdmEntry> entries_;
};

}  // namespace vamsim
