#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vamsim/geometry.hpp"
#include "vamsim/rng.hpp"
#include "vamsim/scenario.hpp"
#include "vamsim/vam.hpp"

namespace vamsim {

// Simplified broadcast medium: unit-disc range, binary line of sight with
// Bernoulli losses, overlap collisions without capture, zero propagation
// delay.
struct ChannelConfig {
  std::int64_t bitrate_bps = 6'000'000;
  int frame_size_bytes = 300;
  Micros phy_overhead_us = 0;
  double comm_radius_m = 500.0;
  double p_loss_los = 0.0;
  double p_loss_nlos = 0.9;
  bool collisions_enabled = true;
  Micros cbr_window_us = 100'000;

  void validate() const {
    if (bitrate_bps <= 0) throw std::invalid_argument("bitrate must be > 0");
    if (frame_size_bytes <= 0) throw std::invalid_argument("frame size must be > 0");
    if (phy_overhead_us < 0) throw std::invalid_argument("phy overhead must be >= 0");
    if (comm_radius_m <= 0) throw std::invalid_argument("comm radius must be > 0");
    if (p_loss_los < 0 || p_loss_los > 1 || p_loss_nlos < 0 || p_loss_nlos > 1) {
      throw std::invalid_argument("loss probabilities must be in [0, 1]");
    }
    if (cbr_window_us <= 0) throw std::invalid_argument("cbr window must be > 0");
  }
};

// Payload airtime rounded up to whole microseconds.
inline Micros airtime(int size_bytes, const ChannelConfig& cfg) {
  if (size_bytes <= 0) throw std::invalid_argument("frame size must be > 0");
  std::int64_t bits = static_cast<std::int64_t>(size_bytes) * 8;
  Micros us = (bits * 1'000'000 + cfg.bitrate_bps - 1) / cfg.bitrate_bps;
  return us + cfg.phy_overhead_us;
}

struct Frame {
  VruId tx_id = 0;
  Micros t_start = 0;
  Micros airtime_us = 0;
  Vam payload;

  Micros t_end() const { return t_start + airtime_us; }
};

enum class RxOutcome { delivered, lost_range, lost_nlos, lost_random, lost_collision };

inline const char* to_string(RxOutcome o) {
  switch (o) {
    case RxOutcome::delivered: return "DELIVERED";
    case RxOutcome::lost_range: return "LOST_RANGE";
    case RxOutcome::lost_nlos: return "LOST_NLOS";
    case RxOutcome::lost_random: return "LOST_RANDOM";
    case RxOutcome::lost_collision: return "LOST_COLLISION";
  }
  return "?";
}

struct RxEvent {
  VruId rx_id = 0;
  Micros t_start = 0;    // frame fields mirrored for logging
  Micros airtime_us = 0;
  VruId tx_id = 0;
  Micros t_delivery = 0;  // t_start + airtime; propagation delay neglected
  RxOutcome outcome = RxOutcome::delivered;
};

// True iff segment a-b touches any obstacle boundary or interior
// (vertex contact included).
inline bool los_blocked(const Vec2& a, const Vec2& b,
                        const std::vector<Obstacle>& obstacles) {
  for (const Obstacle& o : obstacles) {
    const auto& poly = o.polygon;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (detail::segments_intersect(a, b, poly[i], poly[(i + 1) % n])) return true;
    }
    if (detail::point_in_polygon(a, poly) || detail::point_in_polygon(b, poly)) {
      return true;
    }
  }
  return false;
}

struct Receiver {
  VruId id = 0;
  Vec2 pos;
};

// Per-receiver delivery outcome, collisions pending. Receivers must be
// sorted by id; one RNG draw is consumed for every in-range receiver so the
// stream does not depend on LOS classification.
inline std::vector<RxEvent> broadcast(const Frame& frame,
                                      const std::vector<Receiver>& receivers,
                                      const std::vector<Obstacle>& obstacles,
                                      const Vec2& tx_pos,
                                      const ChannelConfig& cfg, Rng& rng) {
  std::vector<RxEvent> out;
  out.reserve(receivers.size());
  for (const Receiver& r : receivers) {
    RxEvent e;
    e.rx_id = r.id;
    e.t_start = frame.t_start;
    e.airtime_us = frame.airtime_us;
    e.tx_id = frame.tx_id;
    e.t_delivery = frame.t_end();
    if (dist(tx_pos, r.pos) > cfg.comm_radius_m) {
      e.outcome = RxOutcome::lost_range;
    } else {
      double u = rng.uniform();
      if (los_blocked(tx_pos, r.pos, obstacles)) {
        e.outcome = u < cfg.p_loss_nlos ? RxOutcome::lost_nlos : RxOutcome::delivered;
      } else {
        e.outcome = u < cfg.p_loss_los ? RxOutcome::lost_random : RxOutcome::delivered;
      }
    }
    out.push_back(e);
  }
  return out;
}

// Batch collision resolution over a set of receptions: per receiver, any
// two would-be-delivered frames with overlapping [t_start, t_end) intervals
// are both lost. No capture effect.
inline void resolve_collisions(std::vector<RxEvent>& events) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].outcome == RxOutcome::delivered ||
        events[i].outcome == RxOutcome::lost_collision) {
      idx.push_back(i);
    }
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (events[a].rx_id != events[b].rx_id) return events[a].rx_id < events[b].rx_id;
    return events[a].t_start < events[b].t_start;
  });
  for (std::size_t i = 0; i < idx.size(); ++i) {
    events[idx[i]].outcome = RxOutcome::delivered;
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      RxEvent& a = events[idx[i]];
      RxEvent& b = events[idx[j]];
      if (a.rx_id != b.rx_id) break;
      if (b.t_start >= a.t_start + a.airtime_us) break;  // sorted: no overlap later
      a.outcome = RxOutcome::lost_collision;
      b.outcome = RxOutcome::lost_collision;
    }
  }
}

struct Interval {
  Micros start = 0;
  Micros end = 0;
};

// Total length of the union of intervals clipped to [w_start, w_end).
inline Micros interval_union_length(std::vector<Interval> intervals,
                                    Micros w_start, Micros w_end) {
  for (Interval& iv : intervals) {
    iv.start = std::max(iv.start, w_start);
    iv.end = std::min(iv.end, w_end);
  }
  std::erase_if(intervals, [](const Interval& iv) { return iv.end <= iv.start; });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  Micros total = 0;
  Micros cur_start = 0;
  Micros cur_end = std::numeric_limits<Micros>::min();
  bool open = false;
  for (const Interval& iv : intervals) {
    if (!open || iv.start > cur_end) {
      if (open) total += cur_end - cur_start;
      cur_start = iv.start;
      cur_end = iv.end;
      open = true;
    } else {
      cur_end = std::max(cur_end, iv.end);
    }
  }
  if (open) total += cur_end - cur_start;
  return total;
}

// CBR over one window: union of busy intervals / window length. The caller
// pre-filters frames to those whose transmitter was within carrier-sense
// range of the node at transmission time (own transmissions included).
inline double cbr_sample(const std::vector<Interval>& busy, Micros w_start,
                         Micros cbr_window_us) {
  Micros busy_us = interval_union_length(busy, w_start, w_start + cbr_window_us);
  return static_cast<double>(busy_us) / static_cast<double>(cbr_window_us);
}

}  // namespace vamsim
