#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vamsim/geometry.hpp"
#include "vamsim/redundancy.hpp"
#include "vamsim/scenario.hpp"

namespace vamsim {

struct VprSample {
  Micros t = 0;
  VruId observer_id = 0;
  int aware_count = 0;
  int in_range_count = 0;
};

struct MetricsConfig {
  Micros cadence_us = 100'000;
  double vpr_radius_m = 50.0;
  Micros vpr_validity_us = 10'000'000;  // num_skip * T_GenVamMax by default
  std::optional<std::array<double, 4>> roi;  // x0, y0, x1, y1
  std::vector<Vec2> static_observers;

  bool in_roi(const Vec2& p) const {
    if (!roi) return true;
    return p.x >= (*roi)[0] && p.y >= (*roi)[1] && p.x <= (*roi)[2] &&
           p.y <= (*roi)[3];
  }

  void validate() const {
    if (cadence_us <= 0) throw std::invalid_argument("metrics cadence must be > 0");
    if (vpr_radius_m <= 0) throw std::invalid_argument("vpr radius must be > 0");
    if (vpr_validity_us <= 0) throw std::invalid_argument("vpr validity must be > 0");
    if (roi && ((*roi)[0] > (*roi)[2] || (*roi)[1] > (*roi)[3])) {
      throw std::invalid_argument("roi must be [x0,y0,x1,y1] with x0<=x1, y0<=y1");
    }
  }
};

// One observer at one instant: how many VRUs are truly within the radius,
// and for how many of those a VAM was received recently enough. Awareness
// counts receptions strictly before t and no older than the validity window.
inline VprSample vpr_sample(VruId observer_id, const Vec2& observer_pos,
                            const std::vector<VruState>& others,
                            const std::map<VruId, Micros>& last_rx,
                            double radius_m, Micros validity_us, Micros t) {
  VprSample s;
  s.t = t;
  s.observer_id = observer_id;
  for (const VruState& o : others) {
    if (o.vru_id == observer_id) continue;
    if (dist(observer_pos, o.pos) > radius_m) continue;
    ++s.in_range_count;
    auto it = last_rx.find(o.vru_id);
    if (it != last_rx.end() && it->second < t && t - it->second <= validity_us) {
      ++s.aware_count;
    }
  }
  return s;
}

// Ratio of sums, not mean of ratios. Samples with an empty denominator
// contribute nothing.
inline double vpr_aggregate(const std::vector<VprSample>& samples) {
  std::int64_t aware = 0;
  std::int64_t in_range = 0;
  for (const VprSample& s : samples) {
    aware += s.aware_count;
    in_range += s.in_range_count;
  }
  if (in_range == 0) {
    throw std::invalid_argument("vpr_aggregate: no sample has VRUs in range");
  }
  return static_cast<double>(aware) / static_cast<double>(in_range);
}

// Ground-truth divergence at a mitigation event.
struct DiffRecord {
  Micros t = 0;
  VruId ego_id = 0;
  VruId ref_id = 0;
  double ego_speed_truth = 0.0;
  double d_pos = 0.0;
  double d_speed = 0.0;
  double d_heading = 0.0;
  RmMode mode = RmMode::off;
};

// Deltas from the ground-truth states of both VRUs at event time, not from
// the VAM contents. Absent when the reference VRU has despawned.
inline std::optional<DiffRecord> diff_record(const MitigationEvent& event) {
  if (!event.ref_truth) return std::nullopt;
  DiffRecord r;
  r.t = event.t;
  r.ego_id = event.ego_id;
  r.ref_id = event.ref_id;
  r.ego_speed_truth = event.ego_truth.speed;
  r.d_pos = dist(event.ego_truth.pos, event.ref_truth->pos);
  r.d_speed = std::fabs(event.ego_truth.speed - event.ref_truth->speed);
  r.d_heading = heading_diff(event.ego_truth.heading, event.ref_truth->heading);
  r.mode = event.mode;
  return r;
}

struct SummaryStats {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

namespace detail {
// Linear interpolation between order statistics.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  double h = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}
}  // namespace detail

// Boxplot-style summary: quartiles by linear interpolation, whiskers at the
// most extreme data values within 1.5*IQR of the quartiles.
inline SummaryStats summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty input");
  std::sort(values.begin(), values.end());
  SummaryStats s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.back();
  s.q25 = detail::quantile_sorted(values, 0.25);
  s.median = detail::quantile_sorted(values, 0.50);
  s.q75 = detail::quantile_sorted(values, 0.75);
  double iqr = s.q75 - s.q25;
  double lo_fence = s.q25 - 1.5 * iqr;
  double hi_fence = s.q75 + 1.5 * iqr;
  s.whisker_low = s.max;
  s.whisker_high = s.min;
  for (double v : values) {
    if (v >= lo_fence) {
      s.whisker_low = v;  // smallest value within the lower fence
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= hi_fence) {
      s.whisker_high = *it;  // largest value within the upper fence
      break;
    }
  }
  return s;
}

}  // namespace vamsim
