#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "vamsim/csv.hpp"
#include "vamsim/geometry.hpp"
#include "vamsim/rng.hpp"

namespace vamsim {

using Micros = std::int64_t;
using VruId = std::int64_t;

constexpr Micros kMicrosPerSecond = 1'000'000;

inline Micros seconds_to_us(double s) {
  return static_cast<Micros>(std::llround(s * 1e6));
}
inline double us_to_seconds(Micros us) { return static_cast<double>(us) / 1e6; }

// Ground-truth kinematic state of one VRU at one instant.
struct VruState {
  VruId vru_id = 0;
  Micros t = 0;
  Vec2 pos;
  double speed = 0.0;    // m/s, >= 0
  double heading = 0.0;  // degrees, [0, 360)
};

enum class TraceFormat { csv };

// Immutable after construction; per-VRU samples strictly increasing in t.
class MobilityTrace {
 public:
  struct Sample {
    Micros t = 0;
    Vec2 pos;
    double speed = 0.0;
    double heading = 0.0;

    bool operator==(const Sample&) const = default;
  };

  void add_vru(VruId id, std::vector<Sample> samples) {
    if (samples.size() < 2) {
      throw std::invalid_argument("vru " + std::to_string(id) +
                                  " has fewer than 2 samples");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].t <= samples[i - 1].t) {
        throw std::invalid_argument("vru " + std::to_string(id) +
                                    ": sample times not strictly increasing");
      }
    }
    samples_[id] = std::move(samples);
  }

  bool empty() const { return samples_.empty(); }
  std::size_t vru_count() const { return samples_.size(); }

  std::vector<VruId> vru_ids() const {
    std::vector<VruId> ids;
    ids.reserve(samples_.size());
    for (const auto& [id, _] : samples_) ids.push_back(id);
    return ids;
  }

  bool has_vru(VruId id) const { return samples_.count(id) != 0; }

  const std::vector<Sample>& samples(VruId id) const {
    auto it = samples_.find(id);
    if (it == samples_.end()) {
      throw std::out_of_range("unknown vru id " + std::to_string(id));
    }
    return it->second;
  }

  Micros first_t(VruId id) const { return samples(id).front().t; }
  Micros last_t(VruId id) const { return samples(id).back().t; }

  bool alive(VruId id, Micros t) const {
    const auto& s = samples(id);
    return t >= s.front().t && t <= s.back().t;
  }

  // Global span over all VRUs; requires a non-empty trace.
  Micros span_start() const {
    Micros t = std::numeric_limits<Micros>::max();
    for (const auto& [_, s] : samples_) t = std::min(t, s.front().t);
    return t;
  }
  Micros span_end() const {
    Micros t = std::numeric_limits<Micros>::min();
    for (const auto& [_, s] : samples_) t = std::max(t, s.back().t);
    return t;
  }

  const std::map<VruId, std::vector<Sample>>& all() const { return samples_; }

 private:
  std::map<VruId, std::vector<Sample>> samples_;
};

// Linear interpolation of position and speed; heading along the shorter
// circular arc. Exact sample times are returned verbatim.
inline VruState sample_state(const MobilityTrace& trace, VruId id, Micros t) {
  const auto& samples = trace.samples(id);
  if (t < samples.front().t || t > samples.back().t) {
    throw std::out_of_range("t=" + std::to_string(t) + " outside lifespan of vru " +
                            std::to_string(id));
  }
  auto it = std::lower_bound(
      samples.begin(), samples.end(), t,
      [](const MobilityTrace::Sample& s, Micros v) { return s.t < v; });
  VruState out;
  out.vru_id = id;
  out.t = t;
  if (it->t == t) {
    out.pos = it->pos;
    out.speed = it->speed;
    out.heading = it->heading;
    return out;
  }
  const MobilityTrace::Sample& hi = *it;
  const MobilityTrace::Sample& lo = *(it - 1);
  double frac = static_cast<double>(t - lo.t) / static_cast<double>(hi.t - lo.t);
  out.pos = lo.pos + (hi.pos - lo.pos) * frac;
  out.speed = lo.speed + (hi.speed - lo.speed) * frac;
  out.heading = interp_heading(lo.heading, hi.heading, frac);
  return out;
}

// Trace CSV: t_us,id,x_m,y_m,speed_mps,heading_deg ('#' comments, header
// optional, rows sortable by (id, t)).
inline MobilityTrace load_trace(const std::string& path,
                                TraceFormat format = TraceFormat::csv) {
  (void)format;  // csv is the only format tag so far
  auto rows = csv::read_rows(path);
  if (!rows.empty() && csv::looks_like_header(rows.front())) {
    rows.erase(rows.begin());
  }
  if (rows.empty()) throw ParseError(path + ": no samples");

  struct Raw {
    long line_no;
    VruId id;
    MobilityTrace::Sample s;
  };
  std::vector<Raw> raw;
  raw.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.fields.size() != 6) {
      throw ParseError("line " + std::to_string(row.line_no) +
                       ": expected 6 fields, got " +
                       std::to_string(row.fields.size()));
    }
    Raw r;
    r.line_no = row.line_no;
    r.s.t = csv::parse_int(row.fields[0], row.line_no, "t_us");
    r.id = csv::parse_int(row.fields[1], row.line_no, "id");
    r.s.pos.x = csv::parse_double(row.fields[2], row.line_no, "x_m");
    r.s.pos.y = csv::parse_double(row.fields[3], row.line_no, "y_m");
    r.s.speed = csv::parse_double(row.fields[4], row.line_no, "speed_mps");
    r.s.heading = csv::parse_double(row.fields[5], row.line_no, "heading_deg");
    if (!std::isfinite(r.s.pos.x) || !std::isfinite(r.s.pos.y) ||
        !std::isfinite(r.s.speed) || !std::isfinite(r.s.heading)) {
      throw ParseError("line " + std::to_string(r.line_no) + ": non-finite value");
    }
    if (r.s.speed < 0.0) {
      throw ParseError("line " + std::to_string(r.line_no) + ": negative speed");
    }
    r.s.heading = normalize_heading(r.s.heading);
    raw.push_back(r);
  }

  std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    return a.id != b.id ? a.id < b.id : a.s.t < b.s.t;
  });
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (raw[i].id == raw[i - 1].id && raw[i].s.t == raw[i - 1].s.t) {
      throw ParseError("line " + std::to_string(raw[i].line_no) +
                       ": duplicate (id, t) pair (" + std::to_string(raw[i].id) +
                       ", " + std::to_string(raw[i].s.t) + ")");
    }
  }

  MobilityTrace trace;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i;
    std::vector<MobilityTrace::Sample> samples;
    while (j < raw.size() && raw[j].id == raw[i].id) {
      samples.push_back(raw[j].s);
      ++j;
    }
    if (samples.size() < 2) {
      throw ParseError("vru " + std::to_string(raw[i].id) +
                       " has a single sample; cannot interpolate");
    }
    trace.add_vru(raw[i].id, std::move(samples));
    i = j;
  }
  return trace;
}

inline void save_trace(const MobilityTrace& trace, const std::string& path) {
  csv::Writer w(path, "t_us,id,x_m,y_m,speed_mps,heading_deg");
  for (const auto& [id, samples] : trace.all()) {
    for (const auto& s : samples) {
      w.row(std::to_string(s.t) + "," + std::to_string(id) + "," +
            csv::fmt(s.pos.x) + "," + csv::fmt(s.pos.y) + "," +
            csv::fmt(s.speed) + "," + csv::fmt(s.heading));
    }
  }
}

// Obstacle CSV: obstacle_id,vertex_index,x_m,y_m
inline std::vector<Obstacle> load_obstacles(const std::string& path) {
  auto rows = csv::read_rows(path);
  if (!rows.empty() && csv::looks_like_header(rows.front())) {
    rows.erase(rows.begin());
  }
  std::map<std::int64_t, std::map<std::int64_t, Vec2>> grouped;
  for (const auto& row : rows) {
    if (row.fields.size() != 4) {
      throw ParseError("line " + std::to_string(row.line_no) +
                       ": expected 4 fields");
    }
    std::int64_t oid = csv::parse_int(row.fields[0], row.line_no, "obstacle_id");
    std::int64_t vi = csv::parse_int(row.fields[1], row.line_no, "vertex_index");
    Vec2 v{csv::parse_double(row.fields[2], row.line_no, "x_m"),
           csv::parse_double(row.fields[3], row.line_no, "y_m")};
    if (!grouped[oid].emplace(vi, v).second) {
      throw ParseError("line " + std::to_string(row.line_no) +
                       ": duplicate vertex_index");
    }
  }
  std::vector<Obstacle> out;
  for (const auto& [oid, verts] : grouped) {
    Obstacle o;
    for (const auto& [_, v] : verts) o.polygon.push_back(v);
    validate_obstacle(o);
    out.push_back(std::move(o));
  }
  return out;
}

inline void save_obstacles(const std::vector<Obstacle>& obstacles,
                           const std::string& path) {
  csv::Writer w(path, "obstacle_id,vertex_index,x_m,y_m");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    for (std::size_t j = 0; j < obstacles[i].polygon.size(); ++j) {
      const Vec2& v = obstacles[i].polygon[j];
      w.row(std::to_string(i) + "," + std::to_string(j) + "," + csv::fmt(v.x) +
            "," + csv::fmt(v.y));
    }
  }
}

struct PlatoonParams {
  int n_bikes = 30;
  double red_duration_s = 15.0;  // traffic light red phase
  double accel_mps2 = 1.0;
  double cruise_mps = 5.0;
  double gap_m = 1.5;
  double duration_s = 50.0;
};

// Queued bicycles on a straight eastbound lane; stationary through the red
// phase, then staggered constant-acceleration departures up to cruise speed.
// Pure function of (params, seed).
//
// Each bicycle joins the simulation at an activation offset uniform in
// [0, 3) s: the queue powers on V2X independently rather than in lockstep,
// which would phase-lock every TIME beacon (and every num_skip forced
// transmission) across the fleet.
inline MobilityTrace gen_platoon_scenario(const PlatoonParams& p,
                                          std::uint64_t seed) {
  if (p.n_bikes < 1) throw std::invalid_argument("n_bikes must be >= 1");
  if (p.accel_mps2 <= 0) throw std::invalid_argument("accel must be > 0");
  if (p.cruise_mps <= 0) throw std::invalid_argument("cruise_speed must be > 0");
  if (p.gap_m <= 0) throw std::invalid_argument("gap must be > 0");
  if (p.red_duration_s < 0) throw std::invalid_argument("red_duration must be >= 0");
  if (p.duration_s <= 3.1) throw std::invalid_argument("duration must exceed 3.1 s");

  Rng rng(seed);
  const Micros duration = seconds_to_us(p.duration_s);
  const Micros sample_dt = 100'000;
  MobilityTrace trace;

  for (int i = 0; i < p.n_bikes; ++i) {
    const Micros activation = rng.uniform_int(3 * kMicrosPerSecond);
    // reaction delay uniform in [0, 1) s after the light turns green
    const Micros depart = seconds_to_us(p.red_duration_s) + rng.uniform_int(kMicrosPerSecond);
    const Micros cruise_at =
        depart + seconds_to_us(p.cruise_mps / p.accel_mps2);
    const double x0 = -p.gap_m * i;

    // Sample grid plus the two kinematic breakpoints, so speed (piecewise
    // linear in t) interpolates exactly.
    std::set<Micros> times;
    times.insert(activation);
    for (Micros t = 0; t <= duration; t += sample_dt) {
      if (t > activation) times.insert(t);
    }
    times.insert(duration);
    if (depart > activation && depart <= duration) times.insert(depart);
    if (cruise_at > activation && cruise_at <= duration) times.insert(cruise_at);

    std::vector<MobilityTrace::Sample> samples;
    samples.reserve(times.size());
    for (Micros t : times) {
      double speed;
      double x;
      if (t <= depart) {
        speed = 0.0;
        x = x0;
      } else if (t <= cruise_at) {
        double dt = us_to_seconds(t - depart);
        speed = p.accel_mps2 * dt;
        x = x0 + 0.5 * p.accel_mps2 * dt * dt;
      } else {
        double t_ramp = us_to_seconds(cruise_at - depart);
        double dt = us_to_seconds(t - cruise_at);
        speed = p.cruise_mps;
        x = x0 + 0.5 * p.accel_mps2 * t_ramp * t_ramp + p.cruise_mps * dt;
      }
      samples.push_back({t, {x, 0.0}, speed, 90.0});
    }
    trace.add_vru(i, std::move(samples));
  }
  return trace;
}

struct CrossingParams {
  double flow_a_per_min = 60.0;  // eastbound road along y = 0
  double flow_b_per_min = 60.0;  // northbound road along x = 0
  double cruise_mps = 4.0;
  double approach_m = 150.0;  // arm length on each side of the junction
  double duration_s = 50.0;
};

// Building in the third quadrant; nearly touches both approach roads so it
// blocks line of sight between any pair of approaching bicycles.
inline Obstacle default_crossing_building(const CrossingParams& p) {
  double far = p.approach_m - 5.0;
  return make_rect_obstacle(-far, -far, -4.0, -4.0);
}

// Two perpendicular constant-speed streams with seeded-Poisson arrivals.
// Stream A draws all its arrival gaps before stream B.
inline MobilityTrace gen_crossing_scenario(const CrossingParams& p,
                                           std::uint64_t seed) {
  if (p.flow_a_per_min < 0 || p.flow_b_per_min < 0) {
    throw std::invalid_argument("flows must be >= 0");
  }
  if (p.cruise_mps <= 0) throw std::invalid_argument("cruise_speed must be > 0");
  if (p.duration_s <= 0) throw std::invalid_argument("duration must be > 0");
  if (p.approach_m <= 10.0) throw std::invalid_argument("approach must be > 10 m");

  Rng rng(seed);
  const Micros duration = seconds_to_us(p.duration_s);
  const double travel_s = 2.0 * p.approach_m / p.cruise_mps;
  MobilityTrace trace;
  VruId next_id = 0;

  auto gen_stream = [&](double flow_per_min, Vec2 origin, double heading) {
    if (flow_per_min <= 0.0) return;
    const double rate = flow_per_min / 60.0;
    double t_s = 0.0;
    while (true) {
      t_s += rng.exponential(rate);
      Micros spawn = seconds_to_us(t_s);
      if (spawn >= duration) break;
      Micros end = std::min(duration, spawn + seconds_to_us(travel_s));
      if (end <= spawn) continue;  // spawned on the final instant
      Vec2 dir = heading_dir(heading);
      double dt = us_to_seconds(end - spawn);
      std::vector<MobilityTrace::Sample> samples{
          {spawn, origin, p.cruise_mps, heading},
          {end, origin + dir * (p.cruise_mps * dt), p.cruise_mps, heading}};
      trace.add_vru(next_id++, std::move(samples));
    }
  };

  gen_stream(p.flow_a_per_min, {-p.approach_m, 0.0}, 90.0);  // east
  gen_stream(p.flow_b_per_min, {0.0, -p.approach_m}, 0.0);   // north
  return trace;
}

}  // namespace vamsim
