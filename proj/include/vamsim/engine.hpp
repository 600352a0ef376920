#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vamsim/channel.hpp"
#include "vamsim/metrics.hpp"
#include "vamsim/redundancy.hpp"
#include "vamsim/rng.hpp"
#include "vamsim/scenario.hpp"
#include "vamsim/vam.hpp"

namespace vamsim {

struct TraceFileScenario {
  std::string trace_path;
  std::string obstacles_path;  // optional, empty = none
};

struct InlineScenario {
  MobilityTrace trace;
  std::vector<Obstacle> obstacles;
};

using ScenarioSpec =
    std::variant<PlatoonParams, CrossingParams, TraceFileScenario, InlineScenario>;

struct RunConfig {
  std::uint64_t seed = 1;
  Micros duration_us = 50'000'000;
  Micros warmup_us = 10'000'000;
  ScenarioSpec scenario = PlatoonParams{};
  GenThresholds gen;
  RmConfig rm;
  ChannelConfig channel;
  MetricsConfig metrics;

  void validate() const {
    if (duration_us <= 0) throw std::invalid_argument("duration_s must be > 0");
    if (warmup_us < 0) throw std::invalid_argument("warmup_s must be >= 0");
    if (warmup_us >= duration_us) {
      throw std::invalid_argument("warmup_s must be smaller than duration_s");
    }
    gen.validate();
    rm.validate();
    channel.validate();
    metrics.validate();
  }
};

struct BuiltScenario {
  MobilityTrace trace;
  std::vector<Obstacle> obstacles;
};

// Generator scenarios draw from the scenario stream of the master seed, so
// every mode sees identical mobility for a given seed.
inline BuiltScenario build_scenario(const ScenarioSpec& spec, std::uint64_t seed,
                                    Micros duration_us) {
  std::uint64_t scenario_seed = stream_seed(seed, RngStream::scenario);
  if (const auto* p = std::get_if<PlatoonParams>(&spec)) {
    PlatoonParams params = *p;
    params.duration_s = us_to_seconds(duration_us);
    return {gen_platoon_scenario(params, scenario_seed), {}};
  }
  if (const auto* c = std::get_if<CrossingParams>(&spec)) {
    CrossingParams params = *c;
    params.duration_s = us_to_seconds(duration_us);
    return {gen_crossing_scenario(params, scenario_seed),
            {default_crossing_building(params)}};
  }
  if (const auto* t = std::get_if<TraceFileScenario>(&spec)) {
    BuiltScenario b;
    b.trace = load_trace(t->trace_path);
    if (!t->obstacles_path.empty()) b.obstacles = load_obstacles(t->obstacles_path);
    return b;
  }
  const auto& inl = std::get<InlineScenario>(spec);
  return {inl.trace, inl.obstacles};
}

struct CbrSample {
  Micros t = 0;
  VruId node = 0;
  double cbr = 0.0;
};

struct FrameRecord {
  Frame frame;
  Vec2 tx_pos;
  std::vector<RxEvent> rx;  // sorted by rx_id
};

// All records carry t >= warmup end; pre-warmup activity only shapes state.
struct RunOutput {
  std::uint64_t seed = 0;
  RmMode mode = RmMode::off;
  Micros duration_us = 0;
  Micros warmup_us = 0;

  std::vector<FrameRecord> frames;
  std::vector<CbrSample> cbr_series;
  std::vector<VprSample> vpr_series;
  std::vector<DiffRecord> diff_records;
  std::vector<MitigationEvent> mitigation_events;
  std::map<VruId, std::int64_t> tx_counts;

  std::int64_t dropped_ref_despawned = 0;
  std::int64_t dropped_rx_despawned = 0;
  std::size_t vru_count = 0;
};

namespace detail {

enum class EventKind : std::uint8_t {
  node_spawn,
  node_despawn,
  gen_check,
  frame_rx,
  metric_tick,
};

struct Event {
  Micros t = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::metric_tick;
  std::uint32_t node = 0;
  std::uint32_t frame_idx = 0;
  std::uint32_t rx_idx = 0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

struct NodeRuntime {
  VruId id = 0;
  bool is_static_observer = false;
  Vec2 static_pos;
  Micros t_first = 0;
  Micros t_last = 0;
  Micros check_phase = 0;
  Ldm ldm;
  std::map<VruId, Micros> last_rx;
  RmNodeState rm;
  std::vector<Interval> pending_rx;  // candidate receptions, for collisions
};

}  // namespace detail

class Simulation {
 public:
  Simulation(const RunConfig& cfg, BuiltScenario scenario)
      : cfg_(cfg),
        scenario_(std::move(scenario)),
        channel_rng_(cfg.seed, RngStream::channel) {
    cfg_.validate();
    init_nodes();
  }

  RunOutput run() {
    schedule_initial_events();
    while (!queue_.empty()) {
      detail::Event ev = queue_.top();
      queue_.pop();
      switch (ev.kind) {
        case detail::EventKind::metric_tick: on_metric_tick(ev.t); break;
        case detail::EventKind::gen_check: on_gen_check(ev.node, ev.t); break;
        case detail::EventKind::frame_rx: on_frame_rx(ev.frame_idx, ev.rx_idx, ev.t); break;
        case detail::EventKind::node_spawn: on_spawn(ev.node, ev.t); break;
        case detail::EventKind::node_despawn: break;  // bookkeeping marker
      }
    }
    return finalize();
  }

 private:
  void init_nodes() {
    for (VruId id : scenario_.trace.vru_ids()) {
      detail::NodeRuntime n;
      n.id = id;
      n.t_first = scenario_.trace.first_t(id);
      n.t_last = scenario_.trace.last_t(id);
      nodes_.push_back(std::move(n));
    }
    // Static observers listen at fixed positions but never transmit and are
    // not VRUs; ids -1, -2, ...
    for (std::size_t i = 0; i < cfg_.metrics.static_observers.size(); ++i) {
      detail::NodeRuntime n;
      n.id = -static_cast<VruId>(i) - 1;
      n.is_static_observer = true;
      n.static_pos = cfg_.metrics.static_observers[i];
      n.t_first = 0;
      n.t_last = cfg_.duration_us;
      nodes_.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i].id] = i;

    // Phases drawn in id order so they do not depend on event interleaving.
    Rng phase_rng(cfg_.seed, RngStream::check_phase);
    for (auto& n : nodes_) {
      if (!n.is_static_observer) n.check_phase = phase_rng.uniform_int(cfg_.gen.t_gen_min_us);
    }
  }

  void schedule_initial_events() {
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].is_static_observer) continue;
      if (nodes_[i].t_first < cfg_.duration_us) {
        push({nodes_[i].t_first, 0, detail::EventKind::node_spawn, i, 0, 0});
        if (nodes_[i].t_last < cfg_.duration_us) {
          push({nodes_[i].t_last, 0, detail::EventKind::node_despawn, i, 0, 0});
        }
      }
    }
    // Metric ticks are scheduled up front: at equal timestamps they precede
    // any same-instant delivery, so awareness at t covers receptions
    // strictly before t.
    for (Micros t = cfg_.warmup_us; t < cfg_.duration_us; t += cfg_.metrics.cadence_us) {
      push({t, 0, detail::EventKind::metric_tick, 0, 0, 0});
    }
  }

  void push(detail::Event ev) {
    ev.seq = next_seq_++;
    queue_.push(ev);
  }

  bool vru_alive(const detail::NodeRuntime& n, Micros t) const {
    return !n.is_static_observer && t >= n.t_first && t <= n.t_last;
  }

  Vec2 node_pos(const detail::NodeRuntime& n, Micros t) const {
    if (n.is_static_observer) return n.static_pos;
    return sample_state(scenario_.trace, n.id, t).pos;
  }

  void on_spawn(std::uint32_t node, Micros /*t*/) {
    const detail::NodeRuntime& n = nodes_[node];
    Micros first = first_check_at(n);
    if (first <= n.t_last && first < cfg_.duration_us) {
      push({first, 0, detail::EventKind::gen_check, node, 0, 0});
    }
  }

  Micros first_check_at(const detail::NodeRuntime& n) const {
    Micros period = cfg_.gen.t_gen_min_us;
    if (n.t_first <= n.check_phase) return n.check_phase;
    Micros k = (n.t_first - n.check_phase + period - 1) / period;
    return n.check_phase + k * period;
  }

  void on_gen_check(std::uint32_t node, Micros now) {
    detail::NodeRuntime& n = nodes_[node];
    if (!vru_alive(n, now)) return;

    VruState ego = sample_state(scenario_.trace, n.id, now);
    const GenThresholds& th = cfg_.gen;
    bool spacing_ok = !n.rm.last_tx_time || now - *n.rm.last_tx_time >= th.t_gen_min_us;

    if (!n.rm.ego_ref) {
      // First check after spawn announces the node.
      transmit(n, ego, now);
    } else if (spacing_ok) {
      switch (cfg_.rm.mode) {
        case RmMode::off:
          if (check_generation_rules(ego, *n.rm.ego_ref, th, now).triggered) {
            transmit(n, ego, now);
          }
          break;
        case RmMode::standard:
          if (check_generation_rules(ego, *n.rm.ego_ref, th, now).triggered) {
            if (auto ref_vam = rm_standard_check(ego, n.ldm, n.rm, cfg_.rm, th, now)) {
              emit_mitigation(ego, *ref_vam, now);
            } else {
              transmit(n, ego, now);
            }
          }
          break;
        case RmMode::adapted:
          if (rm_adapted_on_generate(ego, n.rm, cfg_.rm, th, now) ==
              AdaptedDecision::transmit) {
            transmit(n, ego, now);
          }
          break;
      }
    }

    Micros next = now + th.t_gen_min_us;
    if (next <= n.t_last && next < cfg_.duration_us) {
      push({next, 0, detail::EventKind::gen_check, node, 0, 0});
    }
  }

  void transmit(detail::NodeRuntime& n, const VruState& ego, Micros now) {
    Vam vam;
    vam.station_id = n.id;
    vam.gen_time = now;
    vam.pos = ego.pos;
    vam.speed = ego.speed;
    vam.heading = ego.heading;
    vam.size_bytes = cfg_.channel.frame_size_bytes;
    n.rm.on_transmit(ego, now);

    FrameRecord rec;
    rec.frame = {n.id, now, airtime(vam.size_bytes, cfg_.channel), vam};
    rec.tx_pos = ego.pos;

    std::vector<Receiver> receivers;
    receivers.reserve(nodes_.size());
    for (const auto& other : nodes_) {
      if (other.id == n.id) continue;
      if (other.is_static_observer) {
        receivers.push_back({other.id, other.static_pos});
      } else if (vru_alive(other, now)) {
        receivers.push_back({other.id, node_pos(other, now)});
      }
    }
    // receivers are in node order (sorted by map at init); fix id order for
    // the RNG draw sequence
    std::sort(receivers.begin(), receivers.end(),
              [](const Receiver& a, const Receiver& b) { return a.id < b.id; });

    rec.rx = broadcast(rec.frame, receivers, scenario_.obstacles, rec.tx_pos,
                       cfg_.channel, channel_rng_);
    std::uint32_t frame_idx = static_cast<std::uint32_t>(frames_.size());
    frames_.push_back(std::move(rec));

    auto& stored = frames_[frame_idx];
    for (std::uint32_t i = 0; i < stored.rx.size(); ++i) {
      if (stored.rx[i].outcome != RxOutcome::delivered) continue;
      auto& rxn = nodes_[index_.at(stored.rx[i].rx_id)];
      if (cfg_.channel.collisions_enabled) {
        note_candidate(rxn, stored.frame.t_start, stored.frame.t_end());
      }
      push({stored.rx[i].t_delivery, 0, detail::EventKind::frame_rx,
            static_cast<std::uint32_t>(index_.at(stored.rx[i].rx_id)), frame_idx, i});
    }
  }

  // Candidate reception intervals per receiver, kept for overlap scans at
  // delivery time. A record may only be dropped once no unfinalized
  // candidate can still overlap it, hence the max-airtime margin.
  void note_candidate(detail::NodeRuntime& n, Micros t_start, Micros t_end) {
    max_airtime_ = std::max(max_airtime_, t_end - t_start);
    Micros horizon = t_start - max_airtime_;
    std::erase_if(n.pending_rx, [&](const Interval& iv) { return iv.end <= horizon; });
    n.pending_rx.push_back({t_start, t_end});
  }

  void on_frame_rx(std::uint32_t frame_idx, std::uint32_t rx_idx, Micros now) {
    FrameRecord& rec = frames_[frame_idx];
    RxEvent& rx = rec.rx[rx_idx];
    detail::NodeRuntime& n = nodes_[index_.at(rx.rx_id)];

    if (cfg_.channel.collisions_enabled) {
      int overlapping = 0;
      for (const Interval& iv : n.pending_rx) {
        if (iv.start < rx.t_delivery && rx.t_start < iv.end) ++overlapping;
      }
      if (overlapping > 1) {  // own interval is always present
        rx.outcome = RxOutcome::lost_collision;
        return;
      }
    }

    if (!n.is_static_observer && !vru_alive(n, now)) {
      // Receiver despawned while the frame was on air; nothing to update.
      ++dropped_rx_despawned_;
      return;
    }

    const Vam& vam = rec.frame.payload;
    n.ldm.insert(vam, now, cfg_.gen);
    n.last_rx[vam.station_id] = now;

    if (!n.is_static_observer && cfg_.rm.mode == RmMode::adapted) {
      VruState ego = sample_state(scenario_.trace, n.id, now);
      if (rm_adapted_on_receive(ego, vam, n.rm, cfg_.rm, cfg_.gen, now)) {
        emit_mitigation(ego, vam, now);
      }
    }
  }

  void emit_mitigation(const VruState& ego, const Vam& ref_vam, Micros now) {
    if (now < cfg_.warmup_us) return;
    MitigationEvent ev;
    ev.t = now;
    ev.ego_id = ego.vru_id;
    ev.ref_id = ref_vam.station_id;
    ev.ego_truth = ego;
    ev.ref_vam = ref_vam;
    ev.mode = cfg_.rm.mode;
    if (scenario_.trace.has_vru(ev.ref_id) && scenario_.trace.alive(ev.ref_id, now)) {
      ev.ref_truth = sample_state(scenario_.trace, ev.ref_id, now);
    }
    if (auto d = diff_record(ev)) {
      diff_records_.push_back(*d);
    } else {
      ++dropped_ref_despawned_;
    }
    mitigation_events_.push_back(std::move(ev));
  }

  void on_metric_tick(Micros now) {
    // Truth states of everything alive, once per tick.
    std::vector<VruState> alive_states;
    for (const auto& n : nodes_) {
      if (vru_alive(n, now)) {
        alive_states.push_back(sample_state(scenario_.trace, n.id, now));
      }
    }
    for (const auto& n : nodes_) {
      Vec2 pos;
      if (n.is_static_observer) {
        pos = n.static_pos;
      } else if (vru_alive(n, now)) {
        pos = sample_state(scenario_.trace, n.id, now).pos;
      } else {
        continue;
      }
      if (!cfg_.metrics.in_roi(pos)) continue;
      vpr_series_.push_back(vpr_sample(n.id, pos, alive_states, n.last_rx,
                                       cfg_.metrics.vpr_radius_m,
                                       cfg_.metrics.vpr_validity_us, now));
    }
  }

  RunOutput finalize() {
    RunOutput out;
    out.seed = cfg_.seed;
    out.mode = cfg_.rm.mode;
    out.duration_us = cfg_.duration_us;
    out.warmup_us = cfg_.warmup_us;
    out.vru_count = scenario_.trace.vru_count();
    out.cbr_series = compute_cbr_series();
    out.vpr_series = std::move(vpr_series_);
    out.diff_records = std::move(diff_records_);
    out.mitigation_events = std::move(mitigation_events_);
    out.dropped_ref_despawned = dropped_ref_despawned_;
    out.dropped_rx_despawned = dropped_rx_despawned_;
    for (auto& rec : frames_) {
      if (rec.frame.t_start < cfg_.warmup_us) continue;
      out.tx_counts[rec.frame.tx_id] += 1;
      out.frames.push_back(std::move(rec));
    }
    return out;
  }

  // Post-processing: per node, per window, the union of in-range frame
  // airtime clipped to the window. Carrier-sense radius equals the
  // communication radius; positions are taken at each frame's start.
  std::vector<CbrSample> compute_cbr_series() {
    std::vector<CbrSample> out;
    Micros max_airtime = 0;
    for (const auto& rec : frames_) {
      max_airtime = std::max(max_airtime, rec.frame.airtime_us);
    }
    const Micros window = cfg_.channel.cbr_window_us;
    for (Micros w0 = cfg_.warmup_us; w0 + window <= cfg_.duration_us; w0 += window) {
      Micros w1 = w0 + window;
      // frames with t_start in [w0 - max_airtime, w1)
      auto lo = std::lower_bound(frames_.begin(), frames_.end(), w0 - max_airtime,
                                 [](const FrameRecord& r, Micros v) {
                                   return r.frame.t_start < v;
                                 });
      for (const auto& n : nodes_) {
        bool alive_window =
            n.is_static_observer || (n.t_first <= w0 && n.t_last >= w1);
        if (!alive_window) continue;
        std::vector<Interval> busy;
        for (auto it = lo; it != frames_.end() && it->frame.t_start < w1; ++it) {
          if (it->frame.t_end() <= w0) continue;
          Vec2 pos = it->frame.tx_id == n.id
                         ? it->tx_pos
                         : node_pos_clamped(n, it->frame.t_start);
          if (dist(it->tx_pos, pos) <= cfg_.channel.comm_radius_m) {
            busy.push_back({it->frame.t_start, it->frame.t_end()});
          }
        }
        double cbr = cbr_sample(busy, w0, window);
        if (cfg_.metrics.in_roi(node_pos_clamped(n, w0))) {
          out.push_back({w0, n.id, cbr});
        }
      }
    }
    return out;
  }

  Vec2 node_pos_clamped(const detail::NodeRuntime& n, Micros t) const {
    if (n.is_static_observer) return n.static_pos;
    Micros tc = std::clamp(t, n.t_first, n.t_last);
    return sample_state(scenario_.trace, n.id, tc).pos;
  }

  RunConfig cfg_;
  BuiltScenario scenario_;
  Rng channel_rng_;
  std::vector<detail::NodeRuntime> nodes_;
  std::map<VruId, std::size_t> index_;
  std::priority_queue<detail::Event, std::vector<detail::Event>, detail::EventAfter> queue_;
  std::uint64_t next_seq_ = 0;
  std::vector<FrameRecord> frames_;
  std::vector<VprSample> vpr_series_;
  std::vector<DiffRecord> diff_records_;
  std::vector<MitigationEvent> mitigation_events_;
  Micros max_airtime_ = 0;
  std::int64_t dropped_ref_despawned_ = 0;
  std::int64_t dropped_rx_despawned_ = 0;
};

inline RunOutput run(const RunConfig& cfg) {
  cfg.validate();
  BuiltScenario scenario = build_scenario(cfg.scenario, cfg.seed, cfg.duration_us);
  Simulation sim(cfg, std::move(scenario));
  return sim.run();
}

// Cartesian product of modes x seeds, independent runs, stable ordering
// (modes outer, seeds inner).
inline std::vector<RunOutput> run_matrix(const RunConfig& base,
                                         const std::vector<std::uint64_t>& seeds,
                                         const std::vector<RmMode>& modes) {
  if (seeds.empty() || modes.empty()) {
    throw std::invalid_argument("run_matrix needs at least one seed and one mode");
  }
  std::vector<RunOutput> out;
  out.reserve(seeds.size() * modes.size());
  for (RmMode mode : modes) {
    for (std::uint64_t seed : seeds) {
      RunConfig cfg = base;
      cfg.seed = seed;
      cfg.rm.mode = mode;
      try {
        out.push_back(run(cfg));
      } catch (const std::exception& e) {
        throw std::runtime_error("run(mode=" + std::string(to_string(mode)) +
                                 ", seed=" + std::to_string(seed) +
                                 ") failed: " + e.what());
      }
    }
  }
  return out;
}

}  // namespace vamsim
