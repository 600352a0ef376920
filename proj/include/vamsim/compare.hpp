#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vamsim/io.hpp"
#include "vamsim/metrics.hpp"

namespace vamsim {

struct CompareError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pooled per-mode statistics across seeds. Mitigation stats have n = 0 for
// modes without events (off).
//
// The VPR distribution carries one value per observer per run: that
// observer's ratio of summed aware counts over summed in-range counts.
// Observers that never had anyone in range are excluded.
struct ModeStats {
  RmMode mode = RmMode::off;
  std::size_t run_count = 0;
  SummaryStats cbr;
  SummaryStats vpr;  // per-observer ratio of sums
  double vpr_ratio_of_sums = 0.0;  // pooled over everything
  SummaryStats ego_speed;
  SummaryStats d_pos;
  SummaryStats d_speed;
  SummaryStats d_heading;
};

struct ComparisonReport {
  std::vector<ModeStats> per_mode;  // in off, standard, adapted order
  std::string max_cbr_ranking;      // mode names sorted by pooled max CBR, desc
  std::string median_vpr_ranking;   // mode names sorted by median VPR, desc
  std::optional<bool> max_cbr_order_ok;     // off >= standard >= adapted
  std::optional<bool> median_vpr_order_ok;  // off >= adapted >= standard
  std::optional<bool> ego_speed_order_ok;   // median: adapted <= standard
};

inline const ModeStats* find_mode(const ComparisonReport& r, RmMode m) {
  for (const auto& s : r.per_mode) {
    if (s.mode == m) return &s;
  }
  return nullptr;
}

// Refuses to compare runs from different scenarios/configs or with
// mismatched seed sets across modes.
inline ComparisonReport build_comparison(const std::vector<LoadedRun>& runs) {
  if (runs.empty()) throw CompareError("no runs to compare");
  for (const LoadedRun& r : runs) {
    if (r.config != runs.front().config) {
      throw CompareError("runs are not comparable: config mismatch between '" +
                         runs.front().dir + "' and '" + r.dir + "'");
    }
  }
  std::map<RmMode, std::multiset<std::uint64_t>> seeds_by_mode;
  for (const LoadedRun& r : runs) seeds_by_mode[r.mode].insert(r.seed);
  if (seeds_by_mode.size() < 2) {
    throw CompareError("need at least 2 modes to compare, got " +
                       std::to_string(seeds_by_mode.size()));
  }
  for (const auto& [mode, seeds] : seeds_by_mode) {
    if (seeds != seeds_by_mode.begin()->second) {
      throw CompareError(std::string("seed sets differ between modes ") +
                         to_string(seeds_by_mode.begin()->first) + " and " +
                         to_string(mode) + "; runs are not comparable");
    }
  }

  ComparisonReport report;
  for (RmMode mode : {RmMode::off, RmMode::standard, RmMode::adapted}) {
    std::vector<double> cbr, vpr_ratios, speeds, d_pos, d_speed, d_heading;
    std::int64_t aware_sum = 0;
    std::int64_t in_range_sum = 0;
    std::size_t run_count = 0;
    for (const LoadedRun& r : runs) {
      if (r.mode != mode) continue;
      ++run_count;
      for (const auto& s : r.cbr) cbr.push_back(s.cbr);
      std::map<VruId, std::pair<std::int64_t, std::int64_t>> per_observer;
      for (const auto& s : r.vpr) {
        aware_sum += s.aware_count;
        in_range_sum += s.in_range_count;
        auto& [aware, in_range] = per_observer[s.observer_id];
        aware += s.aware_count;
        in_range += s.in_range_count;
      }
      for (const auto& [_, sums] : per_observer) {
        if (sums.second > 0) {
          vpr_ratios.push_back(static_cast<double>(sums.first) / sums.second);
        }
      }
      for (const auto& d : r.diffs) {
        speeds.push_back(d.ego_speed_truth);
        d_pos.push_back(d.d_pos);
        d_speed.push_back(d.d_speed);
        d_heading.push_back(d.d_heading);
      }
    }
    if (run_count == 0) continue;
    ModeStats s;
    s.mode = mode;
    s.run_count = run_count;
    if (!cbr.empty()) s.cbr = summarize(cbr);
    if (!vpr_ratios.empty()) s.vpr = summarize(vpr_ratios);
    s.vpr_ratio_of_sums =
        in_range_sum > 0 ? static_cast<double>(aware_sum) / in_range_sum : 0.0;
    if (!speeds.empty()) {
      s.ego_speed = summarize(speeds);
      s.d_pos = summarize(d_pos);
      s.d_speed = summarize(d_speed);
      s.d_heading = summarize(d_heading);
    }
    report.per_mode.push_back(s);
  }

  auto ranking = [&](auto value) {
    std::vector<const ModeStats*> order;
    for (const auto& s : report.per_mode) order.push_back(&s);
    std::stable_sort(order.begin(), order.end(),
                     [&](const ModeStats* a, const ModeStats* b) {
                       return value(*a) > value(*b);
                     });
    std::string out;
    for (const ModeStats* s : order) {
      if (!out.empty()) out += " >= ";
      out += to_string(s->mode);
    }
    return out;
  };
  report.max_cbr_ranking = ranking([](const ModeStats& s) { return s.cbr.max; });
  report.median_vpr_ranking = ranking([](const ModeStats& s) { return s.vpr.median; });

  const ModeStats* off = find_mode(report, RmMode::off);
  const ModeStats* std_ = find_mode(report, RmMode::standard);
  const ModeStats* adp = find_mode(report, RmMode::adapted);
  if (off && std_ && adp) {
    report.max_cbr_order_ok =
        off->cbr.max >= std_->cbr.max && std_->cbr.max >= adp->cbr.max;
    report.median_vpr_order_ok =
        off->vpr.median >= adp->vpr.median && adp->vpr.median >= std_->vpr.median;
  }
  if (std_ && adp && std_->ego_speed.n > 0 && adp->ego_speed.n > 0) {
    report.ego_speed_order_ok = adp->ego_speed.median <= std_->ego_speed.median;
  }
  return report;
}

namespace detail_compare {

inline nlohmann::json stats_json(const SummaryStats& s) {
  if (s.n == 0) return nullptr;
  return {{"median", s.median}, {"q25", s.q25},   {"q75", s.q75},
          {"wlow", s.whisker_low}, {"whigh", s.whisker_high},
          {"min", s.min},       {"max", s.max},   {"n", s.n}};
}

inline std::string fmt3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace detail_compare

inline nlohmann::json comparison_to_json(const ComparisonReport& r) {
  using detail_compare::stats_json;
  nlohmann::json j;
  j["format_version"] = 1;
  nlohmann::json modes = nlohmann::json::object();
  for (const ModeStats& s : r.per_mode) {
    nlohmann::json m;
    m["runs"] = s.run_count;
    m["cbr"] = stats_json(s.cbr);
    m["vpr"] = stats_json(s.vpr);
    m["vpr_ratio_of_sums"] = s.vpr_ratio_of_sums;
    m["ego_speed_at_mitigation"] = stats_json(s.ego_speed);
    m["d_pos"] = stats_json(s.d_pos);
    m["d_speed"] = stats_json(s.d_speed);
    m["d_heading"] = stats_json(s.d_heading);
    modes[to_string(s.mode)] = m;
  }
  j["modes"] = modes;
  nlohmann::json verdicts;
  verdicts["max_cbr_ranking"] = r.max_cbr_ranking;
  verdicts["median_vpr_ranking"] = r.median_vpr_ranking;
  if (r.max_cbr_order_ok) verdicts["max_cbr_order_ok"] = *r.max_cbr_order_ok;
  if (r.median_vpr_order_ok) verdicts["median_vpr_order_ok"] = *r.median_vpr_order_ok;
  if (r.ego_speed_order_ok) verdicts["ego_speed_order_ok"] = *r.ego_speed_order_ok;
  j["verdicts"] = verdicts;
  return j;
}

// Plain-text table mirroring the boxplot statistics, 3 decimals.
inline std::string comparison_to_text(const ComparisonReport& r) {
  using detail_compare::fmt3;
  std::ostringstream os;
  auto table = [&](const std::string& title, auto pick) {
    os << title << "\n";
    os << "  mode      median     q25      q75     wlow    whigh      min      max        n\n";
    for (const ModeStats& s : r.per_mode) {
      const SummaryStats& st = pick(s);
      os << "  " << to_string(s.mode);
      for (std::size_t pad = std::string(to_string(s.mode)).size(); pad < 8; ++pad) os << ' ';
      if (st.n == 0) {
        os << "       -        -        -        -        -        -        -        0\n";
        continue;
      }
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%8s %8s %8s %8s %8s %8s %8s %8zu",
                    fmt3(st.median).c_str(), fmt3(st.q25).c_str(),
                    fmt3(st.q75).c_str(), fmt3(st.whisker_low).c_str(),
                    fmt3(st.whisker_high).c_str(), fmt3(st.min).c_str(),
                    fmt3(st.max).c_str(), st.n);
      os << buf << "\n";
    }
  };
  table("CBR", [](const ModeStats& s) -> const SummaryStats& { return s.cbr; });
  table("VPR (per-observer ratio of sums)",
        [](const ModeStats& s) -> const SummaryStats& { return s.vpr; });
  table("ego speed at mitigation [m/s]",
        [](const ModeStats& s) -> const SummaryStats& { return s.ego_speed; });
  table("position difference at mitigation [m]",
        [](const ModeStats& s) -> const SummaryStats& { return s.d_pos; });
  table("speed difference at mitigation [m/s]",
        [](const ModeStats& s) -> const SummaryStats& { return s.d_speed; });
  table("heading difference at mitigation [deg]",
        [](const ModeStats& s) -> const SummaryStats& { return s.d_heading; });
  os << "verdicts\n";
  os << "  max CBR ranking:    " << r.max_cbr_ranking << "\n";
  os << "  median VPR ranking: " << r.median_vpr_ranking << "\n";
  if (r.max_cbr_order_ok) {
    os << "  max CBR off >= standard >= adapted: "
       << (*r.max_cbr_order_ok ? "yes" : "no") << "\n";
  }
  if (r.median_vpr_order_ok) {
    os << "  median VPR off >= adapted >= standard: "
       << (*r.median_vpr_order_ok ? "yes" : "no") << "\n";
  }
  if (r.ego_speed_order_ok) {
    os << "  median mitigation speed adapted <= standard: "
       << (*r.ego_speed_order_ok ? "yes" : "no") << "\n";
  }
  return os.str();
}

}  // namespace vamsim
