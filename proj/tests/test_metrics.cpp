#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "vamsim/metrics.hpp"

using namespace vamsim;

namespace {

VruState vru(VruId id, Vec2 pos, double speed = 1.0, double heading = 0.0) {
  return {id, 0, pos, speed, heading};
}

}  // namespace

TEST_CASE("vpr_sample counts in-range and aware VRUs") {
  std::map<VruId, Micros> last_rx;
  Micros now = 20'000'000;
  Micros validity = 10'000'000;

  SECTION("nobody within the radius") {
    std::vector<VruState> others{vru(2, {100, 0})};
    VprSample s = vpr_sample(1, {0, 0}, others, last_rx, 50.0, validity, now);
    CHECK(s.in_range_count == 0);
    CHECK(s.aware_count == 0);
  }
  SECTION("4 in range, 3 with fresh receptions") {
    std::vector<VruState> others{vru(2, {10, 0}), vru(3, {0, 10}), vru(4, {20, 0}),
                                 vru(5, {30, 0}), vru(6, {200, 0})};
    last_rx[2] = now - 1'000'000;
    last_rx[3] = now - 2'000'000;
    last_rx[4] = now - 9'999'999;
    VprSample s = vpr_sample(1, {0, 0}, others, last_rx, 50.0, validity, now);
    CHECK(s.in_range_count == 4);
    CHECK(s.aware_count == 3);
  }
  SECTION("stale reception counts in the denominator only") {
    std::vector<VruState> others{vru(2, {10, 0})};
    last_rx[2] = now - validity - 1;
    VprSample s = vpr_sample(1, {0, 0}, others, last_rx, 50.0, validity, now);
    CHECK(s.in_range_count == 1);
    CHECK(s.aware_count == 0);
    last_rx[2] = now - validity;  // boundary inclusive
    s = vpr_sample(1, {0, 0}, others, last_rx, 50.0, validity, now);
    CHECK(s.aware_count == 1);
  }
  SECTION("the observer itself never counts") {
    std::vector<VruState> others{vru(1, {0, 0}), vru(2, {10, 0})};
    VprSample s = vpr_sample(1, {0, 0}, others, last_rx, 50.0, validity, now);
    CHECK(s.in_range_count == 1);
  }
}

TEST_CASE("vpr_aggregate is a ratio of sums") {
  SECTION("formula evaluation") {
    std::vector<VprSample> samples{{0, 1, 1, 2}, {0, 1, 3, 4}};
    CHECK(vpr_aggregate(samples) == Catch::Approx(4.0 / 6.0));
  }
  SECTION("full awareness") {
    std::vector<VprSample> samples{{0, 1, 5, 5}};
    CHECK(vpr_aggregate(samples) == 1.0);
  }
  SECTION("zero awareness") {
    std::vector<VprSample> samples{{0, 1, 0, 5}};
    CHECK(vpr_aggregate(samples) == 0.0);
  }
  SECTION("empty denominators are an error") {
    std::vector<VprSample> samples{{0, 1, 0, 0}};
    CHECK_THROWS_AS(vpr_aggregate(samples), std::invalid_argument);
  }
  SECTION("always within [0, 1]") {
    std::mt19937 gen(31);
    std::uniform_int_distribution<int> in_range(0, 10);
    std::vector<VprSample> samples;
    for (int i = 0; i < 100; ++i) {
      int r = in_range(gen);
      int a = r == 0 ? 0 : std::uniform_int_distribution<int>(0, r)(gen);
      samples.push_back({0, 1, a, r});
    }
    samples.push_back({0, 1, 1, 1});
    double v = vpr_aggregate(samples);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("diff_record uses ground truth of both VRUs") {
  MitigationEvent ev;
  ev.t = 15'000'000;
  ev.ego_id = 1;
  ev.ref_id = 2;
  ev.mode = RmMode::standard;

  SECTION("co-located identical motion") {
    ev.ego_truth = vru(1, {5, 5}, 2.0, 90.0);
    ev.ref_truth = vru(2, {5, 5}, 2.0, 90.0);
    auto d = diff_record(ev);
    REQUIRE(d.has_value());
    CHECK(d->d_pos == 0.0);
    CHECK(d->d_speed == 0.0);
    CHECK(d->d_heading == 0.0);
    CHECK(d->ego_speed_truth == 2.0);
  }
  SECTION("diverged reference") {
    ev.ego_truth = vru(1, {0, 0}, 2.0, 90.0);
    ev.ref_truth = vru(2, {5, 0}, 3.0, 100.0);
    auto d = diff_record(ev);
    REQUIRE(d.has_value());
    CHECK(d->d_pos == Catch::Approx(5.0));
    CHECK(d->d_speed == Catch::Approx(1.0));
    CHECK(d->d_heading == Catch::Approx(10.0));
  }
  SECTION("despawned reference yields no record") {
    ev.ego_truth = vru(1, {0, 0});
    ev.ref_truth.reset();
    CHECK_FALSE(diff_record(ev).has_value());
  }
}

TEST_CASE("summarize computes boxplot statistics") {
  SECTION("hand-computed five values") {
    SummaryStats s = summarize({1, 2, 3, 4, 5});
    CHECK(s.median == 3.0);
    CHECK(s.q25 == 2.0);
    CHECK(s.q75 == 4.0);
    CHECK(s.whisker_low == 1.0);
    CHECK(s.whisker_high == 5.0);
    CHECK(s.min == 1.0);
    CHECK(s.max == 5.0);
    CHECK(s.n == 5);
  }
  SECTION("single value") {
    SummaryStats s = summarize({7.5});
    CHECK(s.median == 7.5);
    CHECK(s.q25 == 7.5);
    CHECK(s.q75 == 7.5);
    CHECK(s.whisker_low == 7.5);
    CHECK(s.whisker_high == 7.5);
    CHECK(s.min == 7.5);
    CHECK(s.max == 7.5);
  }
  SECTION("outlier beyond the fence is excluded from the whisker") {
    SummaryStats s = summarize({0, 0, 0, 100});
    CHECK(s.q75 == 25.0);  // linear interpolation
    CHECK(s.whisker_high == 0.0);
    CHECK(s.max == 100.0);
  }
  SECTION("empty input is an error") {
    CHECK_THROWS_AS(summarize({}), std::invalid_argument);
  }
  SECTION("matches a brute-force oracle on random inputs") {
    std::mt19937 gen(37);
    std::uniform_real_distribution<double> val(-50.0, 50.0);
    std::uniform_int_distribution<int> len(1, 60);
    for (int round = 0; round < 400; ++round) {
      std::vector<double> values;
      int n = len(gen);
      for (int i = 0; i < n; ++i) values.push_back(val(gen));
      SummaryStats s = summarize(values);

      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      auto quant = [&](double p) {
        double h = p * (n - 1);
        std::size_t lo = static_cast<std::size_t>(h);
        if (lo + 1 >= sorted.size()) return sorted.back();
        return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
      };
      REQUIRE(s.q25 == Catch::Approx(quant(0.25)));
      REQUIRE(s.median == Catch::Approx(quant(0.5)));
      REQUIRE(s.q75 == Catch::Approx(quant(0.75)));
      double iqr = s.q75 - s.q25;
      double wl = sorted.back();
      double wh = sorted.front();
      for (double v : sorted) {
        if (v >= s.q25 - 1.5 * iqr) { wl = v; break; }
      }
      for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
        if (*it <= s.q75 + 1.5 * iqr) { wh = *it; break; }
      }
      REQUIRE(s.whisker_low == wl);
      REQUIRE(s.whisker_high == wh);
      // ordering holds on the achievable chain
      REQUIRE(s.min <= s.q25);
      REQUIRE(s.q25 <= s.median);
      REQUIRE(s.median <= s.q75);
      REQUIRE(s.q75 <= s.max);
      REQUIRE(s.min <= s.whisker_low);
      REQUIRE(s.whisker_high <= s.max);
      REQUIRE(s.whisker_low <= s.whisker_high);
    }
  }
}
