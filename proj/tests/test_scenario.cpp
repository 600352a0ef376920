#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "vamsim/channel.hpp"
#include "vamsim/scenario.hpp"

using namespace vamsim;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_trace accepts a minimal well-formed file") {
  auto path = write_temp("trace_min.csv",
                         "t_us,id,x_m,y_m,speed_mps,heading_deg\n"
                         "0,1,0,0,2.0,90\n"
                         "1000000,1,2,0,2.0,90\n");
  MobilityTrace t = load_trace(path);
  CHECK(t.vru_count() == 1);
  CHECK(t.first_t(1) == 0);
  CHECK(t.last_t(1) == 1'000'000);
}

TEST_CASE("load_trace rejects malformed input") {
  SECTION("empty file") {
    auto path = write_temp("trace_empty.csv", "# only a comment\n");
    CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("no samples"));
  }
  SECTION("negative speed with line number") {
    auto path = write_temp("trace_negspeed.csv",
                           "0,1,0,0,2.0,90\n"
                           "1000000,1,2,0,-1,90\n");
    CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("line 2"));
  }
  SECTION("NaN is rejected") {
    auto path = write_temp("trace_nan.csv",
                           "0,1,0,0,nan,90\n"
                           "1000000,1,2,0,2,90\n");
    CHECK_THROWS(load_trace(path));
  }
  SECTION("duplicate (id, t)") {
    auto path = write_temp("trace_dup.csv",
                           "0,1,0,0,2,90\n"
                           "0,1,1,0,2,90\n"
                           "1000000,1,2,0,2,90\n");
    CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("duplicate"));
  }
  SECTION("single-sample vru") {
    auto path = write_temp("trace_single.csv",
                           "0,1,0,0,2,90\n"
                           "0,2,5,0,2,90\n"
                           "1000000,2,7,0,2,90\n");
    CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("single sample"));
  }
  SECTION("unsorted rows are sorted") {
    auto path = write_temp("trace_unsorted.csv",
                           "1000000,1,2,0,2,90\n"
                           "0,1,0,0,2,90\n");
    MobilityTrace t = load_trace(path);
    CHECK(t.first_t(1) == 0);
  }
}

TEST_CASE("sample_state interpolation") {
  MobilityTrace t;
  t.add_vru(1, {{0, {0, 0}, 1.0, 350.0}, {1'000'000, {2, 0}, 3.0, 10.0}});

  SECTION("midpoint of linear motion") {
    VruState s = sample_state(t, 1, 500'000);
    CHECK(s.pos.x == Catch::Approx(1.0));
    CHECK(s.pos.y == Catch::Approx(0.0));
    CHECK(s.speed == Catch::Approx(2.0));
  }
  SECTION("heading wraps along the shorter arc") {
    VruState s = sample_state(t, 1, 500'000);
    CHECK(s.heading == Catch::Approx(0.0).margin(1e-9));
  }
  SECTION("exact sample time is returned verbatim") {
    VruState s = sample_state(t, 1, 1'000'000);
    CHECK(s.pos.x == 2.0);
    CHECK(s.speed == 3.0);
    CHECK(s.heading == 10.0);
  }
  SECTION("unknown id and out-of-lifespan queries fail") {
    CHECK_THROWS_AS(sample_state(t, 9, 0), std::out_of_range);
    CHECK_THROWS_AS(sample_state(t, 1, 1'000'001), std::out_of_range);
    CHECK_THROWS_AS(sample_state(t, 1, -1), std::out_of_range);
  }
}

TEST_CASE("platoon generator kinematics") {
  PlatoonParams p;
  p.n_bikes = 1;
  p.red_duration_s = 5.0;
  p.accel_mps2 = 1.0;
  p.cruise_mps = 5.0;
  p.gap_m = 1.5;
  p.duration_s = 20.0;
  MobilityTrace t = gen_platoon_scenario(p, 42);

  SECTION("still red") {
    VruState s = sample_state(t, 0, 3'000'000);
    CHECK(s.speed == 0.0);
  }
  SECTION("speed follows v = a * dt after departure") {
    // recover the departure breakpoint from the trace
    const auto& samples = t.samples(0);
    Micros depart = 0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      if (samples[i].speed == 0.0 && samples[i + 1].speed > 0.0) {
        depart = samples[i].t;
        break;
      }
    }
    REQUIRE(depart >= 5'000'000);
    REQUIRE(depart < 6'000'000);
    VruState s = sample_state(t, 0, depart + 2'000'000);
    CHECK(s.speed == Catch::Approx(2.0).margin(1e-9));
  }
  SECTION("same seed gives identical traces") {
    MobilityTrace t2 = gen_platoon_scenario(p, 42);
    const auto& a = t.samples(0);
    const auto& b = t2.samples(0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].t == b[i].t);
      CHECK(a[i].pos == b[i].pos);
      CHECK(a[i].speed == b[i].speed);
    }
  }
  SECTION("different seeds differ") {
    MobilityTrace t2 = gen_platoon_scenario(p, 43);
    CHECK(t.samples(0) != t2.samples(0));
  }
  SECTION("invalid parameters") {
    PlatoonParams bad = p;
    bad.n_bikes = 0;
    CHECK_THROWS_AS(gen_platoon_scenario(bad, 1), std::invalid_argument);
    bad = p;
    bad.accel_mps2 = 0.0;
    CHECK_THROWS_AS(gen_platoon_scenario(bad, 1), std::invalid_argument);
  }
}

TEST_CASE("interpolated motion is continuous") {
  PlatoonParams p;
  p.n_bikes = 3;
  p.duration_s = 25.0;
  MobilityTrace t = gen_platoon_scenario(p, 9);
  const Micros step = 10'000;
  for (VruId id : t.vru_ids()) {
    VruState prev = sample_state(t, id, t.first_t(id));
    for (Micros tm = t.first_t(id) + step; tm <= t.last_t(id); tm += 250'000 + step) {
      VruState cur = sample_state(t, id, tm);
      double dt = us_to_seconds(tm - prev.t);
      REQUIRE(dist(cur.pos, prev.pos) <= p.cruise_mps * dt + 1e-9);
      prev = cur;
    }
  }
}

TEST_CASE("crossing generator") {
  CrossingParams p;
  p.duration_s = 60.0;

  SECTION("zero flows give an empty trace") {
    CrossingParams p0 = p;
    p0.flow_a_per_min = 0.0;
    p0.flow_b_per_min = 0.0;
    CHECK(gen_crossing_scenario(p0, 1).empty());
  }
  SECTION("seeded arrivals are reproducible") {
    MobilityTrace a = gen_crossing_scenario(p, 5);
    MobilityTrace b = gen_crossing_scenario(p, 5);
    REQUIRE(a.vru_count() == b.vru_count());
    CHECK(a.vru_count() > 20);  // ~120 expected at 60+60 per minute
    for (VruId id : a.vru_ids()) CHECK(a.first_t(id) == b.first_t(id));
  }
  SECTION("building blocks line of sight between the approaches") {
    std::vector<Obstacle> obs{default_crossing_building(p)};
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> along(-150.0, -10.0);
    for (int i = 0; i < 300; ++i) {
      Vec2 a{along(gen), 0.0};   // road A approach
      Vec2 b{0.0, along(gen)};   // road B approach
      INFO("a.x=" << a.x << " b.y=" << b.y);
      REQUIRE(los_blocked(a, b, obs));
    }
    // same-road pairs keep line of sight
    CHECK_FALSE(los_blocked({-140.0, 0.0}, {-20.0, 0.0}, obs));
    CHECK_FALSE(los_blocked({0.0, -140.0}, {0.0, -20.0}, obs));
  }
}
