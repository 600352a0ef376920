#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "vamsim/geometry.hpp"

using namespace vamsim;

TEST_CASE("heading interpolation takes the shorter arc") {
  CHECK(interp_heading(350.0, 10.0, 0.5) == Catch::Approx(0.0).margin(1e-12));
  CHECK(interp_heading(10.0, 350.0, 0.5) == Catch::Approx(0.0).margin(1e-12));
  CHECK(interp_heading(90.0, 90.0, 0.3) == Catch::Approx(90.0));
  CHECK(interp_heading(0.0, 90.0, 0.5) == Catch::Approx(45.0));
}

TEST_CASE("heading interpolation stays in [0, 360) and within the arc") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> angle(-720.0, 720.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double a = angle(gen);
    double b = angle(gen);
    double f = frac(gen);
    double h = interp_heading(a, b, f);
    REQUIRE(h >= 0.0);
    REQUIRE(h < 360.0);
    // never traverses the longer arc: distance from either endpoint is
    // bounded by the endpoint separation
    double sep = heading_diff(a, b);
    REQUIRE(heading_diff(h, a) <= sep + 1e-9);
    REQUIRE(heading_diff(h, b) <= sep + 1e-9);
  }
}

TEST_CASE("segment-polygon intersection") {
  Obstacle square = make_rect_obstacle(0.0, 0.0, 10.0, 10.0);

  SECTION("crossing the interior") {
    CHECK(detail::segments_intersect({-5, 5}, {15, 5}, {0, 0}, {0, 10}));
    CHECK(detail::point_in_polygon({5, 5}, square.polygon));
    CHECK_FALSE(detail::point_in_polygon({15, 5}, square.polygon));
  }
  SECTION("boundary is inclusive") {
    CHECK(detail::point_in_polygon({0, 5}, square.polygon));
    CHECK(detail::point_in_polygon({10, 10}, square.polygon));
    CHECK(detail::segments_intersect({0, 0}, {10, 0}, {5, 0}, {5, 5}));
  }
  SECTION("dense sampling oracle on random segments") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> coord(-20.0, 30.0);
    for (int i = 0; i < 500; ++i) {
      Vec2 a{coord(gen), coord(gen)};
      Vec2 b{coord(gen), coord(gen)};
      bool interior_hit = false;
      for (int k = 0; k <= 400; ++k) {
        double f = k / 400.0;
        Vec2 p = a + (b - a) * f;
        if (p.x > 0 && p.x < 10 && p.y > 0 && p.y < 10) {
          interior_hit = true;
          break;
        }
      }
      bool crosses_edge = false;
      const auto& poly = square.polygon;
      for (std::size_t e = 0; e < poly.size(); ++e) {
        if (detail::segments_intersect(a, b, poly[e], poly[(e + 1) % poly.size()])) {
          crosses_edge = true;
          break;
        }
      }
      bool blocked = crosses_edge || detail::point_in_polygon(a, poly) ||
                     detail::point_in_polygon(b, poly);
      if (interior_hit) {
        INFO("segment (" << a.x << "," << a.y << ")-(" << b.x << "," << b.y << ")");
        REQUIRE(blocked);
      }
    }
  }
}

TEST_CASE("obstacle validation") {
  CHECK_THROWS_AS(validate_obstacle(Obstacle{{{0, 0}, {1, 1}}}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_obstacle(make_rect_obstacle(0, 0, 1, 1)));
}
