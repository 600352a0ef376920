#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vamsim {

// Local flat ENU plane, meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Normalize any finite angle to [0, 360).
inline double normalize_heading(double deg) {
  double h = std::fmod(deg, 360.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h = 0.0;  // fmod can round back up to 360
  return h;
}

// Circular absolute difference in [0, 180].
inline double heading_diff(double a_deg, double b_deg) {
  double d = std::fabs(normalize_heading(a_deg) - normalize_heading(b_deg));
  return d > 180.0 ? 360.0 - d : d;
}

// Signed shortest rotation from a to b, in (-180, 180].
inline double heading_delta(double a_deg, double b_deg) {
  double d = std::fmod(normalize_heading(b_deg) - normalize_heading(a_deg), 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

// Interpolate along the shorter circular arc; result in [0, 360).
inline double interp_heading(double a_deg, double b_deg, double frac) {
  return normalize_heading(a_deg + frac * heading_delta(a_deg, b_deg));
}

// Unit direction for a compass-style heading: 0 deg = +y, 90 deg = +x.
inline Vec2 heading_dir(double deg) {
  double rad = deg * M_PI / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

// Closed simple polygon; vertices listed once, ring closed implicitly.
struct Obstacle {
  std::vector<Vec2> polygon;
};

inline Obstacle make_rect_obstacle(double x0, double y0, double x1, double y1) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

namespace detail {

inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return orient(a, b, p) == 0.0 &&
         std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Inclusive: touching endpoints or collinear overlap count as intersection.
inline bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                               const Vec2& q2) {
  double o1 = orient(p1, p2, q1);
  double o2 = orient(p1, p2, q2);
  double o3 = orient(q1, q2, p1);
  double o4 = orient(q1, q2, p2);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 &&
      o3 != 0 && o4 != 0) {
    return true;
  }
  return on_segment(p1, p2, q1) || on_segment(p1, p2, q2) ||
         on_segment(q1, q2, p1) || on_segment(q1, q2, p2);
}

// Boundary-inclusive point-in-polygon (ray cast).
inline bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(poly[i], poly[(i + 1) % n], p)) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace detail

inline void validate_obstacle(const Obstacle& o) {
  if (o.polygon.size() < 3) {
    throw std::invalid_argument("obstacle polygon needs at least 3 vertices");
  }
  for (const Vec2& v : o.polygon) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw std::invalid_argument("obstacle polygon has non-finite vertex");
    }
  }
}

}  // namespace vamsim
