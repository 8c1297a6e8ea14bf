#pragma once

#include <cmath>
#include <string>

namespace anosov {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// A point (y1, y2, t) on the mapping torus, stored as the canonical
// representative with all coordinates in [0,1). The gluing (y,1) ~ (G y, 0)
// is applied by the operations that cross t = 1, never stored.
struct MappingTorusPoint {
    double y1 = 0.0, y2 = 0.0, t = 0.0;

    Vec2 fiber() const { return {y1, y2}; }
};

// x reduced mod 1 into [0,1). Exact for |x| in the double range where
// floor is exact; the clamp handles the x - floor(x) == 1.0 corner.
inline double mod1(double x) {
    double r = x - std::floor(x);
    return (r >= 1.0) ? 0.0 : r;
}

// Signed representative in (-0.5, 0.5].
inline double wrap_pm(double x) {
    double r = x - std::round(x);
    return (r <= -0.5) ? 0.5 : r;
}

// Distance on the circle R/Z.
inline double circ_dist(double a, double b) { return std::fabs(wrap_pm(a - b)); }

inline Vec2 fiber_mod1(const Vec2& v) { return {mod1(v.x), mod1(v.y)}; }

// Nearest-to-origin representative of a fiber point, components in [-0.5, 0.5).
inline Vec2 fiber_wrap_pm(const Vec2& v) { return {wrap_pm(v.x), wrap_pm(v.y)}; }

// Distance between two fiber points on T^2.
inline double fiber_dist(const Vec2& a, const Vec2& b) {
    double dx = wrap_pm(a.x - b.x);
    double dy = wrap_pm(a.y - b.y);
    return std::sqrt(dx * dx + dy * dy);
}

// Flat product metric on [0,1)^3 with per-axis circle distances. Valid for
// small separations away from the t-gluing; callers that may straddle the
// gluing use DiscretizedMap::quotient_dist instead.
inline double flat_dist(const MappingTorusPoint& a, const MappingTorusPoint& b) {
    double d1 = wrap_pm(a.y1 - b.y1);
    double d2 = wrap_pm(a.y2 - b.y2);
    double d3 = wrap_pm(a.t - b.t);
    return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

// Canonical textual form "(y1,y2;t)" with 12 significant digits.
std::string format_point(const MappingTorusPoint& p);
std::string format_double(double v);

}  // namespace anosov
