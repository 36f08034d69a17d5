#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace somrl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const = default;

    double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Axis-aligned rectangle given by its lower-left corner and size.
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    // Strict interior; points on the edge are outside.
    bool contains_interior(const Vec2& p) const {
        return p.x > x && p.x < x + w && p.y > y && p.y < y + h;
    }
};

// Earliest parameter t in [0, 1] at which the segment p -> p + d is about to
// enter the strict interior of `r`, or +inf if it never does.  Motion that
// only grazes an edge does not count as entering; starting on a face while
// moving inward counts as contact at t = 0.
inline double entry_time(const Vec2& p, const Vec2& d, const Rect& r) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double lo = -inf, hi = inf;  // open interval of t where the point is interior
    auto clip = [&](double origin, double dir, double face_lo, double face_hi) {
        if (dir == 0.0) return origin > face_lo && origin < face_hi;
        double ta = (face_lo - origin) / dir;
        double tb = (face_hi - origin) / dir;
        if (ta > tb) std::swap(ta, tb);
        lo = std::max(lo, ta);
        hi = std::min(hi, tb);
        return lo < hi;
    };
    if (!clip(p.x, d.x, r.x, r.x + r.w)) return inf;
    if (!clip(p.y, d.y, r.y, r.y + r.h)) return inf;
    const double entry = std::max(lo, 0.0);
    return entry < std::min(hi, 1.0) ? entry : inf;
}

// Earliest t in (0, 1] at which the segment p -> p + d leaves the closed box
// [0,w] x [0,h], or +inf if it stays inside.
inline double exit_time(const Vec2& p, const Vec2& d, double w, double h) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double t = inf;
    auto axis = [&](double origin, double dir, double lo, double hi) {
        if (dir > 0.0) t = std::min(t, (hi - origin) / dir);
        if (dir < 0.0) t = std::min(t, (lo - origin) / dir);
    };
    axis(p.x, d.x, 0.0, w);
    axis(p.y, d.y, 0.0, h);
    return t <= 1.0 ? t : inf;
}

}  // namespace somrl
