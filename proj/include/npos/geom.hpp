#pragma once

#include <cmath>
#include <vector>

namespace npos {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(const Vec2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double norm() const { return std::sqrt(x * x + y * y); }
    double norm_sq() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

struct Segment {
    Vec2 a;
    Vec2 b;
};

/// Even-odd rule; points exactly on the boundary are treated as inside.
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);

/// True if segments [a1,a2] and [b1,b2] share at least one point
/// (including endpoint touches and collinear overlap).
bool segments_intersect(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2);

/// True if both endpoints are inside and the open segment does not cross
/// any polygon edge. Intended for convex or mildly non-convex areas.
bool segment_in_polygon(const Vec2& a, const Vec2& b, const std::vector<Vec2>& poly);

/// Simple = at least 3 vertices and no two non-adjacent edges intersect.
bool polygon_is_simple(const std::vector<Vec2>& poly);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace npos
