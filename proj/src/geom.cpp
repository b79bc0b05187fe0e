#include "npos/geom.hpp"

#include <algorithm>

namespace npos {

namespace {

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    // boundary counts as inside
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if (orientation(a, b, p) == 0 && on_segment(a, b, p)) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        const bool crosses = (a.y > p.y) != (b.y > p.y);
        if (crosses) {
            const double x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_at) inside = !inside;
        }
    }
    return inside;
}

bool segments_intersect(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
    const int o1 = orientation(a1, a2, b1);
    const int o2 = orientation(a1, a2, b2);
    const int o3 = orientation(b1, b2, a1);
    const int o4 = orientation(b1, b2, a2);

    if (o1 != o2 && o3 != o4) return true;

    if (o1 == 0 && on_segment(a1, a2, b1)) return true;
    if (o2 == 0 && on_segment(a1, a2, b2)) return true;
    if (o3 == 0 && on_segment(b1, b2, a1)) return true;
    if (o4 == 0 && on_segment(b1, b2, a2)) return true;
    return false;
}

bool segment_in_polygon(const Vec2& a, const Vec2& b, const std::vector<Vec2>& poly) {
    if (!point_in_polygon(a, poly) || !point_in_polygon(b, poly)) return false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& e1 = poly[i];
        const Vec2& e2 = poly[(i + 1) % n];
        // A proper crossing means the motion segment straddles the wall.
        const int o1 = orientation(a, b, e1);
        const int o2 = orientation(a, b, e2);
        const int o3 = orientation(e1, e2, a);
        const int o4 = orientation(e1, e2, b);
        if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return false;
    }
    // Non-convex areas: the midpoint must stay inside as well.
    if (!point_in_polygon({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}, poly)) return false;
    return true;
}

bool polygon_is_simple(const std::vector<Vec2>& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (they share a vertex by construction)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

double wrap_angle(double a) {
    const double two_pi = 2.0 * M_PI;
    a = std::fmod(a, two_pi);
    if (a <= -M_PI) a += two_pi;
    if (a > M_PI) a -= two_pi;
    return a;
}

}  // namespace npos
