#include "doctest.h"
#include "npos/geom.hpp"

using namespace npos;

TEST_SUITE("geom") {
    const std::vector<Vec2> square = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    const std::vector<Vec2> lshape = {{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 5}, {0, 5}};

    TEST_CASE("point in polygon") {
        CHECK(point_in_polygon({1, 1}, square));
        CHECK(point_in_polygon({0.001, 0.001}, square));
        CHECK_FALSE(point_in_polygon({2.1, 1}, square));
        CHECK_FALSE(point_in_polygon({-0.1, 1}, square));
        CHECK(point_in_polygon({1, 1}, lshape));
        CHECK(point_in_polygon({1, 4}, lshape));
        CHECK_FALSE(point_in_polygon({3, 3}, lshape));  // notch of the L
    }

    TEST_CASE("segment intersection") {
        CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
        CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
        CHECK(segments_intersect({0, 0}, {2, 0}, {1, 0}, {1, 1}));   // T touch
        CHECK(segments_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));   // collinear overlap
        CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {2, 0}, {3, 0}));
    }

    TEST_CASE("segment containment in non-convex area") {
        CHECK(segment_in_polygon({0.5, 0.5}, {1.5, 1.5}, square));
        CHECK_FALSE(segment_in_polygon({0.5, 0.5}, {2.5, 0.5}, square));
        // cutting across the L notch leaves the polygon even though both
        // endpoints are inside
        CHECK(point_in_polygon({3, 1}, lshape));
        CHECK(point_in_polygon({1, 4}, lshape));
        CHECK_FALSE(segment_in_polygon({3, 1}, {1, 4}, lshape));
        CHECK(segment_in_polygon({1, 1}, {1, 4}, lshape));
    }

    TEST_CASE("polygon simplicity") {
        CHECK(polygon_is_simple(square));
        CHECK(polygon_is_simple(lshape));
        CHECK_FALSE(polygon_is_simple({{0, 0}, {2, 2}, {2, 0}, {0, 2}}));  // bowtie
    }

    TEST_CASE("angle wrapping") {
        CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
        CHECK(wrap_angle(3 * M_PI) == doctest::Approx(M_PI));
        CHECK(wrap_angle(-3 * M_PI) == doctest::Approx(M_PI));
        CHECK(wrap_angle(M_PI / 2 + 2 * M_PI) == doctest::Approx(M_PI / 2));
    }
}
