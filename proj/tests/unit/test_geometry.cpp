#include <doctest.h>

#include <stdexcept>

#include <random>

#include "oracles.hpp"
#include "uiground/geometry.hpp"

using namespace uiground;

TEST_CASE("box validity") {
    CHECK(Box{0, 0, 1, 1}.valid());
    CHECK(Box{0.5, 0.5, 0.5, 0.5}.valid());  // degenerate is allowed
    CHECK_FALSE(Box{0.6, 0, 0.5, 1}.valid());
    CHECK_FALSE(Box{-0.1, 0, 0.5, 1}.valid());
    CHECK_FALSE(Box{0, 0, 1.0001, 1}.valid());
    CHECK_FALSE(Box{0, std::nan(""), 1, 1}.valid());
    CHECK_THROWS_AS(checked_box(0.6, 0, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(checked_point(1.5, 0), std::invalid_argument);
}

TEST_CASE("point_in_box is boundary inclusive") {
    const Box b{0.1, 0.2, 0.3, 0.4};
    CHECK(point_in_box({0.2, 0.3}, b));
    CHECK(point_in_box({0.1, 0.2}, b));
    CHECK(point_in_box({0.3, 0.4}, b));
    CHECK(point_in_box({0.3, 0.2}, b));
    CHECK_FALSE(point_in_box({0.30001, 0.3}, b));
    CHECK_FALSE(point_in_box({0.05, 0.3}, b));
    CHECK(point_in_box({0.5, 0.5}, Box{0.5, 0.5, 0.5, 0.5}));
}

TEST_CASE("point_in_box agrees with the lattice enumerator") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> coord(0, 40);
    for (int i = 0; i < 2000; ++i) {
        int x1 = coord(rng), x2 = coord(rng), y1 = coord(rng), y2 = coord(rng);
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        const oracle::LatticePoint p{coord(rng), coord(rng)};
        const Box b{x1 / 40.0, y1 / 40.0, x2 / 40.0, y2 / 40.0};
        CHECK(point_in_box({p.x / 40.0, p.y / 40.0}, b) == oracle::enumerate_hit(p, {x1, y1, x2, y2}));
    }
}

TEST_CASE("box center is always inside its box") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        const Box b{x1, y1, x2, y2};
        REQUIRE(point_in_box(box_center(b), b));
    }
}

TEST_CASE("iou matches cell counting") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> coord(0, 20);
    for (int i = 0; i < 500; ++i) {
        int ax1 = coord(rng), ax2 = coord(rng), ay1 = coord(rng), ay2 = coord(rng);
        int bx1 = coord(rng), bx2 = coord(rng), by1 = coord(rng), by2 = coord(rng);
        if (ax1 > ax2) std::swap(ax1, ax2);
        if (ay1 > ay2) std::swap(ay1, ay2);
        if (bx1 > bx2) std::swap(bx1, bx2);
        if (by1 > by2) std::swap(by1, by2);
        const Box a{ax1 / 20.0, ay1 / 20.0, ax2 / 20.0, ay2 / 20.0};
        const Box b{bx1 / 20.0, by1 / 20.0, bx2 / 20.0, by2 / 20.0};
        const double want = oracle::cell_iou({ax1, ay1, ax2, ay2}, {bx1, by1, bx2, by2});
        CHECK(iou(a, b) == doctest::Approx(want).epsilon(1e-12));
        CHECK(iou(a, b) == doctest::Approx(iou(b, a)));
    }
    CHECK(iou(Box{0.1, 0.1, 0.5, 0.5}, Box{0.1, 0.1, 0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(iou(Box{0.1, 0.1, 0.1, 0.5}, Box{0.1, 0.1, 0.1, 0.5}) == 0.0);
}

TEST_CASE("expand clamps to the screen") {
    const auto e = expand(Box{0.01, 0.5, 0.2, 0.99}, 0.02);
    CHECK(e.x1 == 0.0);
    CHECK(e.y1 == doctest::Approx(0.48));
    CHECK(e.x2 == doctest::Approx(0.22));
    CHECK(e.y2 == 1.0);
    CHECK(e.valid());
}

TEST_CASE("normalize_pixel_box") {
    auto b = normalize_pixel_box(100, 200, 300, 400, 1000, 1000);
    REQUIRE(b);
    CHECK(*b == Box{0.1, 0.2, 0.3, 0.4});
    CHECK_FALSE(normalize_pixel_box(300, 200, 100, 400, 1000, 1000));
    CHECK_FALSE(normalize_pixel_box(100, 200, 1100, 400, 1000, 1000));
    CHECK_FALSE(normalize_pixel_box(0, 0, 10, 10, 0, 1000));
}
