#include "tas/errors.hpp"
#include "tas/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace tas;

namespace {

// Independent chord oracle: intersect the infinite line with the four
// half-planes of the square and measure the surviving segment.
double chord_oracle(double side, double angle_deg, double offset) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    const double dx = std::cos(a);
    const double dy = std::sin(a);
    const double px = -dy * offset;
    const double py = dx * offset;
    const double h = side / 2;
    double lo = -1e300;
    double hi = 1e300;
    for (const auto [p, d] : {std::pair{px, dx}, std::pair{py, dy}}) {
        if (std::abs(d) < 1e-15) {
            if (p < -h || p > h) {
                return 0.0;
            }
            continue;
        }
        const double t1 = (-h - p) / d;
        const double t2 = (h - p) / d;
        lo = std::max(lo, std::min(t1, t2));
        hi = std::min(hi, std::max(t1, t2));
    }
    return std::max(0.0, hi - lo);
}

double row_total(const std::vector<RowEntry>& row) {
    double s = 0.0;
    for (const auto& e : row) {
        s += e.length;
    }
    return s;
}

} // namespace

TEST_CASE("grid invariants") {
    const Grid g(40);
    CHECK(g.side_length == 40.0);
    CHECK(g.pixel_size() == 1.0);
    CHECK(g.pixel_count() == 1600);
    CHECK(Grid(8, 2.0).pixel_size() == 0.25);
    CHECK_THROWS_AS(Grid(0, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid(4, 0.0), ConfigError);
}

TEST_CASE("standard beam arrangement") {
    const Grid g(40);
    const auto beams = make_standard_beams(g, 40);
    CHECK(beams.size() == 160);
    for (std::size_t G : {20u, 60u, 80u}) {
        CHECK(make_standard_beams(Grid(G), G).size() == 4 * G);
    }
    // axis-aligned beams at per_direction = n run through pixel centres
    for (std::size_t b = 0; b < 40; ++b) {
        CHECK(beams[b].angle == 0.0);
        CHECK(beams[b].offset == doctest::Approx(-19.5 + static_cast<double>(b)));
    }
    const double single[] = {0.0};
    const auto one = make_parallel_beams(g, single, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].offset == 0.0);
    CHECK_THROWS_AS((void)make_parallel_beams(g, single, 0), ConfigError);
}

TEST_CASE("horizontal beam through a pixel row") {
    const Grid g(40);
    const auto row = trace_beam(g, {0.0, 0.5});
    REQUIRE(row.size() == 40);
    for (std::size_t c = 0; c < 40; ++c) {
        CHECK(row[c].pixel == 20 * 40 + c);
        CHECK(row[c].length == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(row_total(row) == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("beam along a pixel edge belongs to one row") {
    const Grid g(10);
    const auto row = trace_beam(g, {0.0, 0.0});
    REQUIRE(row.size() == 10);
    for (const auto& e : row) {
        CHECK(e.pixel / 10 == 5);
    }
    const auto col = trace_beam(g, {90.0, 2.0});
    REQUIRE(col.size() == 10);
}

TEST_CASE("diagonal beam through the grid corners") {
    for (std::size_t n : {1u, 5u, 40u}) {
        const Grid g(n);
        const auto row = trace_beam(g, {45.0, 0.0});
        REQUIRE(row.size() == n);
        std::size_t i = 0;
        for (const auto& e : row) {
            CHECK(e.pixel == i * n + i);
            CHECK(e.length == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
            ++i;
        }
    }
}

TEST_CASE("beam missing the region gives an empty row") {
    const Grid g(10);
    CHECK(trace_beam(g, {30.0, 7.5}).empty());
    CHECK(trace_beam(g, {0.0, -5.5}).empty());
    CHECK(chord_length(g, {30.0, 7.5}) == 0.0);
}

TEST_CASE("row sums equal chord lengths") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ang(0.0, 180.0);
    std::uniform_real_distribution<double> off(-0.75, 0.75);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 37;
        const Grid g(n, 3.0);
        const Beam b{ang(rng), off(rng) * 3.0};
        const auto row = trace_beam(g, b);
        CHECK(row_total(row) == doctest::Approx(chord_oracle(3.0, b.angle, b.offset)).epsilon(1e-10));
        CHECK(row.size() <= 2 * n);
        for (const auto& e : row) {
            CHECK(e.length > 0.0);
            CHECK(e.pixel < n * n);
        }
    }
}

TEST_CASE("system matrix for the standard arrangement") {
    const Grid g(40);
    const auto beams = make_standard_beams(g, 40);
    const auto L = build_system_matrix(g, beams);
    CHECK(L.rows() == 160);
    CHECK(L.cols() == 1600);
    const auto ones = L.multiply(std::vector<double>(1600, 1.0));
    for (std::size_t i = 0; i < L.rows(); ++i) {
        CHECK(!L.row_indices(i).empty());
        CHECK(ones[i] == doctest::Approx(chord_oracle(40.0, beams[i].angle, beams[i].offset)).epsilon(1e-10));
        CHECK(L.row_sum(i) == doctest::Approx(ones[i]).epsilon(1e-14));
    }
    CHECK_THROWS_AS((void)L.multiply(std::vector<double>(10, 1.0)), ShapeError);
}

TEST_CASE("single pixel matrix") {
    const Grid g(1);
    const Beam beams[] = {{0.0, 0.0}};
    const auto L = build_system_matrix(g, beams);
    CHECK(L.rows() == 1);
    CHECK(L.cols() == 1);
    REQUIRE(L.nonzeros() == 1);
    CHECK(L.row_values(0)[0] == doctest::Approx(1.0));
}

TEST_CASE("mirrored offsets permute axis-aligned rows") {
    const std::size_t n = 12;
    const Grid g(n);
    for (double o : {0.5, 1.5, 3.5, 5.5}) {
        for (double ang : {0.0, 90.0}) {
            const auto a = trace_beam(g, {ang, o});
            const auto b = trace_beam(g, {ang, -o});
            REQUIRE(a.size() == b.size());
            std::map<std::size_t, double> mb;
            for (const auto& e : b) {
                mb[e.pixel] = e.length;
            }
            for (const auto& e : a) {
                const std::size_t r = e.pixel / n;
                const std::size_t c = e.pixel % n;
                const std::size_t mirrored = ang == 0.0 ? (n - 1 - r) * n + c : r * n + (n - 1 - c);
                REQUIRE(mb.count(mirrored) == 1);
                CHECK(mb[mirrored] == doctest::Approx(e.length));
            }
        }
    }
}

TEST_CASE("triplet export") {
    const Grid g(2);
    const Beam beams[] = {{0.0, -0.5}};
    const auto L = build_system_matrix(g, beams);
    std::ostringstream os;
    L.write_triplets(os);
    CHECK(os.str() == "0 0 1\n0 1 1\n");
}
