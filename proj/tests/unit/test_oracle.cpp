#include "doctest.h"

#include <cmath>

#include "../support/brute.hpp"
#include "slabperc/bounds.hpp"
#include "slabperc/error.hpp"
#include "slabperc/oracle.hpp"

using namespace slabperc;

TEST_SUITE("oracle") {

// Reference values from an independent exact-rational BFS enumerator
// (tests/oracle_scripts/brute_force.py).
TEST_CASE("frozen exact values, single layer") {
    const LatticeBox box = build_box({0}, CenteredBox{1});
    const EventSpec spec = event::OriginToBoundary{1};
    CHECK(std::abs(oracle::exact_probability(box, {0.3, 0.7}, spec).value - 0.7599) < 1e-12);
    CHECK(std::abs(oracle::exact_probability(box, {0.7, 0.2}, spec).value - 0.9919) < 1e-12);
    const auto half = oracle::exact_probability(box, {0.5, 0.5}, spec);
    CHECK(half.satisfying == 3840);
    CHECK(half.enumeration_size == 4096);
    CHECK(std::abs(half.value - 0.9375) < 1e-15);
}

TEST_CASE("frozen exact values, two layers") {
    const LatticeBox box = build_box({1}, RectBox{0, 1, 0, 1});
    const EventSpec spec = event::Connected{{0, 0, 0}, {1, 1, 1}};
    CHECK(std::abs(oracle::exact_probability(box, {0.3, 0.7}, spec).value - 0.321985193544) < 1e-12);
    CHECK(std::abs(oracle::exact_probability(box, {0.5, 0.5}, spec).value - 0.52734375) < 1e-15);
    CHECK(std::abs(oracle::exact_probability(box, {0.7, 0.2}, spec).value - 0.437716412784) < 1e-12);
}

TEST_CASE("q = 1 slab equals the plane at s") {
    const double p = 0.35;
    const LatticeBox slab = build_box({1}, RectBox{0, 1, 0, 1});
    const double slab_value = oracle::exact_probability(slab, {p, 1.0}, event::Connected{{0, 0, 0}, {1, 1, 1}}).value;
    CHECK(std::abs(slab_value - 0.5557860812109375) < 1e-12);
    const LatticeBox plane = build_box({0}, RectBox{0, 1, 0, 1});
    const double s = bounds::collapse_s(p, 1);
    const double plane_value = oracle::exact_probability(plane, {s, 0.0}, event::Connected{{0, 0, 0}, {1, 1, 0}}).value;
    CHECK(std::abs(plane_value - slab_value) < 1e-12);
}

TEST_CASE("agrees with a BFS enumeration") {
    const LatticeBox box = build_box({1}, RectBox{0, 2, 0, 1});  // 7+7+6 = 20 edges
    REQUIRE(box.edge_count() == 20);
    for (const ParamPoint pq : {ParamPoint{0.3, 0.6}, ParamPoint{0.55, 0.15}}) {
        const double mine =
            oracle::exact_probability(box, pq, event::Connected{{0, 0, 0}, {2, 1, 1}}).value;
        const double ref = brute::enumerate(box, pq, [&](const BondConfig& c) {
            return brute::connected(box, c, {0, 0, 0}, {2, 1, 1});
        });
        CHECK(std::abs(mine - ref) < 1e-12);
    }
}

TEST_CASE("count polynomial totals and endpoints") {
    const LatticeBox box = build_box({1}, RectBox{0, 1, 0, 1});
    const oracle::EventTable table(box, event::Connected{{0, 0, 0}, {1, 1, 1}});
    const auto poly = table.polynomial();
    CHECK(poly.radial() == 8);
    CHECK(poly.axial() == 4);
    CHECK(poly.total() == 135 * 16);
    CHECK(poly.value({0.0, 0.0}) == 0.0);
    CHECK(poly.value({1.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("polynomial derivatives match finite differences") {
    const LatticeBox box = build_box({1}, RectBox{0, 2, 0, 1});
    const auto poly = oracle::EventTable(box, event::LeftRightCrossing{}).polynomial();
    const double h = 1e-6;
    for (const ParamPoint pq : {ParamPoint{0.3, 0.7}, ParamPoint{0.5, 0.5}, ParamPoint{0.2, 0.1}}) {
        const double fd_p = (poly.value({pq.p + h, pq.q}) - poly.value({pq.p - h, pq.q})) / (2 * h);
        const double fd_q = (poly.value({pq.p, pq.q + h}) - poly.value({pq.p, pq.q - h})) / (2 * h);
        CHECK(poly.d_dp(pq) == doctest::Approx(fd_p).epsilon(1e-7));
        CHECK(poly.d_dq(pq) == doctest::Approx(fd_q).epsilon(1e-7));
    }
}

TEST_CASE("exact Russo: pivotal sums equal derivatives") {
    struct Case {
        LatticeBox box;
        EventSpec spec;
    };
    const std::vector<Case> cases{
        {build_box({0}, CenteredBox{1}), event::OriginToBoundary{1}},
        {build_box({0}, RectBox{0, 3, 0, 2}), event::Connected{{0, 0, 0}, {3, 2, 0}}},
        {build_box({1}, RectBox{0, 1, 0, 1}), event::Connected{{0, 0, 0}, {1, 1, 1}}},
        {build_box({1}, RectBox{0, 2, 0, 1}), event::LeftRightCrossing{}},
        {build_box({2}, RectBox{0, 1, 0, 1}), event::ClusterSizeAtLeast{{0, 0, 0}, 6}},
    };
    for (const auto& c : cases)
        for (const ParamPoint pq : {ParamPoint{0.3, 0.7}, ParamPoint{0.5, 0.5}, ParamPoint{0.7, 0.2}}) {
            const auto r = oracle::exact_russo(c.box, pq, c.spec);
            CAPTURE(describe(c.spec));
            CHECK(r.discrepancy() < 1e-10);
            CHECK(std::abs(r.d_p - r.d_p_poly) < 1e-10);
            CHECK(std::abs(r.d_q - r.d_q_poly) < 1e-10);
            CHECK(r.pivotal_probability.size() == c.box.edge_count());
        }
}

TEST_CASE("enumeration cap") {
    const LatticeBox big = build_box({1}, CenteredBox{2});
    try {
        oracle::exact_probability(big, {0.5, 0.5}, event::OriginToBoundary{1});
        FAIL("expected ResourceLimit");
    } catch (const ResourceLimit& e) {
        CHECK(std::string(e.what()).find(std::to_string(big.edge_count())) != std::string::npos);
    }
    CHECK_THROWS_AS(oracle::exact_probability(big, {0.5, 0.5}, event::OriginToBoundary{1}, 40), InvalidArgument);
}

TEST_CASE("gadget enumeration equals p_bar") {
    for (int k = 0; k <= oracle::kMaxGadgetK; ++k)
        for (const ParamPoint pq : {ParamPoint{0.3, 0.7}, ParamPoint{0.1, 0.95}, ParamPoint{0.45, 0.2}}) {
            CAPTURE(k);
            CHECK(std::abs(oracle::gadget_exact(pq.p, pq.q, k) - bounds::p_bar(pq.p, pq.q, k)) < 1e-12);
        }
    CHECK(oracle::gadget_exact(0.3, 1.0, 3) == doctest::Approx(bounds::collapse_s(0.3, 3)).epsilon(1e-14));
    CHECK_THROWS_AS(oracle::gadget_exact(0.3, 0.5, 7), ResourceLimit);
}

}
