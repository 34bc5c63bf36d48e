#include "doctest.h"

#include <algorithm>
#include <set>

#include "../support/brute.hpp"
#include "slabperc/error.hpp"
#include "slabperc/lattice.hpp"

using namespace slabperc;

TEST_SUITE("lattice") {

TEST_CASE("centered box counts for k=1, n=1") {
    const LatticeBox box = build_box({1}, CenteredBox{1});
    CHECK(box.vertex_count() == 18);
    CHECK(box.radial_count() == 24);
    CHECK(box.axial_count() == 9);
    CHECK(box.edge_count() == 33);
}

TEST_CASE("single layer has no axial edges") {
    const LatticeBox box = build_box({0}, CenteredBox{1});
    CHECK(box.edge_count() == 12);
    CHECK(box.axial_count() == 0);
}

TEST_CASE("2x2 rectangle with two layers") {
    const LatticeBox box = build_box({1}, RectBox{0, 1, 0, 1});
    CHECK(box.vertex_count() == 8);
    CHECK(box.radial_count() == 8);
    CHECK(box.axial_count() == 4);
    CHECK(box.edge_count() == 12);
}

TEST_CASE("count formulas agree with brute-force pair enumeration") {
    for (int k = 0; k <= 4; ++k)
        for (int n = 1; n <= 8; ++n) {
            CAPTURE(k);
            CAPTURE(n);
            const LatticeBox box = build_box({k}, CenteredBox{n});
            const std::uint64_t side = 2 * n + 1;
            CHECK(box.vertex_count() == side * side * (k + 1));
            CHECK(box.radial_count() == 2 * (2 * n) * side * (k + 1));
            CHECK(box.axial_count() == side * side * k);
            const auto pairs = brute::count_adjacent_pairs(box);
            CHECK(pairs.radial == box.radial_count());
            CHECK(pairs.axial == box.axial_count());
        }
}

TEST_CASE("edge classes follow coordinates") {
    const LatticeBox box = build_box({1}, CenteredBox{1});
    const auto radial = box.edge_between({0, 0, 0}, {1, 0, 0});
    const auto axial = box.edge_between({0, 0, 0}, {0, 0, 1});
    REQUIRE(radial);
    REQUIRE(axial);
    CHECK(box.edge_info(*radial).cls == EdgeClass::Radial);
    CHECK(box.edge_info(*axial).cls == EdgeClass::Axial);
    CHECK_FALSE(box.edge_between({0, 0, 0}, {1, 1, 0}));
    CHECK_FALSE(box.edge_between({1, 0, 0}, {2, 0, 0}));
}

TEST_CASE("edge indexing is a bijection with valid endpoints") {
    for (const BoxShape shape : {BoxShape{CenteredBox{3}}, BoxShape{RectBox{-2, 4, 1, 3}}})
        for (int k = 0; k <= 3; ++k) {
            const LatticeBox box = build_box({k}, shape);
            std::set<std::pair<VertexId, VertexId>> seen;
            for (EdgeId e = 0; e < box.edge_count(); ++e) {
                const EdgeInfo info = box.edge_info(e);
                REQUIRE(box.contains(info.a));
                REQUIRE(box.contains(info.b));
                const int l1 = std::abs(info.a.x - info.b.x) + std::abs(info.a.y - info.b.y) +
                               std::abs(info.a.z - info.b.z);
                REQUIRE(l1 == 1);
                CHECK((info.cls == EdgeClass::Radial) == (info.a.z == info.b.z));
                REQUIRE(box.edge_between(info.a, info.b) == e);
                REQUIRE(box.edge_between(info.b, info.a) == e);
                seen.insert(box.endpoints(e));
            }
            CHECK(seen.size() == box.edge_count());
        }
}

TEST_CASE("documented edge order") {
    const LatticeBox box = build_box({1}, RectBox{0, 2, 0, 1});
    // Layer 0 x-direction edges, row-major.
    CHECK(box.edge_between({0, 0, 0}, {1, 0, 0}) == 0u);
    CHECK(box.edge_between({1, 0, 0}, {2, 0, 0}) == 1u);
    CHECK(box.edge_between({0, 1, 0}, {1, 1, 0}) == 2u);
    // Then layer 0 y-direction edges.
    CHECK(box.edge_between({0, 0, 0}, {0, 1, 0}) == 4u);
    // Layer 1 starts after the 7 radial edges of layer 0.
    CHECK(box.edge_between({0, 0, 1}, {1, 0, 1}) == 7u);
    // Axial edges last, one column at a time.
    CHECK(box.edge_between({0, 0, 0}, {0, 0, 1}) == 14u);
    CHECK(box.edge_between({1, 0, 0}, {1, 0, 1}) == 15u);
}

TEST_CASE("layer-0 indices are shared with the k=0 box") {
    const LatticeBox plane = build_box({0}, CenteredBox{3});
    const LatticeBox slab = build_box({2}, CenteredBox{3});
    for (EdgeId e = 0; e < plane.edge_count(); ++e) {
        const EdgeInfo a = plane.edge_info(e);
        const EdgeInfo b = slab.edge_info(e);
        CHECK(a.a == b.a);
        CHECK(a.b == b.b);
    }
}

TEST_CASE("indexing is stable across constructions") {
    const LatticeBox a = build_box({2}, CenteredBox{4});
    const LatticeBox b = build_box({2}, CenteredBox{4});
    for (EdgeId e = 0; e < a.edge_count(); ++e) REQUIRE(a.endpoints(e) == b.endpoints(e));
}

TEST_CASE("boundary sizes") {
    CHECK(build_box({0}, CenteredBox{1}).boundary().size() == 8);
    CHECK(build_box({1}, CenteredBox{1}).boundary().size() == 16);
    CHECK(build_box({2}, CenteredBox{2}).boundary().size() == 48);
}

TEST_CASE("boundary and interior partition the vertices") {
    const LatticeBox box = build_box({2}, CenteredBox{3});
    const auto boundary = box.boundary();
    std::size_t interior = 0;
    for (VertexId v = 0; v < box.vertex_count(); ++v) {
        const Site s = box.site(v);
        const bool on = std::max(std::abs(s.x), std::abs(s.y)) == 3;
        CHECK(on == box.on_boundary(v));
        CHECK(on == std::binary_search(boundary.begin(), boundary.end(), v));
        interior += !on;
    }
    CHECK(interior + boundary.size() == box.vertex_count());
    CHECK(interior == 5u * 5u * 3u);
}

TEST_CASE("vertex and site round trip") {
    const LatticeBox box = build_box({2}, RectBox{-3, 1, 2, 5});
    for (VertexId v = 0; v < box.vertex_count(); ++v) CHECK(box.vertex(box.site(v)) == v);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(build_box({-1}, CenteredBox{1}), InvalidArgument);
    CHECK_THROWS_AS(build_box({0}, CenteredBox{0}), InvalidArgument);
    CHECK_THROWS_AS(build_box({0}, RectBox{1, 0, 0, 1}), InvalidArgument);
    CHECK_THROWS_AS(build_box({0}, RectBox{0, 0, 0, 0}), InvalidArgument);
    CHECK_THROWS_AS(build_box({40000}, CenteredBox{200}), ResourceLimit);
}

TEST_CASE("out of range queries") {
    const LatticeBox box = build_box({1}, CenteredBox{1});
    CHECK_THROWS_AS(box.edge_info(33), InvalidArgument);
    CHECK_THROWS_AS(box.vertex({2, 0, 0}), GeometryError);
    CHECK_THROWS_AS(build_box({1}, RectBox{0, 1, 0, 1}).boundary(), InvalidArgument);
}

TEST_CASE("shape strings parse back") {
    for (const BoxShape shape : {BoxShape{CenteredBox{7}}, BoxShape{RectBox{-1, 3, 0, 2}}}) {
        const LatticeBox box = build_box({1}, shape);
        CHECK(build_box({1}, parse_shape(box.shape_string())) == box);
    }
    const auto rect2 = parse_shape("rect2");
    CHECK(std::get<RectBox>(rect2).x1 == 1);
    CHECK_THROWS_AS(parse_shape("square:3"), InvalidArgument);
    CHECK_THROWS_AS(parse_shape("rect:1,2"), InvalidArgument);
}

}
