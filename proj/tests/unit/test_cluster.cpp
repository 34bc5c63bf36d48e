#include "doctest.h"

#include "../support/brute.hpp"
#include "slabperc/cluster.hpp"
#include "slabperc/error.hpp"

using namespace slabperc;

TEST_SUITE("cluster") {

TEST_CASE("connectivity agrees with BFS on random configurations") {
    const LatticeBox box = build_box({2}, CenteredBox{4});
    const std::vector<ParamPoint> points{{0.2, 0.3}, {0.4, 0.6}, {0.55, 0.2}, {0.35, 0.9}};
    int checked = 0;
    for (std::uint64_t r = 0; r < 500; ++r) {
        const ParamPoint pq = points[r % points.size()];
        const BondConfig cfg = sample_config(box, pq, {321, r});
        const ClusterForest forest = build_forest(box, cfg);
        const auto seen = brute::reachable(box, cfg, {0, 0, 0});
        const VertexId origin = box.vertex({0, 0, 0});
        std::uint32_t reach = 0;
        for (VertexId v = 0; v < box.vertex_count(); ++v) {
            REQUIRE(forest.connected(origin, v) == seen[v]);
            reach += seen[v];
        }
        CHECK(forest.size_of(origin) == reach);
        CHECK(evaluate_event(forest, box, event::OriginToBoundary{4}) ==
              brute::origin_reaches_boundary(box, cfg, 4));
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("cluster count matches BFS component count") {
    const LatticeBox box = build_box({1}, CenteredBox{3});
    for (std::uint64_t r = 0; r < 50; ++r) {
        const BondConfig cfg = sample_config(box, {0.4, 0.5}, {8, r});
        std::vector<bool> done(box.vertex_count(), false);
        std::uint32_t components = 0;
        for (VertexId v = 0; v < box.vertex_count(); ++v) {
            if (done[v]) continue;
            ++components;
            const auto seen = brute::reachable(box, cfg, box.site(v));
            for (VertexId w = 0; w < box.vertex_count(); ++w)
                if (seen[w]) done[w] = true;
        }
        CHECK(build_forest(box, cfg).cluster_count() == components);
    }
}

TEST_CASE("opening an edge never breaks a connection") {
    const LatticeBox box = build_box({1}, CenteredBox{4});
    const std::vector<EventSpec> events{event::OriginToBoundary{4}, event::Connected{{0, 0, 0}, {2, -1, 1}},
                                        event::ClusterSizeAtLeast{{0, 0, 0}, 12}, event::LeftRightCrossing{}};
    for (std::uint64_t r = 0; r < 40; ++r) {
        BondConfig cfg = sample_config(box, {0.3, 0.3}, {55, r});
        for (EdgeId e = 0; e < box.edge_count(); e += 3) {
            if (cfg.test(e)) continue;
            const ClusterForest before = build_forest(box, cfg);
            BondConfig more = cfg;
            more.set(e, true);
            const ClusterForest after = build_forest(box, more);
            for (const auto& spec : events)
                if (evaluate_event(before, box, spec)) REQUIRE(evaluate_event(after, box, spec));
            CHECK(after.size_of(box.vertex({0, 0, 0})) >= before.size_of(box.vertex({0, 0, 0})));
        }
    }
}

TEST_CASE("A_{n+1} implies A_n") {
    const LatticeBox box = build_box({2}, CenteredBox{7});
    for (std::uint64_t r = 0; r < 200; ++r) {
        const ClusterForest forest = build_forest(box, sample_config(box, {0.45, 0.5}, {12, r}));
        for (int n = 1; n < 7; ++n)
            if (evaluate_event(forest, box, event::OriginToBoundary{n + 1}))
                REQUIRE(evaluate_event(forest, box, event::OriginToBoundary{n}));
    }
}

TEST_CASE("all open and all closed") {
    const LatticeBox box = build_box({2}, CenteredBox{3});
    BondConfig cfg(box.edge_count());
    ClusterForest forest = build_forest(box, cfg);
    CHECK(forest.cluster_count() == box.vertex_count());
    CHECK_FALSE(evaluate_event(forest, box, event::OriginToBoundary{1}));
    CHECK(evaluate_event(forest, box, event::ClusterSizeAtLeast{{0, 0, 0}, 1}));
    cfg.fill(true);
    forest = build_forest(box, cfg);
    CHECK(forest.cluster_count() == 1);
    CHECK(evaluate_event(forest, box, event::OriginToBoundary{3}));
    CHECK(evaluate_event(forest, box, event::LeftRightCrossing{}));
    CHECK(cluster_size(forest, box, {1, 1, 1}) == box.vertex_count());
}

TEST_CASE("build_without matches clearing the edge") {
    const LatticeBox box = build_box({1}, CenteredBox{3});
    const BondConfig cfg = sample_config(box, {0.5, 0.5}, {2, 2});
    for (EdgeId e = 0; e < box.edge_count(); ++e) {
        ClusterForest skip(box.vertex_count());
        skip.build_without(box, cfg, e);
        BondConfig cleared = cfg;
        cleared.set(e, false);
        const ClusterForest ref = build_forest(box, cleared);
        REQUIRE(skip.cluster_count() == ref.cluster_count());
        for (VertexId v = 0; v < box.vertex_count(); ++v) REQUIRE(skip.size_of(v) == ref.size_of(v));
    }
}

TEST_CASE("block reach on a hand-built path") {
    // m = 2: S_{0,0} = [1,2]^2. A straight open path from (2,1) to (4,1)
    // reaches max-norm distance 2 from the block.
    const int m = 2;
    const LatticeBox box = build_box({0}, RectBox{1 - m, 3 * m, 1 - m, 3 * m});
    BondConfig cfg(box.edge_count());
    cfg.set(*box.edge_between({2, 1, 0}, {3, 1, 0}), true);
    CHECK_FALSE(evaluate_event(build_forest(box, cfg), box, event::BlockReach{0, 0, m}));
    cfg.set(*box.edge_between({3, 1, 0}, {4, 1, 0}), true);
    CHECK(evaluate_event(build_forest(box, cfg), box, event::BlockReach{0, 0, m}));
}

TEST_CASE("block reach through another layer") {
    const int m = 1;
    const LatticeBox box = build_box({1}, RectBox{0, 2, 0, 2});
    BondConfig cfg(box.edge_count());
    // S_{0,0} = {(1,1)}; leave it only through layer 1.
    cfg.set(*box.edge_between({1, 1, 0}, {1, 1, 1}), true);
    CHECK_FALSE(evaluate_event(build_forest(box, cfg), box, event::BlockReach{0, 0, m}));
    cfg.set(*box.edge_between({1, 1, 1}, {2, 1, 1}), true);
    CHECK(evaluate_event(build_forest(box, cfg), box, event::BlockReach{0, 0, m}));
}

TEST_CASE("left-right crossing") {
    const LatticeBox box = build_box({1}, RectBox{0, 3, 0, 3});
    BondConfig cfg(box.edge_count());
    for (int x = 0; x < 3; ++x) cfg.set(*box.edge_between({x, 2, 1}, {x + 1, 2, 1}), true);
    CHECK(evaluate_event(build_forest(box, cfg), box, event::LeftRightCrossing{}));
    cfg.set(*box.edge_between({1, 2, 1}, {2, 2, 1}), false);
    CHECK_FALSE(evaluate_event(build_forest(box, cfg), box, event::LeftRightCrossing{}));
}

TEST_CASE("geometry errors name the problem") {
    const LatticeBox box = build_box({1}, CenteredBox{3});
    CHECK_THROWS_AS(CompiledEvent(box, event::OriginToBoundary{4}), GeometryError);
    CHECK_THROWS_AS(CompiledEvent(box, event::Connected{{0, 0, 0}, {0, 0, 2}}), GeometryError);
    CHECK_THROWS_AS(CompiledEvent(box, event::BlockReach{0, 0, 2}), GeometryError);
    CHECK_THROWS_AS(CompiledEvent(box, event::ClusterSizeAtLeast{{0, 0, 0}, 0}), InvalidArgument);
    try {
        CompiledEvent(box, event::BlockReach{0, 0, 2});
    } catch (const GeometryError& e) {
        CHECK(std::string(e.what()).find("short by 1 on +x, 1 on +y") != std::string::npos);
    }
}

TEST_CASE("event text round trip") {
    const std::vector<EventSpec> events{event::OriginToBoundary{3}, event::Connected{{0, 0, 0}, {1, 1, 1}},
                                        event::ClusterSizeAtLeast{{0, -1, 0}, 10}, event::LeftRightCrossing{},
                                        event::BlockReach{-1, 2, 8}};
    for (const auto& e : events) CHECK(describe(parse_event(describe(e))) == describe(e));
    CHECK(describe(event::Connected{{0, 0, 0}, {1, 1, 1}}) == "connected:0,0,0:1,1,1");
    CHECK_THROWS_AS(parse_event("nonsense"), InvalidArgument);
    CHECK_THROWS_AS(parse_event("origin-boundary:x"), InvalidArgument);
}

}
