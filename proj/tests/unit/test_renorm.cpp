#include "doctest.h"

#include <algorithm>

#include "slabperc/error.hpp"
#include "slabperc/renorm.hpp"

using namespace slabperc;
using namespace slabperc::renorm;

TEST_SUITE("renorm") {

TEST_CASE("block indexing") {
    CHECK(block_of(1, 4) == 0);
    CHECK(block_of(4, 4) == 0);
    CHECK(block_of(5, 4) == 1);
    CHECK(block_of(0, 4) == -1);
    CHECK(block_of(-3, 4) == -1);
    CHECK(block_of(-4, 4) == -2);
    const BlockRect r = block_rect(2, -1, 3);
    CHECK(r.x0 == 7);
    CHECK(r.x1 == 9);
    CHECK(r.y0 == -2);
    CHECK(r.y1 == 0);
    for (int x = r.x0; x <= r.x1; ++x) CHECK(block_of(x, 3) == 2);
}

TEST_CASE("ambient box") {
    const LatticeBox box = ambient_box(1, {3, 2});
    CHECK(box.xmin() == -2);
    CHECK(box.xmax() == 9);
    CHECK(box.k() == 1);
    CHECK_THROWS_AS(ambient_box(1, {0, 2}), InvalidArgument);
}

TEST_CASE("tail threshold") {
    CHECK(tail_threshold(1, 8) == 2 * 33 * 33);
    CHECK(tail_threshold(0, 1) == 25);
}

TEST_CASE("large clusters through a block force it open") {
    const int k = 1;
    const int m = 2;
    const BlockSpec blocks{m, 4};
    BlockFieldEvaluator eval(k, blocks);
    const LatticeBox& box = eval.box();
    const std::uint64_t threshold = tail_threshold(k, m);
    REQUIRE(box.vertex_count() > threshold);
    int big = 0;
    SiteField field;
    for (std::uint64_t r = 0; r < 200; ++r) {
        const BondConfig cfg = sample_config(box, {0.5, 0.5}, {31, r});
        eval.evaluate(cfg, field);
        const ClusterForest forest = build_forest(box, cfg);
        for (int vy = 0; vy < blocks.window; ++vy)
            for (int vx = 0; vx < blocks.window; ++vx) {
                const BlockRect s = block_rect(vx, vy, m);
                bool has_big = false;
                for (int z = 0; z <= k; ++z)
                    for (int y = s.y0; y <= s.y1; ++y)
                        for (int x = s.x0; x <= s.x1; ++x)
                            has_big = has_big || forest.size_of(box.vertex({x, y, z})) >= threshold;
                if (has_big) {
                    ++big;
                    REQUIRE(field.at(vx, vy));
                }
            }
    }
    CHECK(big > 0);
}

TEST_CASE("block state depends only on its dependency edges") {
    const int k = 1;
    const BlockSpec blocks{2, 3};
    BlockFieldEvaluator eval(k, blocks);
    const LatticeBox& box = eval.box();
    const auto deps = dependency_edges(box, 1, 1, blocks.m);
    SiteField a, b;
    for (std::uint64_t r = 0; r < 300; ++r) {
        const BondConfig base = sample_config(box, {0.5, 0.5}, {41, r});
        BondConfig other = sample_config(box, {0.5, 0.5}, {42, r});
        for (EdgeId e : deps) other.set(e, base.test(e));
        eval.evaluate(base, a);
        eval.evaluate(other, b);
        REQUIRE(a.at(1, 1) == b.at(1, 1));
    }
}

TEST_CASE("dependency sets are disjoint from distance 3") {
    for (int m : {1, 2, 4})
        for (int k : {0, 2}) {
            const IndependenceCheck c = check_block_independence(k, {m, 7}, 5);
            CHECK(c.passed());
            CHECK(c.pairs_checked > 0);
            CHECK(c.disjoint_from <= 3);
        }
}

TEST_CASE("dependency set margin") {
    const LatticeBox box = ambient_box(1, {2, 2});
    CHECK_NOTHROW(dependency_edges(box, 1, 1, 2));
    CHECK_THROWS_AS(dependency_edges(box, 2, 1, 2), GeometryError);
}

TEST_CASE("union-bound report bookkeeping") {
    const Lemma1Report r = lemma1_inequality_report({0.35, 0.05}, 3, 1, 2000, 7);
    CHECK(r.budget.axial_bonds == 81);
    CHECK(r.closed_axial == r.budget.axial_bonds);
    CHECK(r.joint == doctest::Approx(r.conditioned.mean * r.budget.prob_all_axial_closed));
    CHECK(r.union_bound == doctest::Approx(2 * r.single_layer.mean));
    CHECK(r.holds);
    CHECK(r.block.replicas == 2000);
}

TEST_CASE("renormalized statistics are independent of jobs") {
    const auto a = renormalized_statistics({0.3, 0.1}, 1, {2, 5}, 60, 3, 4, 1);
    const auto b = renormalized_statistics({0.3, 0.1}, 1, {2, 5}, 60, 3, 4, 3);
    CHECK(a.density == b.density);
    REQUIRE(a.correlations.size() == 4);
    for (std::size_t i = 0; i < a.correlations.size(); ++i)
        CHECK(a.correlations[i].covariance == b.correlations[i].covariance);
    CHECK(a.correlations[0].pairs_per_sample == 2 * 5 * 4 + 2 * 4 * 4);
}

TEST_CASE("sampled field matches the evaluator") {
    const BlockSpec blocks{2, 3};
    const SiteField f = renormalized_sample({0.5, 0.5}, 1, blocks, {5, 5});
    BlockFieldEvaluator eval(1, blocks);
    SiteField g;
    eval.evaluate(sample_config(eval.box(), {0.5, 0.5}, {5, 5}), g);
    CHECK(f.open == g.open);
}

}

TEST_SUITE("renorm") {

TEST_CASE("k = 0 makes both sides of the inequality equal") {
    const Lemma1Report r = lemma1_inequality_report({0.45, 0.3}, 3, 0, 1000, 2);
    CHECK(r.closed_axial == 0);
    CHECK(r.joint == r.union_bound);
}

TEST_CASE("q = 0 union bound holds with slack") {
    const Lemma1Report r = lemma1_inequality_report({0.45, 0.0}, 3, 2, 2000, 3);
    CHECK(r.budget.prob_all_axial_closed == 1.0);
    CHECK(r.joint <= r.union_bound);
}

TEST_CASE("block probability endpoints and coupling") {
    CHECK(block_probability({1, 1}, 3, 1, 20, 1).mean == 1.0);
    CHECK(block_probability({0, 0}, 3, 1, 20, 1).mean == 0.0);
    const Estimate lo = block_probability({0.3, 0.01}, 4, 1, 500, 9);
    const Estimate hi = block_probability({0.3, 0.2}, 4, 1, 500, 9);
    CHECK(lo.successes <= hi.successes);
}

TEST_CASE("site field endpoints") {
    const SiteField none = renormalized_sample({0, 0}, 1, {2, 3}, {1, 0});
    const SiteField all = renormalized_sample({1, 1}, 1, {2, 3}, {1, 0});
    CHECK(none.open_count() == 0);
    CHECK(all.open_count() == 9);
}

}
