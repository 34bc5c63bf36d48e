#include "doctest.h"

#include <cmath>

#include "../support/brute.hpp"
#include "slabperc/error.hpp"
#include "slabperc/estimators.hpp"

using namespace slabperc;

TEST_SUITE("estimators") {

TEST_CASE("Monte Carlo agrees with brute-force enumeration") {
    const LatticeBox box = build_box({1}, RectBox{0, 1, 0, 1});
    const ParamPoint pq{0.45, 0.6};
    const EventSpec spec = event::Connected{{0, 0, 0}, {1, 1, 1}};
    const double exact = brute::enumerate(box, pq, [&](const BondConfig& c) {
        return brute::connected(box, c, {0, 0, 0}, {1, 1, 1});
    });
    const Estimate e = estimate_event(box, pq, spec, 40'000, 77);
    CHECK(std::abs(e.mean - exact) < 5 * e.std_error);
    CHECK(e.replicas == 40'000);
    CHECK(e.event == "connected:0,0,0:1,1,1");
    CHECK(e.std_error == doctest::Approx(std::sqrt(e.mean * (1 - e.mean) / 40'000.0)));
}

TEST_CASE("results do not depend on the job count") {
    const LatticeBox box = build_box({2}, CenteredBox{5});
    const EventSpec spec = event::OriginToBoundary{5};
    const Estimate one = estimate_event(box, {0.45, 0.5}, spec, 997, 3, 1);
    for (unsigned jobs : {2u, 3u, 8u}) {
        const Estimate many = estimate_event(box, {0.45, 0.5}, spec, 997, 3, jobs);
        CHECK(many.successes == one.successes);
    }
    const TailCurve t1 = tail_curve({0.4, 0.4}, 1, {1, 5, 10}, 10, 500, 4, 1);
    const TailCurve t3 = tail_curve({0.4, 0.4}, 1, {1, 5, 10}, 10, 500, 4, 3);
    CHECK(t1.survivors == t3.survivors);
    CHECK(t1.truncated == t3.truncated);
}

TEST_CASE("tail survival is non-increasing and starts at one") {
    const TailCurve t = tail_curve({0.3, 0.2}, 1, {1, 2, 4, 8, 16}, 16, 2000, 9);
    CHECK(t.survivors[0] == t.replicas);
    for (std::size_t i = 1; i < t.survival.size(); ++i) CHECK(t.survival[i] <= t.survival[i - 1]);
}

TEST_CASE("tail curve argument checks") {
    CHECK_THROWS_AS(tail_curve({0.3, 0.2}, 1, {}, 4, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(tail_curve({0.3, 0.2}, 1, {0, 2}, 4, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(tail_curve({0.3, 0.2}, 1, {3, 2}, 4, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(tail_curve({0.3, 0.2}, 1, {2, 5}, 4, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(tail_curve({0.3, 0.2}, 1, {2, 4}, 4, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(tail_curve({1.3, 0.2}, 1, {2, 4}, 4, 10, 1), InvalidArgument);
}

TEST_CASE("decay fit recovers an exact exponential") {
    std::vector<std::uint64_t> n;
    std::vector<double> s;
    for (std::uint64_t i = 5; i <= 30; ++i) {
        n.push_back(i);
        s.push_back(0.8 * std::exp(-0.25 * static_cast<double>(i)));
    }
    const DecayFit fit = fit_decay(make_tail(n, s, 100'000'000));
    CHECK(fit.slope == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(0.8)).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.points == 26);
}

TEST_CASE("decay fit drops thin bins and refuses too few") {
    const TailCurve t = make_tail({1, 2, 3, 4}, {0.5, 0.25, 0.125, 0.0}, 1000);
    const DecayFit fit = fit_decay(t, 100);
    CHECK(fit.points == 3);
    CHECK(fit.n_hi == 3);
    CHECK(fit.slope == doctest::Approx(-std::log(2.0)));
    CHECK_THROWS_AS(fit_decay(t, 200), FitInfeasible);
    CHECK(fit_decay(make_tail({1, 2, 3}, {0.5, 0.5, 0.5}, 1000)).r_squared == 1.0);
}

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1e-7) == "1e-07");
    const double x = 0.292893218813452475599;
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("CSV rows") {
    Estimate e = make_estimate(25, 100);
    e.params = {0.3, 0.7};
    e.k = 1;
    e.event = "connected:0,0,0:1,1,1";
    e.seed = 5;
    CHECK(estimate_csv_header() == "p,q,k,event,n,mean,stderr,replicas,seed");
    CHECK(estimate_csv_row(e, 2) ==
          "0.3,0.7,1,\"connected:0,0,0:1,1,1\",2,0.25," + format_number(std::sqrt(0.25 * 0.75 / 100)) + ",100,5");
}

}

TEST_SUITE("estimators") {

TEST_CASE("degenerate parameters") {
    const LatticeBox box = build_box({1}, CenteredBox{3});
    const Estimate all = estimate_event(box, {1, 1}, event::OriginToBoundary{3}, 50, 1);
    CHECK(all.mean == 1.0);
    CHECK(all.std_error == 0.0);
    CHECK(estimate_event(box, {0, 0}, event::OriginToBoundary{1}, 50, 1).mean == 0.0);
    const TailCurve t = tail_curve({0, 0}, 1, {1, 2}, 3, 50, 1);
    CHECK(t.survival[0] == 1.0);
    CHECK(t.survival[1] == 0.0);
}

TEST_CASE("estimates are non-decreasing in the parameters under shared seeds") {
    const LatticeBox box = build_box({1}, CenteredBox{4});
    std::uint64_t last = 0;
    for (double p : {0.2, 0.3, 0.4, 0.5}) {
        const Estimate e = estimate_event(box, {p, p}, event::OriginToBoundary{4}, 400, 2);
        CHECK(e.successes >= last);
        last = e.successes;
    }
}

}
