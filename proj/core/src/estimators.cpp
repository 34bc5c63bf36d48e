#include "slabperc/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "slabperc/error.hpp"
#include "slabperc/parallel.hpp"

namespace slabperc {

Estimate make_estimate(std::uint64_t successes, std::uint64_t replicas) {
    Estimate e;
    e.successes = successes;
    e.replicas = replicas;
    e.mean = replicas ? static_cast<double>(successes) / static_cast<double>(replicas) : 0.0;
    e.std_error = replicas ? std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(replicas)) : 0.0;
    return e;
}

Estimate estimate_event(const LatticeBox& box, const ParamPoint& params, const EventSpec& spec,
                        std::uint64_t replicas, std::uint64_t master_seed, unsigned jobs) {
    validate(params);
    if (replicas < 1) throw InvalidArgument("replicas must be >= 1");
    const CompiledEvent compiled(box, spec);

    struct Work {
        BondConfig config;
        ClusterForest forest;
        CompiledEvent event;
        std::uint64_t hits = 0;
    };
    auto states = parallel_chunks(
        replicas, jobs, [&] { return Work{BondConfig(box.edge_count()), ClusterForest{}, compiled, 0}; },
        [&](Work& w, std::uint64_t r) {
            sample_into(w.config, box, params, SeedSpec{master_seed, r});
            w.forest.build(box, w.config);
            if (w.event(w.forest)) ++w.hits;
        });
    std::uint64_t hits = 0;
    for (const auto& s : states) hits += s.hits;

    Estimate e = make_estimate(hits, replicas);
    e.params = params;
    e.k = box.k();
    e.event = describe(spec);
    e.seed = master_seed;
    return e;
}

double TailCurve::std_error(std::size_t i) const {
    const double s = survival.at(i);
    return replicas ? std::sqrt(s * (1.0 - s) / static_cast<double>(replicas)) : 0.0;
}

TailCurve tail_curve(const ParamPoint& params, int k, const std::vector<std::uint64_t>& n_grid, int box_radius,
                     std::uint64_t replicas, std::uint64_t master_seed, unsigned jobs) {
    validate(params);
    if (replicas < 1) throw InvalidArgument("replicas must be >= 1");
    if (n_grid.empty()) throw InvalidArgument("n grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw InvalidArgument("n grid values must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw InvalidArgument("n grid must be strictly increasing");
    }
    const LatticeBox box(SlabSpec{k}, CenteredBox{box_radius});
    if (n_grid.back() > box.vertex_count())
        throw InvalidArgument("n grid value " + std::to_string(n_grid.back()) + " exceeds the box vertex count " +
                              std::to_string(box.vertex_count()));
    if (static_cast<std::uint64_t>(box_radius) < n_grid.back())
        throw InvalidArgument("box radius " + std::to_string(box_radius) + " is below the largest grid value " +
                              std::to_string(n_grid.back()));
    const VertexId origin = box.vertex({0, 0, 0});
    const auto boundary = box.boundary();

    struct Work {
        BondConfig config;
        ClusterForest forest;
        std::vector<std::uint64_t> counts;
        std::uint64_t truncated = 0;
    };
    auto states = parallel_chunks(
        replicas, jobs,
        [&] { return Work{BondConfig(box.edge_count()), ClusterForest{}, std::vector<std::uint64_t>(n_grid.size()), 0}; },
        [&](Work& w, std::uint64_t r) {
            sample_into(w.config, box, params, SeedSpec{master_seed, r});
            w.forest.build(box, w.config);
            const std::uint64_t size = w.forest.size_of(origin);
            for (std::size_t i = 0; i < n_grid.size() && n_grid[i] <= size; ++i) ++w.counts[i];
            const VertexId root = w.forest.find(origin);
            if (std::any_of(boundary.begin(), boundary.end(), [&](VertexId v) { return w.forest.find(v) == root; }))
                ++w.truncated;
        });

    TailCurve tail;
    tail.n_grid = n_grid;
    tail.survivors.assign(n_grid.size(), 0);
    for (const auto& s : states) {
        for (std::size_t i = 0; i < n_grid.size(); ++i) tail.survivors[i] += s.counts[i];
        tail.truncated += s.truncated;
    }
    tail.replicas = replicas;
    for (auto c : tail.survivors) tail.survival.push_back(static_cast<double>(c) / static_cast<double>(replicas));
    tail.params = params;
    tail.k = k;
    tail.box_radius = box_radius;
    tail.seed = master_seed;
    return tail;
}

TailCurve make_tail(std::vector<std::uint64_t> n_grid, std::vector<double> survival, std::uint64_t replicas) {
    if (n_grid.size() != survival.size()) throw InvalidArgument("grid and survival lengths differ");
    TailCurve tail;
    tail.n_grid = std::move(n_grid);
    tail.survival = std::move(survival);
    tail.replicas = replicas;
    for (double s : tail.survival)
        tail.survivors.push_back(static_cast<std::uint64_t>(std::llround(s * static_cast<double>(replicas))));
    return tail;
}

DecayFit fit_decay(const TailCurve& tail, std::uint64_t min_survivors) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < tail.n_grid.size(); ++i) {
        if (tail.survivors[i] == 0 || tail.survivors[i] < min_survivors || !(tail.survival[i] > 0.0)) continue;
        xs.push_back(static_cast<double>(tail.n_grid[i]));
        ys.push_back(std::log(tail.survival[i]));
    }
    if (xs.size() < 3)
        throw FitInfeasible("decay fit needs at least 3 bins with >= " + std::to_string(min_survivors) +
                            " survivors, have " + std::to_string(xs.size()));
    const double count = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    DecayFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += r * r;
    }
    // A flat line explains a flat response perfectly.
    fit.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
    fit.n_lo = static_cast<std::uint64_t>(xs.front());
    fit.n_hi = static_cast<std::uint64_t>(xs.back());
    fit.points = xs.size();
    return fit;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

namespace {

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string estimate_csv_header() { return "p,q,k,event,n,mean,stderr,replicas,seed"; }

std::string estimate_csv_row(const Estimate& e, std::uint64_t n) {
    return format_number(e.params.p) + "," + format_number(e.params.q) + "," + std::to_string(e.k) + "," + csv_field(e.event) +
           "," + std::to_string(n) + "," + format_number(e.mean) + "," + format_number(e.std_error) + "," +
           std::to_string(e.replicas) + "," + std::to_string(e.seed);
}

}  // namespace slabperc
