#include "slabperc/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "slabperc/error.hpp"
#include "slabperc/parallel.hpp"

namespace slabperc::renorm {

namespace {

void check_blocks(const BlockSpec& blocks) {
    if (blocks.m < 1) throw InvalidArgument("block side m must be >= 1");
    if (blocks.window < 1) throw InvalidArgument("block window must be >= 1");
}

// Lateral max-norm distance from (x, y) to the block rectangle.
int distance_to(const BlockRect& r, int x, int y) {
    const int dx = x < r.x0 ? r.x0 - x : (x > r.x1 ? x - r.x1 : 0);
    const int dy = y < r.y0 ? r.y0 - y : (y > r.y1 ? y - r.y1 : 0);
    return std::max(dx, dy);
}

}  // namespace

LatticeBox ambient_box(int k, const BlockSpec& blocks) {
    check_blocks(blocks);
    const int lo = 1 - blocks.m;
    const int hi = blocks.m * (blocks.window + 1);
    return LatticeBox(SlabSpec{k}, RectBox{lo, hi, lo, hi});
}

int block_of(int x, int m) {
    const int shifted = x - 1;
    return shifted >= 0 ? shifted / m : -((-shifted + m - 1) / m);
}

std::uint64_t tail_threshold(int k, int m) {
    const std::uint64_t side = 4 * static_cast<std::uint64_t>(m) + 1;
    return (static_cast<std::uint64_t>(k) + 1) * side * side;
}

Estimate block_probability(const ParamPoint& params, int m, int k, std::uint64_t replicas, std::uint64_t seed,
                           unsigned jobs) {
    const LatticeBox box = ambient_box(k, {m, 1});
    return estimate_event(box, params, event::BlockReach{0, 0, m}, replicas, seed, jobs);
}

Lemma1Report lemma1_inequality_report(const ParamPoint& params, int m, int k, std::uint64_t replicas,
                                      std::uint64_t seed, double epsilon, unsigned jobs) {
    validate(params);
    if (replicas < 1) throw InvalidArgument("replicas must be >= 1");
    Lemma1Report rep;
    rep.params = params;
    rep.k = k;
    rep.m = m;
    rep.seed = seed;
    rep.epsilon = epsilon;
    rep.budget = bounds::lemma1_budget(m, k, params.q);

    const LatticeBox box = ambient_box(k, {m, 1});
    const EventSpec spec = event::BlockReach{0, 0, m};
    const CompiledEvent compiled(box, spec);

    // Q(S_m): every axial bond of the 3m x 3m column window around S_m is closed.
    const BlockRect s = block_rect(0, 0, m);
    std::vector<EdgeId> window_axial;
    for (EdgeId e = box.radial_count(); e < box.edge_count(); ++e) {
        const Site a = box.site(box.endpoints(e).first);
        if (distance_to(s, a.x, a.y) <= m) window_axial.push_back(e);
    }
    rep.closed_axial = window_axial.size();

    struct Work {
        BondConfig config;
        ClusterForest forest;
        CompiledEvent event;
        std::uint64_t hits = 0;
    };
    auto states = parallel_chunks(
        replicas, jobs, [&] { return Work{BondConfig(box.edge_count()), ClusterForest{}, compiled}; },
        [&](Work& w, std::uint64_t r) {
            sample_into(w.config, box, params, SeedSpec{seed, r});
            for (EdgeId e : window_axial) w.config.set(e, false);
            w.forest.build(box, w.config);
            if (w.event(w.forest)) ++w.hits;
        });
    std::uint64_t hits = 0;
    for (const auto& st : states) hits += st.hits;
    rep.conditioned = make_estimate(hits, replicas);
    rep.conditioned.params = params;
    rep.conditioned.k = k;
    rep.conditioned.event = describe(spec) + "|Q";
    rep.conditioned.seed = seed;

    const double weight = rep.budget.prob_all_axial_closed;
    rep.joint = rep.conditioned.mean * weight;
    rep.joint_stderr = rep.conditioned.std_error * weight;

    // Layer-0 edge indices coincide between the k=0 and the slab box, so this
    // reuses the slab's planar uniforms.
    const LatticeBox plane = ambient_box(0, {m, 1});
    rep.single_layer = estimate_event(plane, params, spec, replicas, seed, jobs);
    rep.union_bound = (k + 1) * rep.single_layer.mean;
    rep.union_bound_stderr = (k + 1) * rep.single_layer.std_error;

    const double sigma = std::hypot(rep.joint_stderr, rep.union_bound_stderr);
    rep.holds = rep.joint <= rep.union_bound + 4.0 * sigma;
    const double diff = rep.joint - rep.union_bound;
    rep.excess_sigmas = sigma > 0 ? diff / sigma : (diff > 0 ? INFINITY : (diff < 0 ? -INFINITY : 0.0));

    rep.block = estimate_event(box, params, spec, replicas, rng::derive_seed(seed, 1), jobs);
    rep.block_below_epsilon = rep.block.mean + 4.0 * rep.block.std_error <= epsilon;
    return rep;
}

std::size_t SiteField::open_count() const {
    return static_cast<std::size_t>(std::count(open.begin(), open.end(), std::uint8_t{1}));
}

BlockFieldEvaluator::BlockFieldEvaluator(int k, const BlockSpec& blocks)
    : blocks_(blocks), box_(ambient_box(k, blocks)) {
    events_.reserve(static_cast<std::size_t>(blocks.window * blocks.window));
    for (int vy = 0; vy < blocks.window; ++vy)
        for (int vx = 0; vx < blocks.window; ++vx) events_.emplace_back(box_, event::BlockReach{vx, vy, blocks.m});
}

void BlockFieldEvaluator::evaluate(const BondConfig& config, SiteField& out) {
    forest_.build(box_, config);
    out.window = blocks_.window;
    out.open.resize(events_.size());
    for (std::size_t i = 0; i < events_.size(); ++i) out.open[i] = events_[i](forest_) ? 1 : 0;
}

SiteField renormalized_sample(const ParamPoint& params, int k, const BlockSpec& blocks, const SeedSpec& seed) {
    validate(params);
    BlockFieldEvaluator eval(k, blocks);
    const BondConfig config = sample_config(eval.box(), params, seed);
    SiteField field;
    eval.evaluate(config, field);
    return field;
}

RenormSummary renormalized_statistics(const ParamPoint& params, int k, const BlockSpec& blocks,
                                      std::uint64_t samples, std::uint64_t seed, int max_distance, unsigned jobs) {
    validate(params);
    if (samples < 2) throw InvalidArgument("need at least 2 samples for correlation estimates");
    if (max_distance < 1) throw InvalidArgument("max distance must be >= 1");
    const BlockFieldEvaluator prototype(k, blocks);
    const int w = blocks.window;

    // Unordered block pairs grouped by renormalized max-norm distance.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs(static_cast<std::size_t>(max_distance) + 1);
    for (int i = 0; i < w * w; ++i)
        for (int j = i + 1; j < w * w; ++j) {
            const int d = std::max(std::abs(i % w - j % w), std::abs(i / w - j / w));
            if (d <= max_distance) pairs[static_cast<std::size_t>(d)].emplace_back(i, j);
        }

    const std::size_t dims = static_cast<std::size_t>(max_distance) + 1;
    struct Work {
        BlockFieldEvaluator eval;
        BondConfig config;
        SiteField field;
        std::uint64_t sf = 0, sf2 = 0;
        std::vector<std::uint64_t> sx, sx2, sxf;
    };
    auto states = parallel_chunks(
        samples, jobs,
        [&] {
            return Work{prototype, BondConfig(prototype.box().edge_count()), {}, 0, 0,
                        std::vector<std::uint64_t>(dims), std::vector<std::uint64_t>(dims),
                        std::vector<std::uint64_t>(dims)};
        },
        [&](Work& st, std::uint64_t r) {
            sample_into(st.config, st.eval.box(), params, SeedSpec{seed, r});
            st.eval.evaluate(st.config, st.field);
            const std::uint64_t f = st.field.open_count();
            st.sf += f;
            st.sf2 += f * f;
            for (std::size_t d = 1; d < dims; ++d) {
                std::uint64_t x = 0;
                for (const auto& [a, b] : pairs[d]) x += st.field.open[a] & st.field.open[b];
                st.sx[d] += x;
                st.sx2[d] += x * x;
                st.sxf[d] += x * f;
            }
        });

    std::uint64_t sf = 0, sf2 = 0;
    std::vector<std::uint64_t> sx(dims), sx2(dims), sxf(dims);
    for (const auto& st : states) {
        sf += st.sf;
        sf2 += st.sf2;
        for (std::size_t d = 0; d < dims; ++d) {
            sx[d] += st.sx[d];
            sx2[d] += st.sx2[d];
            sxf[d] += st.sxf[d];
        }
    }

    RenormSummary out;
    out.params = params;
    out.k = k;
    out.blocks = blocks;
    out.samples = samples;
    out.seed = seed;
    const double n = static_cast<double>(samples);
    const double sites = static_cast<double>(w * w);
    const double mf = static_cast<double>(sf) / n / sites;
    const double var_f = std::max(0.0, static_cast<double>(sf2) / n / (sites * sites) - mf * mf);
    out.density = mf;
    out.density_stderr = std::sqrt(var_f / n);
    for (std::size_t d = 1; d < dims; ++d) {
        DistanceCorrelation c;
        c.distance = static_cast<int>(d);
        c.pairs_per_sample = pairs[d].size();
        if (pairs[d].empty()) {
            out.correlations.push_back(c);
            continue;
        }
        const double np = static_cast<double>(pairs[d].size());
        const double mx = static_cast<double>(sx[d]) / n / np;
        const double var_x = std::max(0.0, static_cast<double>(sx2[d]) / n / (np * np) - mx * mx);
        const double cov_xf = static_cast<double>(sxf[d]) / n / (np * sites) - mx * mf;
        c.covariance = mx - mf * mf;
        // Gradient of (X, F) -> X - F^2 is (1, -2F).
        const double var_cov = var_x - 4.0 * mf * cov_xf + 4.0 * mf * mf * var_f;
        c.covariance_stderr = std::sqrt(std::max(0.0, var_cov) / n);
        const double denom = mf * (1.0 - mf);
        if (denom > 0) {
            c.correlation = c.covariance / denom;
            // Gradient of (X, F) -> (X - F^2) / (F - F^2).
            const double gx = 1.0 / denom;
            const double gf = (-2.0 * mf * denom - c.covariance * (1.0 - 2.0 * mf)) / (denom * denom);
            const double var_corr = gx * gx * var_x + 2.0 * gx * gf * cov_xf + gf * gf * var_f;
            c.correlation_stderr = std::sqrt(std::max(0.0, var_corr) / n);
        }
        out.correlations.push_back(c);
    }
    return out;
}

std::vector<EdgeId> dependency_edges(const LatticeBox& box, int vx, int vy, int m) {
    const BlockRect r = block_rect(vx, vy, m);
    if (box.xmin() > r.x0 - m || box.xmax() < r.x1 + m || box.ymin() > r.y0 - m || box.ymax() < r.y1 + m)
        throw GeometryError("dependency set of block (" + std::to_string(vx) + "," + std::to_string(vy) +
                            ") needs a margin of " + std::to_string(m) + " inside box " + box.shape_string());
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < box.edge_count(); ++e) {
        const auto [a, b] = box.endpoints(e);
        const Site sa = box.site(a);
        const Site sb = box.site(b);
        if (distance_to(r, sa.x, sa.y) <= m - 1 || distance_to(r, sb.x, sb.y) <= m - 1) out.push_back(e);
    }
    return out;
}

IndependenceCheck check_block_independence(int k, const BlockSpec& blocks, int min_distance) {
    const LatticeBox box = ambient_box(k, blocks);
    const int w = blocks.window;
    std::vector<std::vector<EdgeId>> deps;
    for (int vy = 0; vy < w; ++vy)
        for (int vx = 0; vx < w; ++vx) deps.push_back(dependency_edges(box, vx, vy, blocks.m));

    auto overlap = [](const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
        auto i = a.begin();
        auto j = b.begin();
        while (i != a.end() && j != b.end()) {
            if (*i == *j) return true;
            (*i < *j) ? ++i : ++j;
        }
        return false;
    };

    IndependenceCheck check;
    check.min_distance = min_distance;
    int worst_overlap = 0;
    for (int i = 0; i < w * w; ++i)
        for (int j = i + 1; j < w * w; ++j) {
            const int d = std::max(std::abs(i % w - j % w), std::abs(i / w - j / w));
            const bool shared = overlap(deps[static_cast<std::size_t>(i)], deps[static_cast<std::size_t>(j)]);
            if (shared) worst_overlap = std::max(worst_overlap, d);
            if (d >= min_distance) {
                ++check.pairs_checked;
                if (shared) ++check.overlapping_pairs;
            }
        }
    check.disjoint_from = worst_overlap + 1;
    return check;
}

}  // namespace slabperc::renorm
