#include "slabperc/curve.hpp"

#include <algorithm>
#include <cmath>

#include "slabperc/bounds.hpp"
#include "slabperc/cluster.hpp"
#include "slabperc/error.hpp"

namespace slabperc::curve {

RootEstimate stochastic_bisection(const ProbeFn& probe, const BisectionOptions& options, std::uint64_t seed) {
    if (!(options.tol > 0.0)) throw InvalidArgument("bisection tolerance must be > 0");
    if (options.replicas_per_probe < 1) throw InvalidArgument("replicas per probe must be >= 1");
    RootEstimate out;
    double lo = 0.0, hi = 1.0;
    for (std::uint64_t i = 0; hi - lo > options.tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        Estimate e = probe(mid, rng::derive_seed(seed, i));
        (e.mean < options.threshold ? lo : hi) = mid;
        out.probes.push_back({mid, std::move(e)});
    }
    out.value = 0.5 * (lo + hi);

    bool any_below = false, any_above = false;
    for (const auto& pr : out.probes) (pr.estimate.mean < options.threshold ? any_below : any_above) = true;
    out.clamped_low = any_above && !any_below;
    out.clamped_high = any_below && !any_above;

    auto significant_below = [&](const Estimate& e) { return e.mean + options.z * e.std_error < options.threshold; };
    auto significant_above = [&](const Estimate& e) { return e.mean - options.z * e.std_error > options.threshold; };
    out.ci_lower = 0.0;
    out.ci_upper = 1.0;
    for (const auto& pr : out.probes) {
        if (significant_below(pr.estimate)) out.ci_lower = std::max(out.ci_lower, pr.x);
        if (significant_above(pr.estimate)) out.ci_upper = std::min(out.ci_upper, pr.x);
    }
    // The bisection path can leave the nearest significant probe far away on one side;
    // walk outward from the estimate at tol, 2 tol, 4 tol, ... until a probe resolves.
    std::uint64_t next = out.probes.size();
    for (double step = options.tol; out.value + step < out.ci_upper; step *= 2) {
        const double x = out.value + step;
        Estimate e = probe(x, rng::derive_seed(seed, next++));
        const bool done = significant_above(e);
        out.probes.push_back({x, std::move(e)});
        if (done) {
            out.ci_upper = x;
            break;
        }
    }
    for (double step = options.tol; out.value - step > out.ci_lower; step *= 2) {
        const double x = out.value - step;
        Estimate e = probe(x, rng::derive_seed(seed, next++));
        const bool done = significant_below(e);
        out.probes.push_back({x, std::move(e)});
        if (done) {
            out.ci_lower = x;
            break;
        }
    }
    out.ci_halfwidth = std::max({out.value - out.ci_lower, out.ci_upper - out.value, options.tol});

    auto sorted = out.probes;
    std::sort(sorted.begin(), sorted.end(), [](const Probe& a, const Probe& b) { return a.x < b.x; });
    for (std::size_t i = 0; i < sorted.size(); ++i)
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            const auto& a = sorted[i].estimate;
            const auto& b = sorted[j].estimate;
            const double sigma = std::hypot(a.std_error, b.std_error);
            if (a.mean - b.mean > options.monotonicity_sigmas * sigma && a.mean > b.mean)
                throw DiagnosticError("non-monotone probes: estimate " + format_number(a.mean) + " at " +
                                      format_number(sorted[i].x) + " exceeds " + format_number(b.mean) + " at " +
                                      format_number(sorted[j].x) + "; raise replicas per probe");
        }
    return out;
}

namespace {

std::string criterion_text(int n, const BisectionOptions& o) {
    return "lr-crossing n=" + std::to_string(n) + " threshold=" + format_number(o.threshold);
}

LatticeBox crossing_box(int k, int n) {
    if (n < 2) throw InvalidArgument("crossing box side n must be >= 2");
    return LatticeBox(SlabSpec{k}, RectBox{0, n - 1, 0, n - 1});
}

}  // namespace

CurvePoint qc_at(double p, int k, int n, const BisectionOptions& options, std::uint64_t seed) {
    const double pk = bounds::horizontal_threshold(k);
    if (!(p > pk && p <= 0.5))
        throw InvalidArgument("p = " + format_number(p) + " outside (p_k, 1/2] = (" + format_number(pk) + ", 0.5]");
    if (options.tol < 1e-3) throw InvalidArgument("bisection tolerance must be >= 1e-3");
    const LatticeBox box = crossing_box(k, n);
    const EventSpec spec = event::LeftRightCrossing{};
    auto probe = [&](double q, std::uint64_t s) {
        return estimate_event(box, {p, q}, spec, options.replicas_per_probe, s, options.jobs);
    };
    RootEstimate root = stochastic_bisection(probe, options, seed);
    CurvePoint pt;
    pt.p = p;
    pt.q_est = root.value;
    pt.ci_halfwidth = root.ci_halfwidth;
    pt.n = n;
    pt.replicas = options.replicas_per_probe;
    pt.criterion = criterion_text(n, options);
    pt.clamped_low = root.clamped_low;
    pt.clamped_high = root.clamped_high;
    pt.seed = seed;
    pt.probes = std::move(root.probes);
    return pt;
}

InversePoint pc_at(double q, int k, int n, const BisectionOptions& options, std::uint64_t seed) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in [0,1]");
    const LatticeBox box = crossing_box(k, n);
    const EventSpec spec = event::LeftRightCrossing{};
    auto probe = [&](double p, std::uint64_t s) {
        return estimate_event(box, {p, q}, spec, options.replicas_per_probe, s, options.jobs);
    };
    const RootEstimate root = stochastic_bisection(probe, options, seed);
    return {q, root.value, root.ci_halfwidth, n, seed};
}

CriticalCurve sweep(const std::vector<double>& p_grid, int k, int n, const SweepOptions& options, std::uint64_t seed) {
    if (p_grid.empty()) throw InvalidArgument("p grid is empty");
    const double pk = bounds::horizontal_threshold(k);
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (!(p_grid[i] > pk && p_grid[i] <= 0.5))
            throw InvalidArgument("grid value " + format_number(p_grid[i]) + " outside (p_k, 1/2]");
        if (i > 0 && !(p_grid[i] > p_grid[i - 1])) throw InvalidArgument("p grid must be strictly increasing");
    }
    CriticalCurve c;
    c.k = k;
    c.n = n;
    c.seed = seed;
    c.criterion = criterion_text(n, options.bisection);
    for (std::size_t i = 0; i < p_grid.size(); ++i)
        c.points.push_back(qc_at(p_grid[i], k, n, options.bisection, rng::derive_seed(seed, i)));
    if (options.two_scale)
        for (std::size_t i = 0; i < p_grid.size(); ++i)
            c.second_scale.push_back(qc_at(p_grid[i], k, 2 * n, options.bisection, rng::derive_seed(seed, i, 1)));
    if (options.inverse)
        for (std::size_t i = 0; i < p_grid.size(); ++i)
            c.inverse.push_back(pc_at(c.points[i].q_est, k, n, options.bisection, rng::derive_seed(seed, i, 2)));
    return c;
}

Diagnostics diagnostics(const std::vector<CurvePoint>& points, const BoundFn& bound,
                        const std::vector<InversePoint>* inverse, std::size_t trim) {
    if (points.size() < 3) throw InvalidArgument("curve diagnostics need at least 3 points");
    if (2 * trim + 2 > points.size()) throw InvalidArgument("interior window leaves fewer than 2 points");
    Diagnostics d;
    d.window_a = points[trim].p;
    d.window_b = points[points.size() - 1 - trim].p;
    d.strictly_decreasing = true;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto& a = points[i];
        const auto& b = points[i + 1];
        PairDiagnostic pd;
        pd.p0 = a.p;
        pd.p1 = b.p;
        pd.difference = b.q_est - a.q_est;
        pd.combined_ci = a.ci_halfwidth + b.ci_halfwidth;
        pd.decreasing_beyond_ci = pd.difference + pd.combined_ci < 0.0;
        pd.increasing_beyond_ci = pd.difference - pd.combined_ci > 0.0;
        pd.in_window = i >= trim && i + 1 <= points.size() - 1 - trim;
        if (pd.decreasing_beyond_ci || pd.increasing_beyond_ci)
            pd.ratio = std::abs(pd.difference) / std::abs(b.p - a.p);
        if (!pd.decreasing_beyond_ci) d.strictly_decreasing = false;
        if (pd.increasing_beyond_ci) {
            ++d.violations;
            d.findings.push_back("violates decreasing at the CI level between p=" + format_number(a.p) +
                                 " and p=" + format_number(b.p));
        }
        if (pd.in_window && pd.ratio) {
            d.c_hat = d.c_hat ? std::min(*d.c_hat, *pd.ratio) : *pd.ratio;
            d.C_hat = d.C_hat ? std::max(*d.C_hat, *pd.ratio) : *pd.ratio;
        }
        d.pairs.push_back(pd);
    }
    d.findings.push_back(d.strictly_decreasing ? "consistent with a strictly decreasing curve"
                                               : "monotonicity flag: some adjacent differences are not resolved as decreasing");
    if (bound) {
        for (const auto& pt : points) {
            const double b = bound(pt.p);
            d.bound_values.push_back(b);
            const bool ok = pt.q_est <= b + pt.ci_halfwidth;
            d.within_bound.push_back(ok);
            if (!ok) {
                d.all_within_bound = false;
                d.findings.push_back("violates the upper bound at p=" + format_number(pt.p));
            }
        }
        if (d.all_within_bound) d.findings.push_back("consistent with the upper bound at every point");
    }
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        const double h0 = points[i].p - points[i - 1].p;
        const double h1 = points[i + 1].p - points[i].p;
        const double second = (points[i + 1].q_est - points[i].q_est) / h1 - (points[i].q_est - points[i - 1].q_est) / h0;
        if (second > 0) ++d.convex_steps;
        if (second < 0) ++d.concave_steps;
    }
    if (inverse && !inverse->empty()) {
        if (inverse->size() != points.size()) throw InvalidArgument("inverse sweep length differs from the curve");
        double worst = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) worst = std::max(worst, std::abs((*inverse)[i].p_est - points[i].p));
        d.max_inverse_error = worst;
    }
    return d;
}

std::string curve_csv(const CriticalCurve& curve) {
    std::string out = "p,q_est,ci,n,replicas\n";
    auto rows = [&](const std::vector<CurvePoint>& pts) {
        for (const auto& pt : pts)
            out += format_number(pt.p) + "," + format_number(pt.q_est) + "," + format_number(pt.ci_halfwidth) + "," +
                   std::to_string(pt.n) + "," + std::to_string(pt.replicas) + "\n";
    };
    rows(curve.points);
    rows(curve.second_scale);
    return out;
}

}  // namespace slabperc::curve
