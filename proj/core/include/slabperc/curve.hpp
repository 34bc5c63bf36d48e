#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slabperc/estimators.hpp"
#include "slabperc/sampler.hpp"

namespace slabperc::curve {

struct BisectionOptions {
    /// Stop once the bracketing interval is at most this wide.
    double tol = 5e-3;
    std::uint64_t replicas_per_probe = 20000;
    /// Standard errors a probe must clear to count as significantly above or
    /// below the threshold when forming the interval.
    double z = 2.0;
    /// Probes disagreeing with monotonicity by more than this many combined
    /// standard errors abort the run.
    double monotonicity_sigmas = 4.0;
    double threshold = 0.5;
    unsigned jobs = 1;
};

struct Probe {
    double x = 0.0;
    Estimate estimate;
};

/// Root of a noisy non-decreasing function found by interval halving.
struct RootEstimate {
    double value = 0.0;
    double ci_halfwidth = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 1.0;
    /// Every bisection probe fell above (below) the threshold: the root sits at or
    /// beyond the low (high) end of [0,1].
    bool clamped_low = false;
    bool clamped_high = false;
    std::vector<Probe> probes;
};

using ProbeFn = std::function<Estimate(double x, std::uint64_t probe_seed)>;

/// Probe i runs with seed derive_seed(seed, i). Throws DiagnosticError when
/// two probes contradict monotonicity beyond options.monotonicity_sigmas.
RootEstimate stochastic_bisection(const ProbeFn& probe, const BisectionOptions& options, std::uint64_t seed);

struct CurvePoint {
    double p = 0.0;
    double q_est = 0.0;
    double ci_halfwidth = 0.0;
    int n = 0;
    std::uint64_t replicas = 0;
    std::string criterion;
    bool clamped_low = false;
    bool clamped_high = false;
    std::uint64_t seed = 0;
    std::vector<Probe> probes;
};

/// Root in q of the any-layer left-right crossing probability of the n x n
/// slab box at threshold 1/2. Requires p in (p_k, 1/2] and tol >= 1e-3.
CurvePoint qc_at(double p, int k, int n, const BisectionOptions& options, std::uint64_t seed);

/// Same criterion with q fixed, bisecting in p over [0,1].
struct InversePoint {
    double q = 0.0;
    double p_est = 0.0;
    double ci_halfwidth = 0.0;
    int n = 0;
    std::uint64_t seed = 0;
};
InversePoint pc_at(double q, int k, int n, const BisectionOptions& options, std::uint64_t seed);

struct CriticalCurve {
    int k = 0;
    int n = 0;
    std::uint64_t seed = 0;
    std::string criterion;
    std::vector<CurvePoint> points;
    /// Same grid at scale 2n when requested.
    std::vector<CurvePoint> second_scale;
    /// p_c(q_est(p)) per grid point when requested.
    std::vector<InversePoint> inverse;
};

struct SweepOptions {
    BisectionOptions bisection;
    bool two_scale = false;
    bool inverse = false;
};

/// Grid must be strictly increasing inside (p_k, 1/2]. Point i uses seed
/// derive_seed(seed, i); the 2n scale and inverse runs use separate streams.
CriticalCurve sweep(const std::vector<double>& p_grid, int k, int n, const SweepOptions& options, std::uint64_t seed);

struct PairDiagnostic {
    double p0 = 0.0, p1 = 0.0;
    double difference = 0.0;  // q_est(p1) - q_est(p0)
    double combined_ci = 0.0;
    bool decreasing_beyond_ci = false;
    bool increasing_beyond_ci = false;
    bool in_window = false;
    std::optional<double> ratio;  // |dq| / |dp| when the sign is resolved
};

struct Diagnostics {
    std::vector<PairDiagnostic> pairs;
    /// Every adjacent difference is negative beyond its combined CI.
    bool strictly_decreasing = false;
    std::size_t violations = 0;
    double window_a = 0.0, window_b = 0.0;
    std::optional<double> c_hat;
    std::optional<double> C_hat;
    /// q_est <= bound(p) + ci at each point, when a bound is given.
    std::vector<double> bound_values;
    std::vector<bool> within_bound;
    bool all_within_bound = true;
    /// Descriptive only: counts of positive / negative second differences.
    std::size_t convex_steps = 0;
    std::size_t concave_steps = 0;
    std::optional<double> max_inverse_error;
    std::vector<std::string> findings;
};

using BoundFn = std::function<double(double p)>;

/// Needs >= 3 points. The interior window drops `trim` points from each end.
Diagnostics diagnostics(const std::vector<CurvePoint>& points, const BoundFn& bound = {},
                        const std::vector<InversePoint>* inverse = nullptr, std::size_t trim = 1);

/// `p,q_est,ci,n,replicas`
std::string curve_csv(const CriticalCurve& curve);

}  // namespace slabperc::curve
