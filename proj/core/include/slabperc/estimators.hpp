#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slabperc/cluster.hpp"
#include "slabperc/lattice.hpp"
#include "slabperc/sampler.hpp"

namespace slabperc {

/// Monte Carlo probability of a binary event.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;  // sqrt(mean (1 - mean) / replicas)
    std::uint64_t successes = 0;
    std::uint64_t replicas = 0;
    ParamPoint params;
    int k = 0;
    std::string event;
    std::uint64_t seed = 0;
};

Estimate make_estimate(std::uint64_t successes, std::uint64_t replicas);

/// Replica r samples with SeedSpec{master_seed, r}; the result does not
/// depend on `jobs`.
Estimate estimate_event(const LatticeBox& box, const ParamPoint& params, const EventSpec& spec,
                        std::uint64_t replicas, std::uint64_t master_seed, unsigned jobs = 1);

/// Survival function P(|C_0| >= n) on a grid, all bins from one replica set.
struct TailCurve {
    std::vector<std::uint64_t> n_grid;
    std::vector<double> survival;
    std::vector<std::uint64_t> survivors;
    std::uint64_t replicas = 0;
    /// Replicas whose origin cluster touched the box boundary (|C_0| truncated).
    std::uint64_t truncated = 0;
    ParamPoint params;
    int k = 0;
    int box_radius = 0;
    std::uint64_t seed = 0;

    double std_error(std::size_t i) const;
};

/// |C_0| is measured inside CenteredBox(box_radius); requires
/// box_radius >= max(n_grid) and a strictly increasing grid of positive n.
TailCurve tail_curve(const ParamPoint& params, int k, const std::vector<std::uint64_t>& n_grid, int box_radius,
                     std::uint64_t replicas, std::uint64_t master_seed, unsigned jobs = 1);

/// Wraps exact survival values, e.g. for testing the fit.
TailCurve make_tail(std::vector<std::uint64_t> n_grid, std::vector<double> survival, std::uint64_t replicas);

struct DecayFit {
    double slope = 0.0;  // -c per unit n
    double intercept = 0.0;
    double r_squared = 0.0;
    std::uint64_t n_lo = 0;
    std::uint64_t n_hi = 0;
    std::size_t points = 0;
};

/// Ordinary least squares of log survival against n over bins with at least
/// `min_survivors` survivors. Throws FitInfeasible with fewer than 3 bins.
DecayFit fit_decay(const TailCurve& tail, std::uint64_t min_survivors = 100);

/// Shortest round-trip decimal form.
std::string format_number(double value);

/// `p,q,k,event,n,mean,stderr,replicas,seed`
std::string estimate_csv_header();
std::string estimate_csv_row(const Estimate& e, std::uint64_t n);

}  // namespace slabperc
