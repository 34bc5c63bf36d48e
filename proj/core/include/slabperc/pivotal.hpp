#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slabperc/cluster.hpp"
#include "slabperc/estimators.hpp"
#include "slabperc/lattice.hpp"
#include "slabperc/sampler.hpp"

namespace slabperc::pivotal {

enum class ScanMode {
    /// Connection events only: closed edges are tested by a root lookup, open
    /// edges by rebuilding the forest without them, and only edges of a
    /// cluster that joins the two terminal sets are candidates.
    Pruned,
    /// Two forest rebuilds per edge; works for every monotone event.
    Full,
};

/// Reusable per-thread state for pivotal scans on one (box, event).
class PivotalScanner {
public:
    PivotalScanner(const LatticeBox& box, const EventSpec& spec);

    /// Edges e with the event true when e is forced open and false when e is
    /// forced closed, increasing. Independent of config's own bit for e.
    /// Pruned mode falls back to Full for events without terminal sets.
    void scan(const BondConfig& config, std::vector<EdgeId>& out, ScanMode mode = ScanMode::Pruned);

private:
    void scan_full(const BondConfig& config, std::vector<EdgeId>& out);
    void scan_pruned(const BondConfig& config, std::vector<EdgeId>& out);

    const LatticeBox* box_;
    CompiledEvent event_;
    ClusterForest forest_;
    ClusterForest probe_;
    BondConfig scratch_;
    std::vector<std::uint8_t> touches_;
};

std::vector<EdgeId> pivotal_set(const LatticeBox& box, const BondConfig& config, const EventSpec& spec,
                                ScanMode mode = ScanMode::Pruned);

struct RussoOptions {
    unsigned jobs = 1;
    /// Width of the intervals behind beta bounds and angles, in standard errors.
    double z = 4.0;
    bool per_edge = false;
    ScanMode mode = ScanMode::Pruned;
};

struct RussoEstimate {
    /// Mean pivotal count over radial (axial) edges: unbiased for the
    /// derivative of the event probability in p (q).
    double d_p = 0.0;
    double d_p_stderr = 0.0;
    double d_q = 0.0;
    double d_q_stderr = 0.0;
    /// beta_hat = d_q / d_p, defined when d_p - z * stderr > 0.
    std::optional<double> beta_hat;
    double beta_stderr = 0.0;
    double beta_lower = 0.0;
    double beta_upper = 0.0;
    /// tan(phi) = 1 / beta_upper: lower bound for d_p / d_q, so the event
    /// probability is non-decreasing along (cos phi, -sin phi).
    std::optional<double> phi;
    /// tan(psi) = 1 / beta_lower: upper bound for d_p / d_q, so it is
    /// non-decreasing along (-cos psi, sin psi).
    std::optional<double> psi;
    std::uint64_t replicas = 0;
    ParamPoint params;
    int k = 0;
    std::string event;
    std::uint64_t seed = 0;
    double z = 4.0;
    /// Fraction of replicas in which each edge was pivotal (per_edge only).
    std::vector<double> per_edge;
};

RussoEstimate russo_estimate(const LatticeBox& box, const ParamPoint& params, const EventSpec& spec,
                             std::uint64_t replicas, std::uint64_t master_seed, const RussoOptions& options = {});

/// Event indicators at two parameter points on shared uniforms.
struct CoupledDifference {
    ParamPoint from;
    ParamPoint to;
    Estimate at_from;
    Estimate at_to;
    /// Mean of 1{A at to} - 1{A at from} and its standard error.
    double difference = 0.0;
    double std_error = 0.0;
    /// Replicas where the indicator went up / down.
    std::uint64_t ups = 0;
    std::uint64_t downs = 0;
    std::uint64_t replicas = 0;
};

CoupledDifference coupled_difference(const LatticeBox& box, const ParamPoint& from, const ParamPoint& to,
                                     const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed,
                                     unsigned jobs = 1);

/// Compares (p, q) with (p + step cos(angle), q - step sin(angle)). Throws
/// InvalidArgument when an endpoint leaves [0,1]^2.
CoupledDifference directional_probe(const LatticeBox& box, const ParamPoint& params, double angle, double step,
                                    const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed,
                                    unsigned jobs = 1);

struct FiniteDifference {
    double value = 0.0;
    double std_error = 0.0;
    CoupledDifference raw;
};

/// Centered difference [P(p+h) - P(p-h)] / 2h (or in q) with common random numbers.
FiniteDifference finite_difference_p(const LatticeBox& box, const ParamPoint& params, double h,
                                     const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed,
                                     unsigned jobs = 1);
FiniteDifference finite_difference_q(const LatticeBox& box, const ParamPoint& params, double h,
                                     const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed,
                                     unsigned jobs = 1);

}  // namespace slabperc::pivotal
