#pragma once

#include <cstdint>
#include <vector>

#include "slabperc/bounds.hpp"
#include "slabperc/cluster.hpp"
#include "slabperc/estimators.hpp"
#include "slabperc/lattice.hpp"
#include "slabperc/sampler.hpp"

namespace slabperc::renorm {

/// Blocks S_{v,m} for v in {0..window-1}^2.
struct BlockSpec {
    int m = 1;
    int window = 1;
};

/// Smallest box holding every block of the window plus a margin of m on each
/// lateral side: [1-m, m(window+1)]^2 x {0..k}.
LatticeBox ambient_box(int k, const BlockSpec& blocks);

/// Block index containing lateral coordinate x: floor((x - 1) / m).
int block_of(int x, int m);

/// (k+1)(4m+1)^2: clusters at least this large force their block open.
std::uint64_t tail_threshold(int k, int m);

/// P(C_m(S_m)) on ambient_box(k, {m, 1}).
Estimate block_probability(const ParamPoint& params, int m, int k, std::uint64_t replicas, std::uint64_t seed,
                           unsigned jobs = 1);

struct Lemma1Report {
    ParamPoint params;
    int k = 0;
    int m = 1;
    bounds::Lemma1Budget budget;
    /// Axial edges forced closed: those of the lateral window [1-m, 2m]^2.
    std::uint64_t closed_axial = 0;
    /// P(C_m(S_m) | Q(S_m)) from runs with those axial bonds closed.
    Estimate conditioned;
    /// (i) P(C_m(S_m) and Q(S_m)) = conditioned * (1-q)^N.
    double joint = 0.0;
    double joint_stderr = 0.0;
    /// P(C_m(S^0_m)) on the single plane, same seeds.
    Estimate single_layer;
    /// (ii) (k+1) * single_layer.
    double union_bound = 0.0;
    double union_bound_stderr = 0.0;
    /// (i) <= (ii) + 4 sqrt(var_i + var_ii).
    bool holds = false;
    /// ((i) - (ii)) / combined stderr; negative means slack.
    double excess_sigmas = 0.0;
    /// Unconditioned P(C_m(S_m)) and the epsilon it is compared against.
    Estimate block;
    double epsilon = 0.05;
    bool block_below_epsilon = false;
    std::uint64_t seed = 0;
};

Lemma1Report lemma1_inequality_report(const ParamPoint& params, int m, int k, std::uint64_t replicas,
                                      std::uint64_t seed, double epsilon = 0.05, unsigned jobs = 1);

/// Open/closed state of each block, row-major over the window (index vy * window + vx).
struct SiteField {
    int window = 0;
    std::vector<std::uint8_t> open;

    bool at(int vx, int vy) const { return open[static_cast<std::size_t>(vy * window + vx)] != 0; }
    std::size_t open_count() const;
};

/// Evaluates f_v for every block of one sampled configuration.
class BlockFieldEvaluator {
public:
    BlockFieldEvaluator(int k, const BlockSpec& blocks);

    const LatticeBox& box() const { return box_; }
    const BlockSpec& blocks() const { return blocks_; }
    /// Field of the given configuration on box().
    void evaluate(const BondConfig& config, SiteField& out);

private:
    BlockSpec blocks_;
    LatticeBox box_;
    std::vector<CompiledEvent> events_;
    ClusterForest forest_;
};

struct DistanceCorrelation {
    int distance = 0;
    std::uint64_t pairs_per_sample = 0;
    double covariance = 0.0;
    double covariance_stderr = 0.0;
    double correlation = 0.0;
    double correlation_stderr = 0.0;
};

struct RenormSummary {
    ParamPoint params;
    int k = 0;
    BlockSpec blocks;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double density = 0.0;
    double density_stderr = 0.0;
    /// Renormalized L-infinity distances 1..max_distance.
    std::vector<DistanceCorrelation> correlations;
};

/// One configuration on ambient_box(k, blocks) and its site field.
SiteField renormalized_sample(const ParamPoint& params, int k, const BlockSpec& blocks, const SeedSpec& seed);

/// Open-site density and pair correlation by block distance over `samples`
/// independent fields. Standard errors come from the delta method over
/// samples.
RenormSummary renormalized_statistics(const ParamPoint& params, int k, const BlockSpec& blocks,
                                      std::uint64_t samples, std::uint64_t seed, int max_distance = 6,
                                      unsigned jobs = 1);

/// Edges with an endpoint within lateral max-norm distance m - 1 of S_{v,m};
/// f_v is a function of these edges alone. Sorted.
std::vector<EdgeId> dependency_edges(const LatticeBox& box, int vx, int vy, int m);

struct IndependenceCheck {
    int min_distance = 5;
    std::uint64_t pairs_checked = 0;
    std::uint64_t overlapping_pairs = 0;
    /// Smallest d such that every pair at distance >= d is disjoint.
    int disjoint_from = 0;
    bool passed() const { return overlapping_pairs == 0; }
};

/// Deterministic check that dependency sets of blocks at renormalized
/// distance >= min_distance are disjoint.
IndependenceCheck check_block_independence(int k, const BlockSpec& blocks, int min_distance = 5);

}  // namespace slabperc::renorm
