#pragma once

#include <cstdint>
#include <vector>

#include "slabperc/cluster.hpp"
#include "slabperc/lattice.hpp"
#include "slabperc/sampler.hpp"

namespace slabperc::oracle {

inline constexpr unsigned kDefaultEdgeCap = 24;

/// Satisfying configurations of an event counted by (open radial, open axial).
/// P_{p,q}(A) = sum_{a,b} count(a,b) p^a (1-p)^{R-a} q^b (1-q)^{V-b}.
class CountPolynomial {
public:
    CountPolynomial(unsigned radial, unsigned axial);

    unsigned radial() const { return radial_; }
    unsigned axial() const { return axial_; }
    std::uint64_t& at(unsigned a, unsigned b) { return counts_[a * (axial_ + 1) + b]; }
    std::uint64_t at(unsigned a, unsigned b) const { return counts_[a * (axial_ + 1) + b]; }
    std::uint64_t total() const;

    double value(const ParamPoint& params) const;
    /// Exact partial derivatives of value().
    double d_dp(const ParamPoint& params) const;
    double d_dq(const ParamPoint& params) const;

private:
    unsigned radial_;
    unsigned axial_;
    std::vector<std::uint64_t> counts_;
};

/// Indicator of the event for every configuration index c (bit e of c = state of edge e).
class EventTable {
public:
    EventTable(const LatticeBox& box, const EventSpec& spec, unsigned cap = kDefaultEdgeCap);

    std::uint32_t edge_count() const { return edges_; }
    std::uint32_t radial_count() const { return radial_; }
    bool holds(std::uint64_t config) const { return (bits_[config >> 6] >> (config & 63)) & 1u; }
    CountPolynomial polynomial() const;

private:
    std::uint32_t edges_;
    std::uint32_t radial_;
    std::vector<std::uint64_t> bits_;
};

struct ExactResult {
    double value = 0.0;
    std::uint32_t edge_count = 0;
    std::uint64_t enumeration_size = 0;
    /// Number of satisfying configurations; value at p = q = 1/2 is this over 2^edge_count.
    std::uint64_t satisfying = 0;
};

/// Literal sum over all 2^edge_count configurations. Throws ResourceLimit
/// when edge_count exceeds `cap`.
ExactResult exact_probability(const LatticeBox& box, const ParamPoint& params, const EventSpec& spec,
                              unsigned cap = kDefaultEdgeCap);

struct ExactRusso {
    /// Sum over radial (axial) edges of P(e is pivotal).
    double d_p = 0.0;
    double d_q = 0.0;
    /// Derivatives of the exact probability polynomial.
    double d_p_poly = 0.0;
    double d_q_poly = 0.0;
    /// P(e is pivotal) per edge index.
    std::vector<double> pivotal_probability;

    double discrepancy() const;
};

ExactRusso exact_russo(const LatticeBox& box, const ParamPoint& params, const EventSpec& spec,
                       unsigned cap = kDefaultEdgeCap);

inline constexpr int kMaxGadgetK = 6;

/// Enumerates the 3k+1 bonds of one four-copy gadget edge: level horizontals
/// h_0..h_k (probability p), r-copies and l-copies of the axial bonds at the
/// two ends (probability q_hat each). Returns P(some path c^i is open), where
/// c^i uses r_0..r_{i-1}, h_i and l_0..l_{i-1}.
double gadget_exact(double p, double q, int k);

}  // namespace slabperc::oracle
