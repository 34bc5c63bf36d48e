#include "slabperc/oracle.hpp"

#include <bit>
#include <cmath>

#include "slabperc/bounds.hpp"
#include "slabperc/error.hpp"

namespace slabperc::oracle {

namespace {

// x^a (1-x)^{n-a}
double bernoulli_weight(double x, unsigned a, unsigned n) {
    return std::pow(x, static_cast<double>(a)) * std::pow(1.0 - x, static_cast<double>(n - a));
}

// d/dx of x^a (1-x)^{n-a}
double bernoulli_weight_derivative(double x, unsigned a, unsigned n) {
    double out = 0.0;
    if (a > 0) out += a * std::pow(x, static_cast<double>(a - 1)) * std::pow(1.0 - x, static_cast<double>(n - a));
    if (a < n)
        out -= (n - a) * std::pow(x, static_cast<double>(a)) * std::pow(1.0 - x, static_cast<double>(n - a - 1));
    return out;
}

void check_cap(std::uint32_t edges, unsigned cap) {
    if (cap > 32) throw InvalidArgument("enumeration cap above 32 edges is not supported");
    if (edges > cap)
        throw ResourceLimit("exhaustive enumeration over " + std::to_string(edges) + " edges exceeds the cap of " +
                            std::to_string(cap));
}

}  // namespace

CountPolynomial::CountPolynomial(unsigned radial, unsigned axial)
    : radial_(radial), axial_(axial), counts_((radial + 1) * (axial + 1), 0) {}

std::uint64_t CountPolynomial::total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

double CountPolynomial::value(const ParamPoint& params) const {
    double sum = 0.0;
    for (unsigned a = 0; a <= radial_; ++a)
        for (unsigned b = 0; b <= axial_; ++b)
            if (const auto c = at(a, b))
                sum += static_cast<double>(c) * bernoulli_weight(params.p, a, radial_) *
                       bernoulli_weight(params.q, b, axial_);
    return sum;
}

double CountPolynomial::d_dp(const ParamPoint& params) const {
    double sum = 0.0;
    for (unsigned a = 0; a <= radial_; ++a)
        for (unsigned b = 0; b <= axial_; ++b)
            if (const auto c = at(a, b))
                sum += static_cast<double>(c) * bernoulli_weight_derivative(params.p, a, radial_) *
                       bernoulli_weight(params.q, b, axial_);
    return sum;
}

double CountPolynomial::d_dq(const ParamPoint& params) const {
    double sum = 0.0;
    for (unsigned a = 0; a <= radial_; ++a)
        for (unsigned b = 0; b <= axial_; ++b)
            if (const auto c = at(a, b))
                sum += static_cast<double>(c) * bernoulli_weight(params.p, a, radial_) *
                       bernoulli_weight_derivative(params.q, b, axial_);
    return sum;
}

EventTable::EventTable(const LatticeBox& box, const EventSpec& spec, unsigned cap)
    : edges_(box.edge_count()), radial_(box.radial_count()) {
    check_cap(edges_, cap);
    const CompiledEvent compiled(box, spec);
    const std::uint64_t states = std::uint64_t{1} << edges_;
    bits_.assign((states + 63) / 64, 0);
    BondConfig config(edges_);
    ClusterForest forest;
    for (std::uint64_t c = 0; c < states; ++c) {
        config.words()[0] = c;
        forest.build(box, config);
        if (compiled(forest)) bits_[c >> 6] |= std::uint64_t{1} << (c & 63);
    }
}

CountPolynomial EventTable::polynomial() const {
    CountPolynomial poly(radial_, edges_ - radial_);
    const std::uint64_t states = std::uint64_t{1} << edges_;
    const std::uint64_t radial_mask = (std::uint64_t{1} << radial_) - 1;
    for (std::uint64_t c = 0; c < states; ++c)
        if (holds(c))
            ++poly.at(static_cast<unsigned>(std::popcount(c & radial_mask)),
                      static_cast<unsigned>(std::popcount(c & ~radial_mask)));
    return poly;
}

ExactResult exact_probability(const LatticeBox& box, const ParamPoint& params, const EventSpec& spec, unsigned cap) {
    validate(params);
    const EventTable table(box, spec, cap);
    const CountPolynomial poly = table.polynomial();
    ExactResult r;
    r.value = poly.value(params);
    r.edge_count = box.edge_count();
    r.enumeration_size = std::uint64_t{1} << box.edge_count();
    r.satisfying = poly.total();
    return r;
}

double ExactRusso::discrepancy() const { return std::max(std::abs(d_p - d_p_poly), std::abs(d_q - d_q_poly)); }

ExactRusso exact_russo(const LatticeBox& box, const ParamPoint& params, const EventSpec& spec, unsigned cap) {
    validate(params);
    const EventTable table(box, spec, cap);
    const CountPolynomial poly = table.polynomial();
    ExactRusso out;
    out.d_p_poly = poly.d_dp(params);
    out.d_q_poly = poly.d_dq(params);

    const std::uint32_t edges = table.edge_count();
    const std::uint32_t radial = table.radial_count();
    const std::uint64_t states = std::uint64_t{1} << edges;
    const std::uint64_t radial_mask = (std::uint64_t{1} << radial) - 1;
    out.pivotal_probability.assign(edges, 0.0);
    for (std::uint32_t e = 0; e < edges; ++e) {
        const bool is_radial = e < radial;
        // Counts over the other edges only; edge e is closed in c.
        CountPolynomial pivots(is_radial ? radial - 1 : radial, is_radial ? edges - radial : edges - radial - 1);
        const std::uint64_t bit = std::uint64_t{1} << e;
        for (std::uint64_t c = 0; c < states; ++c) {
            if (c & bit) continue;
            if (!table.holds(c | bit) || table.holds(c)) continue;
            ++pivots.at(static_cast<unsigned>(std::popcount(c & radial_mask)),
                        static_cast<unsigned>(std::popcount(c & ~radial_mask)));
        }
        const double prob = pivots.value(params);
        out.pivotal_probability[e] = prob;
        (is_radial ? out.d_p : out.d_q) += prob;
    }
    return out;
}

double gadget_exact(double p, double q, int k) {
    if (k < 0 || k > kMaxGadgetK)
        throw ResourceLimit("gadget enumeration supports 0 <= k <= " + std::to_string(kMaxGadgetK));
    validate(ParamPoint{p, q});
    const double qh = bounds::q_hat(q);
    // Bit layout: h_0..h_k, then r_0..r_{k-1}, then l_0..l_{k-1}.
    const unsigned bonds = static_cast<unsigned>(3 * k + 1);
    const unsigned h_count = static_cast<unsigned>(k + 1);
    double total = 0.0;
    for (std::uint32_t c = 0; c < (1u << bonds); ++c) {
        bool open = false;
        for (int i = 0; i <= k && !open; ++i) {
            if (!((c >> i) & 1u)) continue;
            bool path = true;
            for (int j = 0; j < i && path; ++j) {
                const bool r = (c >> (h_count + static_cast<unsigned>(j))) & 1u;
                const bool l = (c >> (h_count + static_cast<unsigned>(k + j))) & 1u;
                path = r && l;
            }
            open = path;
        }
        if (!open) continue;
        const auto h_open = static_cast<unsigned>(std::popcount(c & ((1u << h_count) - 1)));
        const auto v_open = static_cast<unsigned>(std::popcount(c >> h_count));
        total += bernoulli_weight(p, h_open, h_count) * bernoulli_weight(qh, v_open, bonds - h_count);
    }
    return total;
}

}  // namespace slabperc::oracle
