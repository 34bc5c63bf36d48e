#include "slabperc/pivotal.hpp"

#include <cmath>

#include "slabperc/error.hpp"
#include "slabperc/parallel.hpp"

namespace slabperc::pivotal {

PivotalScanner::PivotalScanner(const LatticeBox& box, const EventSpec& spec) : box_(&box), event_(box, spec) {}

void PivotalScanner::scan(const BondConfig& config, std::vector<EdgeId>& out, ScanMode mode) {
    if (config.size() != box_->edge_count())
        throw InvalidArgument("configuration length does not match the box edge count");
    out.clear();
    if (mode == ScanMode::Full || !event_.terminals())
        scan_full(config, out);
    else
        scan_pruned(config, out);
}

void PivotalScanner::scan_full(const BondConfig& config, std::vector<EdgeId>& out) {
    scratch_ = config;
    for (EdgeId e = 0; e < box_->edge_count(); ++e) {
        const bool original = scratch_.test(e);
        scratch_.set(e, true);
        probe_.build(*box_, scratch_);
        const bool up = event_(probe_);
        bool down = false;
        if (up) {
            scratch_.set(e, false);
            probe_.build(*box_, scratch_);
            down = event_(probe_);
        }
        scratch_.set(e, original);
        if (up && !down) out.push_back(e);
    }
}

void PivotalScanner::scan_pruned(const BondConfig& config, std::vector<EdgeId>& out) {
    const auto& terminals = *event_.terminals();
    forest_.build(*box_, config);
    touches_.assign(box_->vertex_count(), 0);
    for (VertexId v : terminals.sources) touches_[forest_.find(v)] |= 1;
    for (VertexId v : terminals.targets) touches_[forest_.find(v)] |= 2;

    std::uint32_t linking = 0;
    VertexId link_root = 0;
    for (VertexId v : terminals.sources) {
        const VertexId r = forest_.find(v);
        if (touches_[r] == 3) {
            touches_[r] |= 4;  // count each root once
            ++linking;
            link_root = r;
        }
    }

    if (linking == 0) {
        // Event fails: only a closed edge joining a source cluster to a target cluster can switch it on.
        for (EdgeId e = 0; e < box_->edge_count(); ++e) {
            if (config.test(e)) continue;
            const auto [a, b] = box_->endpoints(e);
            const VertexId ra = forest_.find(a);
            const VertexId rb = forest_.find(b);
            if (ra == rb) continue;
            if (((touches_[ra] & 1) && (touches_[rb] & 2)) || ((touches_[ra] & 2) && (touches_[rb] & 1)))
                out.push_back(e);
        }
        return;
    }
    // Removing one edge cannot break two separate linking clusters.
    if (linking > 1) return;

    for (EdgeId e = 0; e < box_->edge_count(); ++e) {
        if (!config.test(e)) continue;
        const auto [a, b] = box_->endpoints(e);
        if (forest_.find(a) != link_root) continue;
        probe_.build_without(*box_, config, e);
        if (!event_(probe_)) out.push_back(e);
    }
}

std::vector<EdgeId> pivotal_set(const LatticeBox& box, const BondConfig& config, const EventSpec& spec,
                                ScanMode mode) {
    PivotalScanner scanner(box, spec);
    std::vector<EdgeId> out;
    scanner.scan(config, out, mode);
    return out;
}

RussoEstimate russo_estimate(const LatticeBox& box, const ParamPoint& params, const EventSpec& spec,
                             std::uint64_t replicas, std::uint64_t master_seed, const RussoOptions& options) {
    validate(params);
    if (replicas < 1) throw InvalidArgument("replicas must be >= 1");
    const PivotalScanner prototype(box, spec);

    struct Work {
        PivotalScanner scanner;
        BondConfig config;
        std::vector<EdgeId> pivots;
        std::uint64_t sp = 0, sp2 = 0, sq = 0, sq2 = 0, spq = 0;
        std::vector<std::uint64_t> per_edge;
    };
    auto states = parallel_chunks(
        replicas, options.jobs,
        [&] {
            return Work{prototype, BondConfig(box.edge_count()), {}, 0, 0, 0, 0, 0,
                        std::vector<std::uint64_t>(options.per_edge ? box.edge_count() : 0)};
        },
        [&](Work& w, std::uint64_t r) {
            sample_into(w.config, box, params, SeedSpec{master_seed, r});
            w.scanner.scan(w.config, w.pivots, options.mode);
            std::uint64_t cp = 0, cq = 0;
            for (EdgeId e : w.pivots) {
                (box.edge_class(e) == EdgeClass::Radial ? cp : cq) += 1;
                if (options.per_edge) ++w.per_edge[e];
            }
            w.sp += cp;
            w.sp2 += cp * cp;
            w.sq += cq;
            w.sq2 += cq * cq;
            w.spq += cp * cq;
        });

    std::uint64_t sp = 0, sp2 = 0, sq = 0, sq2 = 0, spq = 0;
    std::vector<std::uint64_t> per_edge(options.per_edge ? box.edge_count() : 0);
    for (const auto& s : states) {
        sp += s.sp;
        sp2 += s.sp2;
        sq += s.sq;
        sq2 += s.sq2;
        spq += s.spq;
        for (std::size_t e = 0; e < per_edge.size(); ++e) per_edge[e] += s.per_edge[e];
    }

    const double n = static_cast<double>(replicas);
    RussoEstimate out;
    out.replicas = replicas;
    out.params = params;
    out.k = box.k();
    out.event = describe(spec);
    out.seed = master_seed;
    out.z = options.z;
    out.d_p = static_cast<double>(sp) / n;
    out.d_q = static_cast<double>(sq) / n;
    const double var_p = std::max(0.0, static_cast<double>(sp2) / n - out.d_p * out.d_p);
    const double var_q = std::max(0.0, static_cast<double>(sq2) / n - out.d_q * out.d_q);
    const double cov = static_cast<double>(spq) / n - out.d_p * out.d_q;
    out.d_p_stderr = std::sqrt(var_p / n);
    out.d_q_stderr = std::sqrt(var_q / n);
    for (auto c : per_edge) out.per_edge.push_back(static_cast<double>(c) / n);

    if (out.d_p - options.z * out.d_p_stderr > 0.0) {
        const double beta = out.d_q / out.d_p;
        const double var_beta = std::max(0.0, (var_q + beta * beta * var_p - 2.0 * beta * cov) / (out.d_p * out.d_p * n));
        out.beta_hat = beta;
        out.beta_stderr = std::sqrt(var_beta);
        out.beta_lower = beta - options.z * out.beta_stderr;
        out.beta_upper = beta + options.z * out.beta_stderr;
        if (out.beta_upper > 0.0) out.phi = std::atan(1.0 / out.beta_upper);
        if (out.beta_lower > 0.0) out.psi = std::atan(1.0 / out.beta_lower);
    }
    return out;
}

CoupledDifference coupled_difference(const LatticeBox& box, const ParamPoint& from, const ParamPoint& to,
                                     const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed,
                                     unsigned jobs) {
    validate(from);
    validate(to);
    if (replicas < 1) throw InvalidArgument("replicas must be >= 1");
    const CompiledEvent compiled(box, spec);

    struct Work {
        BondConfig config;
        ClusterForest forest;
        CompiledEvent event;
        std::uint64_t hits_from = 0, hits_to = 0, ups = 0, downs = 0;
    };
    auto states = parallel_chunks(
        replicas, jobs, [&] { return Work{BondConfig(box.edge_count()), ClusterForest{}, compiled}; },
        [&](Work& w, std::uint64_t r) {
            const SeedSpec seed{master_seed, r};
            sample_into(w.config, box, from, seed);
            w.forest.build(box, w.config);
            const bool a = w.event(w.forest);
            sample_into(w.config, box, to, seed);
            w.forest.build(box, w.config);
            const bool b = w.event(w.forest);
            w.hits_from += a;
            w.hits_to += b;
            w.ups += (b && !a);
            w.downs += (a && !b);
        });

    CoupledDifference out;
    out.from = from;
    out.to = to;
    out.replicas = replicas;
    std::uint64_t hf = 0, ht = 0;
    for (const auto& s : states) {
        hf += s.hits_from;
        ht += s.hits_to;
        out.ups += s.ups;
        out.downs += s.downs;
    }
    auto finish = [&](std::uint64_t hits, const ParamPoint& at) {
        Estimate e = make_estimate(hits, replicas);
        e.params = at;
        e.k = box.k();
        e.event = describe(spec);
        e.seed = master_seed;
        return e;
    };
    out.at_from = finish(hf, from);
    out.at_to = finish(ht, to);
    const double n = static_cast<double>(replicas);
    out.difference = (static_cast<double>(out.ups) - static_cast<double>(out.downs)) / n;
    const double second = static_cast<double>(out.ups + out.downs) / n;
    out.std_error = std::sqrt(std::max(0.0, second - out.difference * out.difference) / n);
    return out;
}

CoupledDifference directional_probe(const LatticeBox& box, const ParamPoint& params, double angle, double step,
                                    const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed,
                                    unsigned jobs) {
    const ParamPoint to{params.p + step * std::cos(angle), params.q - step * std::sin(angle)};
    auto inside = [](const ParamPoint& x) { return x.p >= 0.0 && x.p <= 1.0 && x.q >= 0.0 && x.q <= 1.0; };
    if (!inside(params) || !inside(to))
        throw InvalidArgument("directional probe endpoint (" + format_number(to.p) + ", " + format_number(to.q) +
                              ") lies outside [0,1]^2");
    return coupled_difference(box, params, to, spec, replicas, master_seed, jobs);
}

namespace {

FiniteDifference centered(const LatticeBox& box, const ParamPoint& lo, const ParamPoint& hi, double h,
                          const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed, unsigned jobs) {
    if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
    FiniteDifference fd;
    fd.raw = coupled_difference(box, lo, hi, spec, replicas, master_seed, jobs);
    fd.value = fd.raw.difference / (2.0 * h);
    fd.std_error = fd.raw.std_error / (2.0 * h);
    return fd;
}

}  // namespace

FiniteDifference finite_difference_p(const LatticeBox& box, const ParamPoint& params, double h,
                                     const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed,
                                     unsigned jobs) {
    return centered(box, {params.p - h, params.q}, {params.p + h, params.q}, h, spec, replicas, master_seed, jobs);
}

FiniteDifference finite_difference_q(const LatticeBox& box, const ParamPoint& params, double h,
                                     const EventSpec& spec, std::uint64_t replicas, std::uint64_t master_seed,
                                     unsigned jobs) {
    return centered(box, {params.p, params.q - h}, {params.p, params.q + h}, h, spec, replicas, master_seed, jobs);
}

}  // namespace slabperc::pivotal
