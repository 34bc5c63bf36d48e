#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "slabperc/bounds.hpp"
#include "slabperc/cluster.hpp"
#include "slabperc/curve.hpp"
#include "slabperc/error.hpp"
#include "slabperc/estimators.hpp"
#include "slabperc/lattice.hpp"
#include "slabperc/oracle.hpp"
#include "slabperc/pivotal.hpp"
#include "slabperc/renorm.hpp"
#include "slabperc/sampler.hpp"

namespace slabperc::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// Raised by a verify subcommand whose check failed; the report is still written.
struct VerifyFailed {};

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json estimate_json(const Estimate& e) {
    return Json{{"p", e.params.p},   {"q", e.params.q},         {"k", e.k},
                {"event", e.event},  {"mean", e.mean},          {"stderr", e.std_error},
                {"successes", e.successes}, {"replicas", e.replicas}, {"seed", e.seed}};
}

// "# slabperc theta k=1 n=3 ..." from the config echo.
std::string csv_echo(const std::string& command, const Json& config) {
    std::string line = "# slabperc " + command;
    for (const auto& [key, value] : config.items()) {
        line += " " + key + "=";
        if (value.is_string())
            line += value.get<std::string>();
        else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + v.dump();
            line += joined;
        } else
            line += value.dump();
    }
    return line + "\n";
}

Json envelope(const std::string& command, const Json& config) {
    return Json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", config}};
}

EventSpec event_flag(const std::string& text) {
    try {
        return parse_event(text);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("--event: ") + e.what());
    }
}

BoxShape shape_flag(const std::string& text) {
    try {
        return parse_shape(text);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("--shape: ") + e.what());
    }
}

std::string default_shape(int n) { return "centered:" + std::to_string(n); }

// Options shared by the commands that work on one box and one event.
struct BoxOptions {
    int k = 0;
    int n = 1;
    std::string shape;
    std::string event;

    LatticeBox box() const { return build_box({k}, shape_flag(shape.empty() ? default_shape(n) : shape)); }
    std::string shape_text() const { return shape.empty() ? default_shape(n) : shape; }
    // Rectangles have no origin ball: default to corner-to-corner through the slab.
    std::string event_text(const LatticeBox& b) const {
        if (!event.empty()) return event;
        if (b.is_centered()) return "origin-boundary:" + std::to_string(b.radius());
        return describe(event::Connected{{b.xmin(), b.ymin(), 0}, {b.xmax(), b.ymax(), b.k()}});
    }
};

void add_k(CLI::App* app, int& k) { app->add_option("--k", k, "Slab thickness (k+1 layers)")->required()->check(CLI::NonNegativeNumber); }
void add_param(CLI::App* app, const char* name, double& v, const char* what, bool required = true) {
    auto* opt = app->add_option(name, v, what)->check(CLI::Range(0.0, 1.0));
    if (required) opt->required();
    else opt->capture_default_str();
}
void add_seed(CLI::App* app, std::uint64_t& seed) { app->add_option("--seed", seed, "Master seed")->capture_default_str(); }
void add_replicas(CLI::App* app, std::uint64_t& replicas) {
    app->add_option("--replicas", replicas, "Monte Carlo replicas")->capture_default_str()->check(CLI::PositiveNumber);
}
void add_box(CLI::App* app, BoxOptions& b, bool event) {
    add_k(app, b.k);
    app->add_option("--n", b.n, "Box radius for the default centered:n shape")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--shape", b.shape, "centered:n, rect:x0,x1,y0,y1 or rect2");
    if (event)
        app->add_option("--event", b.event,
                        "origin-boundary:n, connected:x,y,z:x,y,z, size:x,y,z:s, lr-crossing or block:vx,vy,m "
                        "(default origin-boundary:n)");
}

Json box_config(const BoxOptions& b, bool event) {
    Json c{{"k", b.k}, {"shape", b.shape_text()}};
    if (event) c["event"] = b.event_text(b.box());
    return c;
}

// ---------------------------------------------------------------- bounds

struct BoundsCmd {
    int k = 0;
    std::optional<double> p;
    std::optional<double> q;
    double tol = 1e-13;

    void attach(CLI::App* app) {
        add_k(app, k);
        app->add_option("--p", p, "Radial parameter")->check(CLI::Range(0.0, 1.0));
        app->add_option("--q", q, "Axial parameter")->check(CLI::Range(0.0, 1.0));
        app->add_option("--tol", tol, "Tolerance on |p_bar - 1/2| for q*")->capture_default_str()->check(CLI::PositiveNumber);
    }

    Json run() const {
        Json config{{"k", k}, {"p", optional_number(p)}, {"q", optional_number(q)}, {"tol", tol}};
        Json out = envelope("bounds", config);
        const bounds::BoundsReport r = bounds::bounds_report(k, p, q);
        out["k"] = r.k;
        out["p_k"] = r.p_k;
        out["s"] = optional_number(r.s);
        out["q_hat"] = optional_number(r.q_hat);
        out["p_bar"] = optional_number(r.p_bar);
        if (p) {
            const bounds::QStar s = bounds::lemma2_qstar(*p, k, tol);
            out["q_star"] = Json{{"q", s.q}, {"q_hat", s.q_hat}, {"p_bar", s.p_bar}, {"status", bounds::to_string(s.status)}};
        } else {
            out["q_star"] = nullptr;
        }
        return out;
    }
};

// ---------------------------------------------------------------- theta

struct ThetaCmd {
    int k = 0;
    std::vector<int> n;
    double p = 0, q = 0;
    std::uint64_t replicas = 10000;
    std::uint64_t seed = 1;
    std::string shape;
    std::string event;
    std::string format = "csv";

    void attach(CLI::App* app) {
        add_k(app, k);
        app->add_option("--n", n, "Radii n of A_n, comma separated")->required()->delimiter(',')->check(CLI::PositiveNumber);
        add_param(app, "--p", p, "Radial parameter");
        add_param(app, "--q", q, "Axial parameter (default 0)", false);
        add_replicas(app, replicas);
        add_seed(app, seed);
        app->add_option("--shape", shape, "Box shape (default centered:max(n))");
        app->add_option("--event", event, "Estimate this event instead of A_n");
        app->add_option("--format", format, "Output format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    }

    std::string run(unsigned jobs) const {
        int radius = 0;
        for (int v : n) radius = std::max(radius, v);
        const std::string shape_text = shape.empty() ? default_shape(radius) : shape;
        const LatticeBox box = build_box({k}, shape_flag(shape_text));
        Json config{{"k", k}, {"n", n}, {"p", p}, {"q", q}, {"replicas", replicas}, {"seed", seed}, {"shape", shape_text}};
        if (!event.empty()) config["event"] = event;

        std::vector<std::pair<int, Estimate>> rows;
        if (!event.empty()) {
            rows.emplace_back(box.is_centered() ? box.radius() : 0,
                              estimate_event(box, {p, q}, event_flag(event), replicas, seed, jobs));
        } else {
            for (int v : n) rows.emplace_back(v, estimate_event(box, {p, q}, event::OriginToBoundary{v}, replicas, seed, jobs));
        }

        if (format == "json") {
            Json out = envelope("theta", config);
            Json list = Json::array();
            for (const auto& [radius_n, e] : rows) {
                Json j = estimate_json(e);
                j["n"] = radius_n;
                list.push_back(j);
            }
            out["estimates"] = list;
            return out.dump(2) + "\n";
        }
        std::string text = csv_echo("theta", config) + estimate_csv_header() + "\n";
        for (const auto& [radius_n, e] : rows) text += estimate_csv_row(e, static_cast<std::uint64_t>(radius_n)) + "\n";
        return text;
    }
};

// ---------------------------------------------------------------- tail

struct TailCmd {
    int k = 0;
    double p = 0, q = 0;
    std::vector<std::uint64_t> grid;
    int radius = 0;
    std::uint64_t replicas = 100000;
    std::uint64_t seed = 1;
    std::uint64_t min_survivors = 100;
    std::string format = "json";

    void attach(CLI::App* app) {
        add_k(app, k);
        add_param(app, "--p", p, "Radial parameter");
        add_param(app, "--q", q, "Axial parameter (default 0)", false);
        app->add_option("--grid", grid, "Cluster sizes n, comma separated and increasing")->required()->delimiter(',');
        app->add_option("--radius", radius, "Box radius (default max grid value)")->check(CLI::PositiveNumber);
        add_replicas(app, replicas);
        add_seed(app, seed);
        app->add_option("--min-survivors", min_survivors, "Bins with fewer survivors are left out of the fit")
            ->capture_default_str();
        app->add_option("--format", format, "Output format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    }

    std::string run(unsigned jobs) const {
        if (grid.empty()) throw InvalidArgument("--grid: empty");
        const std::uint64_t top = *std::max_element(grid.begin(), grid.end());
        int r = radius;
        if (r == 0) {
            if (top > 100000) throw InvalidArgument("--grid: values above 100000 need an explicit --radius");
            r = static_cast<int>(top);
        }
        Json config{{"k", k}, {"p", p}, {"q", q}, {"grid", grid}, {"radius", r},
                    {"replicas", replicas}, {"seed", seed}, {"min_survivors", min_survivors}};
        TailCurve tail;
        try {
            tail = tail_curve({p, q}, k, grid, r, replicas, seed, jobs);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(std::string("--grid/--radius: ") + e.what());
        }
        Json fit = nullptr;
        std::string fit_error;
        try {
            const DecayFit f = fit_decay(tail, min_survivors);
            fit = Json{{"slope", f.slope},     {"decay_rate", -f.slope}, {"intercept", f.intercept},
                       {"r_squared", f.r_squared}, {"n_lo", f.n_lo},     {"n_hi", f.n_hi},
                       {"points", f.points}};
        } catch (const FitInfeasible& e) {
            fit_error = e.what();
        }

        if (format == "json") {
            Json out = envelope("tail", config);
            Json rows = Json::array();
            for (std::size_t i = 0; i < tail.n_grid.size(); ++i)
                rows.push_back(Json{{"n", tail.n_grid[i]},
                                    {"survival", tail.survival[i]},
                                    {"stderr", tail.std_error(i)},
                                    {"survivors", tail.survivors[i]}});
            out["survival"] = rows;
            out["truncated"] = tail.truncated;
            out["fit"] = fit;
            if (!fit_error.empty()) out["fit_error"] = fit_error;
            return out.dump(2) + "\n";
        }
        std::string text = csv_echo("tail", config) + "n,survival,stderr,survivors,replicas,seed\n";
        for (std::size_t i = 0; i < tail.n_grid.size(); ++i)
            text += std::to_string(tail.n_grid[i]) + "," + format_number(tail.survival[i]) + "," +
                    format_number(tail.std_error(i)) + "," + std::to_string(tail.survivors[i]) + "," +
                    std::to_string(replicas) + "," + std::to_string(seed) + "\n";
        text += "# truncated=" + std::to_string(tail.truncated) + "\n";
        if (fit.is_null())
            text += "# fit unavailable: " + fit_error + "\n";
        else
            text += "# fit slope=" + format_number(fit["slope"].get<double>()) +
                    " r_squared=" + format_number(fit["r_squared"].get<double>()) + "\n";
        return text;
    }
};

// ---------------------------------------------------------------- russo

struct RussoCmd {
    BoxOptions box;
    double p = 0, q = 0;
    std::uint64_t replicas = 10000;
    std::uint64_t seed = 1;
    double z = 4.0;
    std::string mode = "pruned";
    bool per_edge = false;

    void attach(CLI::App* app) {
        add_box(app, box, true);
        add_param(app, "--p", p, "Radial parameter");
        add_param(app, "--q", q, "Axial parameter (default 0)", false);
        add_replicas(app, replicas);
        add_seed(app, seed);
        app->add_option("--z", z, "Interval width in standard errors for beta bounds and angles")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        app->add_option("--mode", mode, "Pivotal scan")->capture_default_str()->check(CLI::IsMember({"pruned", "full"}));
        app->add_flag("--per-edge", per_edge, "Emit CSV rows with the pivotal fraction of every edge");
    }

    std::string run(unsigned jobs) const {
        const LatticeBox b = box.box();
        const EventSpec spec = event_flag(box.event_text(b));
        Json config = box_config(box, true);
        config["p"] = p;
        config["q"] = q;
        config["replicas"] = replicas;
        config["seed"] = seed;
        config["z"] = z;
        config["mode"] = mode;

        pivotal::RussoOptions opts;
        opts.jobs = jobs;
        opts.z = z;
        opts.per_edge = per_edge;
        opts.mode = mode == "full" ? pivotal::ScanMode::Full : pivotal::ScanMode::Pruned;
        const pivotal::RussoEstimate r = pivotal::russo_estimate(b, {p, q}, spec, replicas, seed, opts);

        if (per_edge) {
            std::string text = csv_echo("russo", config);
            text += "# d_p=" + format_number(r.d_p) + " d_p_stderr=" + format_number(r.d_p_stderr) +
                    " d_q=" + format_number(r.d_q) + " d_q_stderr=" + format_number(r.d_q_stderr) + "\n";
            text += "edge,class,x0,y0,z0,x1,y1,z1,pivotal_fraction\n";
            for (EdgeId e = 0; e < b.edge_count(); ++e) {
                const EdgeInfo info = b.edge_info(e);
                text += std::to_string(e) + "," + to_string(info.cls) + "," + std::to_string(info.a.x) + "," +
                        std::to_string(info.a.y) + "," + std::to_string(info.a.z) + "," + std::to_string(info.b.x) +
                        "," + std::to_string(info.b.y) + "," + std::to_string(info.b.z) + "," +
                        format_number(r.per_edge[e]) + "\n";
            }
            return text;
        }
        Json out = envelope("russo", config);
        out["d_p"] = r.d_p;
        out["d_p_stderr"] = r.d_p_stderr;
        out["d_q"] = r.d_q;
        out["d_q_stderr"] = r.d_q_stderr;
        out["beta_hat"] = optional_number(r.beta_hat);
        out["beta_stderr"] = r.beta_hat ? Json(r.beta_stderr) : Json(nullptr);
        out["beta_lower"] = r.beta_hat ? Json(r.beta_lower) : Json(nullptr);
        out["beta_upper"] = r.beta_hat ? Json(r.beta_upper) : Json(nullptr);
        out["phi"] = optional_number(r.phi);
        out["psi"] = optional_number(r.psi);
        if (!r.phi) out["angles_unavailable"] = "d_p is not resolved away from 0 or beta bounds are not positive";
        out["replicas"] = r.replicas;
        out["seed"] = r.seed;
        return out.dump(2) + "\n";
    }
};

// ---------------------------------------------------------------- curve

Json point_json(const curve::CurvePoint& pt) {
    return Json{{"p", pt.p},
                {"q_est", pt.q_est},
                {"ci", pt.ci_halfwidth},
                {"n", pt.n},
                {"replicas", pt.replicas},
                {"probes", pt.probes.size()},
                {"clamped_low", pt.clamped_low},
                {"clamped_high", pt.clamped_high},
                {"seed", pt.seed}};
}

struct CurveCmd {
    int k = 1;
    double pmin = 0, pmax = 0;
    int points = 8;
    int n = 64;
    double tol = 5e-3;
    std::uint64_t replicas = 20000;
    std::uint64_t seed = 1;
    double z = 2.0;
    bool two_scale = true;
    bool inverse = false;
    std::string format = "csv";
    std::string diagnostics_path;

    void attach(CLI::App* app) {
        add_k(app, k);
        app->add_option("--pmin", pmin, "Smallest p of the grid, > p_k")->required()->check(CLI::Range(0.0, 0.5));
        app->add_option("--pmax", pmax, "Largest p of the grid, <= 1/2")->required()->check(CLI::Range(0.0, 0.5));
        app->add_option("--points", points, "Grid size")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--n", n, "Lateral side of the crossing box")->capture_default_str()->check(CLI::Range(2, 1 << 14));
        app->add_option("--tol", tol, "Bisection interval width")->capture_default_str()->check(CLI::Range(1e-3, 1.0));
        app->add_option("--replicas", replicas, "Replicas per probe")->capture_default_str()->check(CLI::PositiveNumber);
        add_seed(app, seed);
        app->add_option("--z", z, "Standard errors a probe must clear to narrow the interval")->capture_default_str();
        app->add_flag("--two-scale,!--no-two-scale", two_scale, "Repeat the sweep at scale 2n (default on)");
        app->add_flag("--inverse", inverse, "Bisect in p at q = q_est(p) and report the composition error");
        app->add_option("--format", format, "Output format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
        app->add_option("--diagnostics", diagnostics_path, "Also write the JSON diagnostics to this file");
    }

    std::vector<double> grid() const {
        if (points > 1 && !(pmax > pmin)) throw InvalidArgument("--pmax must exceed --pmin");
        const double pk = bounds::horizontal_threshold(k);
        if (!(pmin > pk)) throw InvalidArgument("--pmin must exceed p_k = " + format_number(pk));
        std::vector<double> g;
        for (int i = 0; i < points; ++i)
            g.push_back(points == 1 ? pmin : pmin + (pmax - pmin) * i / (points - 1));
        g.back() = points == 1 ? pmin : pmax;
        return g;
    }

    std::string run(unsigned jobs) const {
        const std::vector<double> g = grid();
        Json config{{"k", k},     {"pmin", pmin},         {"pmax", pmax},   {"points", points},
                    {"n", n},     {"tol", tol},           {"replicas", replicas}, {"seed", seed},
                    {"z", z},     {"two_scale", two_scale}, {"inverse", inverse}};
        curve::SweepOptions opts;
        opts.bisection.tol = tol;
        opts.bisection.replicas_per_probe = replicas;
        opts.bisection.z = z;
        opts.bisection.jobs = jobs;
        opts.two_scale = two_scale;
        opts.inverse = inverse;
        const curve::CriticalCurve c = curve::sweep(g, k, n, opts, seed);

        Json out = envelope("curve", config);
        out["criterion"] = c.criterion;
        Json pts = Json::array();
        for (const auto& pt : c.points) pts.push_back(point_json(pt));
        out["points"] = pts;
        Json second = Json::array();
        Json drift = Json::array();
        for (std::size_t i = 0; i < c.second_scale.size(); ++i) {
            second.push_back(point_json(c.second_scale[i]));
            drift.push_back(c.second_scale[i].q_est - c.points[i].q_est);
        }
        out["second_scale"] = second;
        out["scale_drift"] = drift;
        Json inv = Json::array();
        for (const auto& ip : c.inverse)
            inv.push_back(Json{{"q", ip.q}, {"p_est", ip.p_est}, {"ci", ip.ci_halfwidth}, {"seed", ip.seed}});
        out["inverse"] = inv;

        Json diag = nullptr;
        if (c.points.size() >= 3) {
            const curve::Diagnostics d = curve::diagnostics(
                c.points, [this](double p) { return bounds::lemma2_qstar(p, k).q; }, inverse ? &c.inverse : nullptr,
                c.points.size() >= 4 ? 1 : 0);
            Json pairs = Json::array();
            for (const auto& pd : d.pairs)
                pairs.push_back(Json{{"p0", pd.p0},
                                     {"p1", pd.p1},
                                     {"difference", pd.difference},
                                     {"combined_ci", pd.combined_ci},
                                     {"ratio", optional_number(pd.ratio)}});
            diag = Json{{"strictly_decreasing", d.strictly_decreasing},
                        {"violations", d.violations},
                        {"window", Json::array({d.window_a, d.window_b})},
                        {"c_hat", optional_number(d.c_hat)},
                        {"C_hat", optional_number(d.C_hat)},
                        {"pairs", pairs},
                        {"bound", "lemma2_qstar"},
                        {"bound_values", d.bound_values},
                        {"within_bound", d.within_bound},
                        {"all_within_bound", d.all_within_bound},
                        {"convex_steps", d.convex_steps},
                        {"concave_steps", d.concave_steps},
                        {"max_inverse_error", optional_number(d.max_inverse_error)},
                        {"findings", d.findings}};
        }
        out["diagnostics"] = diag;

        if (!diagnostics_path.empty()) {
            std::ofstream f(diagnostics_path);
            if (!f) throw InvalidArgument("--diagnostics: cannot open " + diagnostics_path);
            f << out.dump(2) << "\n";
        }
        if (format == "json") return out.dump(2) + "\n";
        return csv_echo("curve", config) + curve::curve_csv(c);
    }
};

// ---------------------------------------------------------------- oracle

struct OracleCmd {
    BoxOptions box;
    double p = 0, q = 0;
    unsigned cap = oracle::kDefaultEdgeCap;
    bool russo = false;

    void attach(CLI::App* app) {
        add_box(app, box, true);
        add_param(app, "--p", p, "Radial parameter");
        add_param(app, "--q", q, "Axial parameter (default 0)", false);
        app->add_option("--cap", cap, "Largest edge count to enumerate")->capture_default_str()->check(CLI::Range(1u, 32u));
        app->add_flag("--russo", russo, "Also report exact pivotal sums and derivatives");
    }

    Json run() const {
        const LatticeBox b = box.box();
        const EventSpec spec = event_flag(box.event_text(b));
        Json config = box_config(box, true);
        config["p"] = p;
        config["q"] = q;
        config["cap"] = cap;
        Json out = envelope("oracle", config);
        const oracle::ExactResult r = oracle::exact_probability(b, {p, q}, spec, cap);
        out["value"] = r.value;
        out["edge_count"] = r.edge_count;
        out["enumeration_size"] = r.enumeration_size;
        out["satisfying"] = r.satisfying;
        if (russo) {
            const oracle::ExactRusso x = oracle::exact_russo(b, {p, q}, spec, cap);
            out["russo"] = Json{{"d_p", x.d_p},         {"d_q", x.d_q},
                                {"d_p_poly", x.d_p_poly}, {"d_q_poly", x.d_q_poly},
                                {"discrepancy", x.discrepancy()}};
        }
        return out;
    }
};

// ---------------------------------------------------------------- verify

struct Lemma1Cmd {
    double p = 0, q = 0;
    int k = 1;
    int m = 8;
    std::uint64_t replicas = 10000;
    std::uint64_t seed = 1;
    double epsilon = 0.05;

    void attach(CLI::App* app) {
        add_param(app, "--p", p, "Radial parameter");
        add_param(app, "--q", q, "Axial parameter (default 0)", false);
        add_k(app, k);
        app->add_option("--m", m, "Block side")->required()->check(CLI::Range(1, 4096));
        add_replicas(app, replicas);
        add_seed(app, seed);
        app->add_option("--epsilon", epsilon, "Target for P(C_m(S_m)), reported only")
            ->capture_default_str()
            ->check(CLI::Range(0.0, 1.0));
    }

    Json run(unsigned jobs, bool& pass) const {
        Json config{{"p", p}, {"q", q}, {"k", k}, {"m", m}, {"replicas", replicas}, {"seed", seed}, {"epsilon", epsilon}};
        const renorm::Lemma1Report r = renorm::lemma1_inequality_report({p, q}, m, k, replicas, seed, epsilon, jobs);
        Json out = envelope("verify lemma1", config);
        out["axial_bonds"] = r.budget.axial_bonds;
        out["prob_all_axial_closed"] = r.budget.prob_all_axial_closed;
        out["closed_axial"] = r.closed_axial;
        out["conditioned"] = estimate_json(r.conditioned);
        out["joint"] = r.joint;
        out["joint_stderr"] = r.joint_stderr;
        out["single_layer"] = estimate_json(r.single_layer);
        out["union_bound"] = r.union_bound;
        out["union_bound_stderr"] = r.union_bound_stderr;
        out["excess_sigmas"] = r.excess_sigmas;
        out["block"] = estimate_json(r.block);
        out["block_below_epsilon"] = r.block_below_epsilon;
        out["gate"] = "joint <= union_bound + 4 sigma";
        out["pass"] = r.holds;
        pass = r.holds;
        return out;
    }
};

struct Lemma2Cmd {
    int k = 1;
    std::optional<double> p;
    double tol = 1e-13;

    void attach(CLI::App* app) {
        add_k(app, k);
        app->add_option("--p", p, "Also solve q* at this p")->check(CLI::Range(0.0, 1.0));
        app->add_option("--tol", tol, "Tolerance on |p_bar - 1/2|")->capture_default_str()->check(CLI::PositiveNumber);
    }

    Json run(bool& pass) const {
        Json config{{"k", k}, {"p", optional_number(p)}, {"tol", tol}};
        Json out = envelope("verify lemma2", config);
        Json checks = Json::array();
        pass = true;
        auto record = [&](const std::string& name, double error, double limit) {
            const bool ok = error <= limit;
            pass = pass && ok;
            checks.push_back(Json{{"name", name}, {"max_error", error}, {"limit", limit}, {"pass", ok}});
        };

        if (k <= oracle::kMaxGadgetK) {
            double worst = 0;
            for (int i = 1; i <= 5; ++i)
                for (int j = 1; j <= 5; ++j) {
                    const double pp = i / 6.0, qq = j / 6.0;
                    worst = std::max(worst, std::abs(oracle::gadget_exact(pp, qq, k) - bounds::p_bar(pp, qq, k)));
                }
            record("gadget enumeration equals p_bar on a 5x5 grid", worst, 1e-12);
        }
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const double pp = i / 99.0;
            worst = std::max(worst, std::abs(bounds::p_bar(pp, 1.0, k) - bounds::collapse_s(pp, k)));
        }
        record("p_bar(p, 1) equals s(p) on a 100-point grid", worst, 1e-12);

        const double pk = bounds::horizontal_threshold(k);
        worst = 0;
        for (int i = 1; i <= 10; ++i) {
            const double pp = pk + (0.5 - pk) * i / 10.0;
            const bounds::QStar s = bounds::lemma2_qstar(pp, k, tol);
            worst = std::max(worst, std::abs(s.p_bar - 0.5));
        }
        record("q* residual |p_bar - 1/2| on a 10-point grid in (p_k, 1/2]", worst, tol);
        if (k >= 1) record("q*(1/2) = 0", bounds::lemma2_qstar(0.5, k, tol).q, 0.0);

        if (p) {
            const bounds::QStar s = bounds::lemma2_qstar(*p, k, tol);
            out["q_star"] = Json{{"p", *p}, {"q", s.q}, {"q_hat", s.q_hat}, {"p_bar", s.p_bar}, {"status", bounds::to_string(s.status)}};
        }
        out["checks"] = checks;
        out["pass"] = pass;
        return out;
    }
};

// Same event on the collapsed single layer: every z coordinate becomes 0.
EventSpec flatten(const EventSpec& spec) {
    if (const auto* c = std::get_if<event::Connected>(&spec)) {
        event::Connected f = *c;
        f.a.z = 0;
        f.b.z = 0;
        return f;
    }
    if (std::holds_alternative<event::ClusterSizeAtLeast>(spec))
        throw InvalidArgument("--event: cluster-size events count every layer and do not collapse");
    return spec;
}

struct CollapseCmd {
    BoxOptions box;
    double p = 0;
    std::uint64_t replicas = 0;
    std::uint64_t seed = 1;
    unsigned cap = oracle::kDefaultEdgeCap;
    double tol = 1e-12;

    void attach(CLI::App* app) {
        add_box(app, box, true);
        add_param(app, "--p", p, "Radial parameter");
        app->add_option("--replicas", replicas, "Also compare Monte Carlo estimates (0 = oracle only)")->capture_default_str();
        add_seed(app, seed);
        app->add_option("--cap", cap, "Largest edge count to enumerate")->capture_default_str()->check(CLI::Range(1u, 32u));
        app->add_option("--tol", tol, "Oracle agreement tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    }

    Json run(unsigned jobs, bool& pass) const {
        const LatticeBox slab = box.box();
        const LatticeBox plane = build_box({0}, slab.shape());
        const std::string ev = box.event_text(slab);
        const EventSpec slab_event = event_flag(ev);
        const EventSpec plane_event = flatten(slab_event);
        const double s = bounds::collapse_s(p, box.k);
        Json config{{"k", box.k}, {"shape", box.shape_text()}, {"event", ev}, {"p", p},
                    {"replicas", replicas}, {"seed", seed}, {"cap", cap}, {"tol", tol}};
        Json out = envelope("verify collapse", config);
        out["s"] = s;
        out["plane_event"] = describe(plane_event);
        pass = true;

        const bool feasible = slab.edge_count() <= cap;
        if (!feasible && replicas == 0)
            throw ResourceLimit("slab box has " + std::to_string(slab.edge_count()) + " edges, above --cap " +
                                std::to_string(cap) + "; pass --replicas for the Monte Carlo comparison");
        if (feasible) {
            const double a = oracle::exact_probability(slab, {p, 1.0}, slab_event, cap).value;
            const double b = oracle::exact_probability(plane, {s, 0.0}, plane_event, cap).value;
            const bool ok = std::abs(a - b) <= tol;
            pass = pass && ok;
            out["oracle"] = Json{{"slab", a}, {"plane", b}, {"difference", a - b}, {"pass", ok}};
        } else {
            out["oracle"] = nullptr;
        }
        if (replicas > 0) {
            const Estimate a = estimate_event(slab, {p, 1.0}, slab_event, replicas, seed, jobs);
            const Estimate b = estimate_event(plane, {s, 0.0}, plane_event, replicas, rng::derive_seed(seed, 1), jobs);
            const double sigma = std::hypot(a.std_error, b.std_error);
            const bool ok = std::abs(a.mean - b.mean) <= 4 * sigma;
            pass = pass && ok;
            out["monte_carlo"] = Json{{"slab", estimate_json(a)},
                                      {"plane", estimate_json(b)},
                                      {"difference", a.mean - b.mean},
                                      {"sigma", sigma},
                                      {"pass", ok}};
        } else {
            out["monte_carlo"] = nullptr;
        }
        out["pass"] = pass;
        return out;
    }
};

struct RussoVerifyCmd {
    BoxOptions box;
    double p = 0, q = 0;
    std::uint64_t replicas = 0;
    std::uint64_t seed = 1;
    double h = 0.02;
    unsigned cap = oracle::kDefaultEdgeCap;

    void attach(CLI::App* app) {
        add_box(app, box, true);
        add_param(app, "--p", p, "Radial parameter");
        add_param(app, "--q", q, "Axial parameter (default 0)", false);
        app->add_option("--replicas", replicas, "Also compare Monte Carlo pivotal counts with coupled finite differences")
            ->capture_default_str();
        add_seed(app, seed);
        app->add_option("--step", h, "Finite-difference half step h")->capture_default_str()->check(CLI::Range(1e-6, 0.5));
        app->add_option("--cap", cap, "Largest edge count to enumerate")->capture_default_str()->check(CLI::Range(1u, 32u));
    }

    Json run(unsigned jobs, bool& pass) const {
        const LatticeBox b = box.box();
        const EventSpec spec = event_flag(box.event_text(b));
        Json config = box_config(box, true);
        config["p"] = p;
        config["q"] = q;
        config["replicas"] = replicas;
        config["seed"] = seed;
        config["step"] = h;
        config["cap"] = cap;
        Json out = envelope("verify russo", config);
        pass = true;

        const bool feasible = b.edge_count() <= cap;
        if (!feasible && replicas == 0)
            throw ResourceLimit("box has " + std::to_string(b.edge_count()) + " edges, above --cap " +
                                std::to_string(cap) + "; pass --replicas for the Monte Carlo comparison");
        if (feasible) {
            const oracle::ExactRusso x = oracle::exact_russo(b, {p, q}, spec, cap);
            const bool ok = x.discrepancy() <= 1e-10;
            pass = pass && ok;
            out["exact"] = Json{{"d_p", x.d_p},           {"d_q", x.d_q},
                                {"d_p_poly", x.d_p_poly}, {"d_q_poly", x.d_q_poly},
                                {"discrepancy", x.discrepancy()}, {"limit", 1e-10}, {"pass", ok}};
        } else {
            out["exact"] = nullptr;
        }
        if (replicas > 0) {
            if (p - h < 0 || p + h > 1) throw InvalidArgument("--step: p +- h leaves [0,1]");
            pivotal::RussoOptions opts;
            opts.jobs = jobs;
            const pivotal::RussoEstimate r = pivotal::russo_estimate(b, {p, q}, spec, replicas, seed, opts);
            const pivotal::FiniteDifference fd =
                pivotal::finite_difference_p(b, {p, q}, h, spec, replicas, rng::derive_seed(seed, 1), jobs);
            const double sigma = std::hypot(r.d_p_stderr, fd.std_error);
            const bool ok = std::abs(r.d_p - fd.value) <= 4 * sigma;
            pass = pass && ok;
            Json mc{{"d_p", r.d_p},
                    {"d_p_stderr", r.d_p_stderr},
                    {"finite_difference_p", fd.value},
                    {"finite_difference_p_stderr", fd.std_error},
                    {"sigma", sigma},
                    {"pass", ok}};
            if (b.k() > 0 && q - h >= 0 && q + h <= 1) {
                const pivotal::FiniteDifference fq =
                    pivotal::finite_difference_q(b, {p, q}, h, spec, replicas, rng::derive_seed(seed, 2), jobs);
                const double sq = std::hypot(r.d_q_stderr, fq.std_error);
                const bool okq = std::abs(r.d_q - fq.value) <= 4 * sq;
                pass = pass && okq;
                mc["d_q"] = r.d_q;
                mc["d_q_stderr"] = r.d_q_stderr;
                mc["finite_difference_q"] = fq.value;
                mc["finite_difference_q_stderr"] = fq.std_error;
                mc["pass_q"] = okq;
            }
            out["monte_carlo"] = mc;
        } else {
            out["monte_carlo"] = nullptr;
        }
        out["pass"] = pass;
        return out;
    }
};

// ---------------------------------------------------------------- sample

struct SampleCmd {
    BoxOptions box;
    double p = 0, q = 0;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;

    void attach(CLI::App* app) {
        add_box(app, box, false);
        add_param(app, "--p", p, "Radial parameter");
        add_param(app, "--q", q, "Axial parameter (default 0)", false);
        add_seed(app, seed);
        app->add_option("--stream", stream, "Replica index")->capture_default_str();
    }

    std::string run() const {
        const LatticeBox b = box.box();
        return config_to_string(b, sample_config(b, {p, q}, {seed, stream}));
    }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bernoulli bond percolation on slabs Z^2 x {0..k}"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string output;
    unsigned jobs = 1;
    app.add_option("-o,--output", output, "Write the artifact to this file instead of stdout");
    app.add_option("--jobs", jobs, "Worker threads, 0 = all cores; output does not depend on it")->capture_default_str();

    BoundsCmd bounds_cmd;
    ThetaCmd theta_cmd;
    TailCmd tail_cmd;
    RussoCmd russo_cmd;
    CurveCmd curve_cmd;
    OracleCmd oracle_cmd;
    Lemma1Cmd lemma1_cmd;
    Lemma2Cmd lemma2_cmd;
    CollapseCmd collapse_cmd;
    RussoVerifyCmd russo_verify_cmd;
    SampleCmd sample_cmd;

    auto* bounds_app = app.add_subcommand("bounds", "Closed-form thresholds and the q* bound (JSON)");
    bounds_cmd.attach(bounds_app);
    auto* theta_app = app.add_subcommand("theta", "Monte Carlo estimate of P(0 <-> boundary of B(n))");
    theta_cmd.attach(theta_app);
    auto* tail_app = app.add_subcommand("tail", "Survival of |C_0| and an exponential fit");
    tail_cmd.attach(tail_app);
    auto* russo_app = app.add_subcommand("russo", "Pivotal-count derivative estimates and monotone angles");
    russo_cmd.attach(russo_app);
    auto* curve_app = app.add_subcommand("curve", "Critical-curve sweep by stochastic bisection with diagnostics");
    curve_cmd.attach(curve_app);
    auto* oracle_app = app.add_subcommand("oracle", "Exact probability by exhaustive enumeration");
    oracle_cmd.attach(oracle_app);
    auto* verify_app = app.add_subcommand("verify", "Pass/fail checks; exit 4 when a gate fails");
    verify_app->require_subcommand(1);
    verify_app->fallthrough();
    auto* lemma1_app = verify_app->add_subcommand(
        "lemma1", "P(C_m and Q) <= (k+1) P(single-layer C_m) at 4 sigma, with the block estimate against --epsilon");
    lemma1_cmd.attach(lemma1_app);
    auto* lemma2_app = verify_app->add_subcommand(
        "lemma2", "Gadget enumeration = p_bar and s to 1e-12; q* residual within --tol");
    lemma2_cmd.attach(lemma2_app);
    auto* collapse_app = verify_app->add_subcommand(
        "collapse", "Slab at q = 1 equals the plane at s: oracle to --tol, Monte Carlo at 4 sigma");
    collapse_cmd.attach(collapse_app);
    auto* russo_verify_app = verify_app->add_subcommand(
        "russo", "Exact pivotal sums = derivatives to 1e-10; Monte Carlo d_p vs coupled finite difference at 4 sigma");
    russo_verify_cmd.attach(russo_verify_app);
    auto* sample_app = app.add_subcommand("sample", "Dump one sampled configuration as text");
    sample_cmd.attach(sample_app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitInvalid;
    }

    int status = 0;
    std::string artifact;
    try {
        bool pass = true;
        if (*bounds_app)
            artifact = bounds_cmd.run().dump(2) + "\n";
        else if (*theta_app)
            artifact = theta_cmd.run(jobs);
        else if (*tail_app)
            artifact = tail_cmd.run(jobs);
        else if (*russo_app)
            artifact = russo_cmd.run(jobs);
        else if (*curve_app)
            artifact = curve_cmd.run(jobs);
        else if (*oracle_app)
            artifact = oracle_cmd.run().dump(2) + "\n";
        else if (*lemma1_app)
            artifact = lemma1_cmd.run(jobs, pass).dump(2) + "\n";
        else if (*lemma2_app)
            artifact = lemma2_cmd.run(pass).dump(2) + "\n";
        else if (*collapse_app)
            artifact = collapse_cmd.run(jobs, pass).dump(2) + "\n";
        else if (*russo_verify_app)
            artifact = russo_verify_cmd.run(jobs, pass).dump(2) + "\n";
        else if (*sample_app)
            artifact = sample_cmd.run();
        if (!pass) {
            err << "verification failed\n";
            status = kExitDiagnostic;
        }
    } catch (const ResourceLimit& e) {
        err << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DiagnosticError& e) {
        err << "diagnostic failure: " << e.what() << "\n";
        return kExitDiagnostic;
    } catch (const FitInfeasible& e) {
        err << "diagnostic failure: " << e.what() << "\n";
        return kExitDiagnostic;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }

    if (output.empty()) {
        out << artifact;
    } else {
        std::ofstream f(output, std::ios::binary);
        if (!f) {
            err << "error: --output: cannot open " << output << "\n";
            return kExitInvalid;
        }
        f << artifact;
    }
    return status;
}

}  // namespace slabperc::cli
