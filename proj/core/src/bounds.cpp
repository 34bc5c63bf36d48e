#include "slabperc/bounds.hpp"

#include <cmath>
#include <string>

#include "slabperc/error.hpp"

namespace slabperc::bounds {

namespace {

void check_k(int k) {
    if (k < 0) throw InvalidArgument("k must be >= 0, got " + std::to_string(k));
}

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0,1]");
}

}  // namespace

double horizontal_threshold(int k) {
    check_k(k);
    return -std::expm1(-std::log(2.0) / (k + 1));
}

double collapse_s(double p, int k) {
    check_k(k);
    check_unit(p, "p");
    if (p == 1.0) return 1.0;
    return -std::expm1((k + 1) * std::log1p(-p));
}

double q_hat(double q) {
    check_unit(q, "q");
    if (q == 1.0) return 1.0;
    return -std::expm1(0.25 * std::log1p(-q));
}

double q_from_hat(double qh) {
    check_unit(qh, "q_hat");
    const double c = 1.0 - qh;
    return 1.0 - (c * c) * (c * c);
}

double p_bar_from_hat(double p, double qh, int k) {
    check_k(k);
    check_unit(p, "p");
    check_unit(qh, "q_hat");
    const double ratio = (1.0 - p) * qh * qh;
    double term = 1.0;
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) {
        sum += term;
        term *= ratio;
    }
    return p * sum;
}

double p_bar(double p, double q, int k) { return p_bar_from_hat(p, q_hat(q), k); }

const char* to_string(QStarStatus s) {
    switch (s) {
        case QStarStatus::Solved: return "solved";
        case QStarStatus::Boundary: return "boundary";
        case QStarStatus::NoSolution: return "no-solution";
    }
    return "?";
}

QStar lemma2_qstar(double p, int k, double tol) {
    check_k(k);
    check_unit(p, "p");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");

    auto gap = [&](double qh) { return p_bar_from_hat(p, qh, k) - 0.5; };
    QStar out;
    const double at_zero = gap(0.0);
    if (at_zero >= -tol) {
        out.q = 0.0;
        out.q_hat = 0.0;
        out.p_bar = at_zero + 0.5;
        return out;
    }
    const double at_one = gap(1.0);
    if (at_one < -tol) {
        out.q = out.q_hat = 1.0;
        out.p_bar = at_one + 0.5;
        out.status = QStarStatus::NoSolution;
        return out;
    }
    if (at_one <= tol) {
        out.q = out.q_hat = 1.0;
        out.p_bar = at_one + 0.5;
        out.status = QStarStatus::Boundary;
        return out;
    }
    double lo = 0.0, hi = 1.0;
    double mid = 0.5;
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double g = gap(mid);
        if (std::abs(g) <= tol) break;
        (g < 0 ? lo : hi) = mid;
    }
    out.q_hat = mid;
    out.q = q_from_hat(mid);
    out.p_bar = gap(mid) + 0.5;
    return out;
}

Lemma1Budget lemma1_budget(int m, int k, double q) {
    if (m < 1) throw InvalidArgument("block side m must be >= 1");
    check_k(k);
    check_unit(q, "q");
    Lemma1Budget b;
    b.m = m;
    b.k = k;
    b.axial_bonds = static_cast<std::uint64_t>(k) * 9u * static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(m);
    b.prob_all_axial_closed = std::pow(1.0 - q, static_cast<double>(b.axial_bonds));
    return b;
}

BoundsReport bounds_report(int k, std::optional<double> p, std::optional<double> q) {
    BoundsReport r;
    r.k = k;
    r.p_k = horizontal_threshold(k);
    r.p = p;
    r.q = q;
    if (p) {
        r.s = collapse_s(*p, k);
        r.q_star = lemma2_qstar(*p, k);
    }
    if (q) r.q_hat = q_hat(*q);
    if (p && q) r.p_bar = p_bar(*p, *q, k);
    return r;
}

}  // namespace slabperc::bounds
