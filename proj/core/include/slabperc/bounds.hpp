#pragma once

#include <cstdint>
#include <optional>

namespace slabperc::bounds {

/// p_k = 1 - 2^{-1/(k+1)}: the radial threshold of the fully coupled slab (q = 1).
double horizontal_threshold(int k);

/// s with 1 - s = (1 - p)^{k+1}: the planar parameter of the q = 1 slab.
double collapse_s(double p, int k);

/// q_hat with 1 - q = (1 - q_hat)^4.
double q_hat(double q);
/// Inverse of q_hat.
double q_from_hat(double qh);

/// Planar parameter dominated by the four-copy gadget:
/// p * sum_{j=0..k} ((1-p) q_hat^2)^j, evaluated as an explicit sum.
double p_bar(double p, double q, int k);
/// p_bar with q_hat given directly.
double p_bar_from_hat(double p, double qh, int k);

enum class QStarStatus { Solved, Boundary, NoSolution };
const char* to_string(QStarStatus s);

struct QStar {
    double q = 1.0;
    double q_hat = 1.0;
    double p_bar = 0.0;  // p_bar at the returned point
    QStarStatus status = QStarStatus::Solved;
};

/// Smallest axial parameter with p_bar(p, q, k) = 1/2, solved by bisection in
/// q_hat-space to |p_bar - 1/2| <= tol. Returns q = 1 with NoSolution when
/// p_bar(p, 1, k) < 1/2 - tol, and q = 1 with Boundary when p_bar(p, 1, k)
/// is within tol of 1/2.
QStar lemma2_qstar(double p, int k, double tol = 1e-13);

struct Lemma1Budget {
    int m = 1;
    int k = 0;
    std::uint64_t axial_bonds = 0;  // N = k (3m)^2
    double prob_all_axial_closed = 1.0;
};

Lemma1Budget lemma1_budget(int m, int k, double q);

struct BoundsReport {
    int k = 0;
    double p_k = 0.5;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> s;
    std::optional<double> q_hat;
    std::optional<double> p_bar;
    std::optional<QStar> q_star;
};

/// Fills every quantity computable from the supplied parameters.
BoundsReport bounds_report(int k, std::optional<double> p, std::optional<double> q);

}  // namespace slabperc::bounds
