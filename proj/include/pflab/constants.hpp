#pragma once

#include "pflab/common.hpp"

namespace pflab {

inline constexpr real pi = 3.14159265358979323846;

// Lanczos approximation of the Gamma function (g=7, n=9 coefficients),
// accurate to ~1e-13 on the positive half line.
inline real gamma_fn(real z) {
    static const real g = 7.0;
    static const real coef[9] = {
        0.99999999999980993,     676.5203681218851,   -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,  12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z < 0.5) return pi / (std::sin(pi * z) * gamma_fn(1.0 - z));
    z -= 1.0;
    real a = coef[0];
    const real t = z + g + 0.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (z + static_cast<real>(i));
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

// Volume of the N-dimensional unit ball. Table for N<=3, Gamma formula above.
inline real unit_ball_volume(int n) {
    require(n >= 1, "unit_ball_volume: dimension must be >= 1");
    switch (n) {
        case 1: return 2.0;
        case 2: return pi;
        case 3: return 4.0 * pi / 3.0;
        default: return std::pow(pi, 0.5 * n) / gamma_fn(0.5 * n + 1.0);
    }
}

// lambda_{p,infty}(B_1) = ((p-N)/(p-1))^{p-1} * N * omega_N, for p > N.
inline real ball_sup_frequency(real p, int n) {
    require(p > n, "ball_sup_frequency: requires p > N");
    return std::pow((p - n) / (p - 1.0), p - 1.0) * n * unit_ball_volume(n);
}

// One-dimensional Sobolev-Poincare lower bound:
// pi_{p,q} >= 2^{1-1/p} * (q(1-1/p)+1)^{1/q}.
inline real pi_pq_lower_bound(real p, real q) {
    return std::pow(2.0, 1.0 - 1.0 / p) * std::pow(q * (1.0 - 1.0 / p) + 1.0, 1.0 / q);
}

// Holder interpolation exponents and constants for a field in the zero-trace
// class: [u]_beta <= C1 ||u||_gamma^theta [u]_alpha^{1-theta} and
// ||u||_inf <= C2 ||u||_gamma^chi [u]_alpha^{1-chi}.
struct holder_interp {
    real alpha;
    real beta;
    real gamma;
    int dim;
    real theta;
    real chi;
    real c1;
    real c2;
};

inline holder_interp make_holder_interp(real alpha, real beta, real gamma, int dim) {
    require(0 < beta && beta < alpha && alpha <= 1.0,
            "holder_interp: requires 0 < beta < alpha <= 1");
    require(gamma >= 1.0 && std::isfinite(gamma), "holder_interp: requires 1 <= gamma < inf");
    require(dim >= 1, "holder_interp: dimension must be >= 1");
    holder_interp h{};
    h.alpha = alpha;
    h.beta = beta;
    h.gamma = gamma;
    h.dim = dim;
    const real n = static_cast<real>(dim);
    h.theta = (alpha - beta) / (alpha + n / gamma);
    h.chi = alpha / (alpha + n / gamma);
    const real wn = unit_ball_volume(dim);
    const real core = std::pow(alpha * gamma / n, n / (alpha * gamma + n));
    h.c1 = 2.0 * std::pow(wn, -(alpha - beta) / (gamma * alpha + n)) * core / h.chi;
    h.c2 = std::pow(wn, -h.chi / gamma) * core / h.chi;
    return h;
}

} // namespace pflab
