#pragma once

#include "pflab/field.hpp"

namespace pflab {

struct inradius_result {
    real value = 0;
    real uncertainty = 0;       // +- h
    std::size_t argmax_node = 0; // lexicographically smallest on ties
};

inline inradius_result inradius(const grid_field& d) {
    inradius_result r;
    r.uncertainty = d.g->h;
    bool any = false;
    for (std::size_t i = 0; i < d.v.size(); ++i) {
        if (d.g->cls[i] != node_class::interior) continue;
        if (!any || d.v[i] > r.value) {
            r.value = d.v[i];
            r.argmax_node = i;
            any = true;
        }
    }
    require(any, "inradius: grid has an empty interior");
    return r;
}

// Composite midpoint quadrature of d^q over interior cells, q-th root.
// The distance is evaluated in closed form at cell centers; cells cut by the
// boundary enter with their fractional volume.
inline real distance_lq_norm(const grid_field& d, real q) {
    require(q >= 1, "distance_lq_norm: requires q >= 1 or q = inf");
    if (std::isinf(q)) return inradius(d).value;
    const grid& g = *d.g;
    const real hn = std::pow(g.h, g.dim);
    sum_accumulator acc;
    acc.reserve(g.cell_count());
    g.for_each_cell([&](std::size_t cell, std::size_t) {
        const real frac = g.cell_frac[cell];
        if (frac <= 0) {
            acc.add(0.0);
            return;
        }
        point c = g.cell_lower(cell);
        for (int i = 0; i < g.dim; ++i) c[i] += 0.5 * g.h;
        const real dc = g.domain.distance(c);
        acc.add(frac * hn * std::pow(dc, q));
    });
    return std::pow(acc.total(), 1.0 / q);
}

// r_Omega <= C_{N,alpha} (int d^alpha)^{1/(N+alpha)} with
// C_{N,alpha} = (N omega_N int_0^1 (1-rho)^alpha rho^{N-1} drho)^{-1/(N+alpha)}.
inline real inradius_upper_bound(int dim, real alpha, real integral_d_alpha) {
    require(alpha > 0, "inradius_upper_bound: requires alpha > 0");
    require(integral_d_alpha >= 0, "inradius_upper_bound: requires a nonnegative integral");
    const real inner = integrate(
        [&](real rho) { return std::pow(1.0 - rho, alpha) * std::pow(rho, dim - 1.0); }, 0.0,
        1.0, 1e-14);
    const real c = std::pow(dim * unit_ball_volume(dim) * inner, -1.0 / (dim + alpha));
    return c * std::pow(integral_d_alpha, 1.0 / (dim + alpha));
}

struct tail_record {
    real radius = 0;
    real tail_sup = 0;          // sup of d over nodes with |x| > radius
    real bound = inf;           // quasibounded tail bound, inf when not applicable
    bool bound_applicable = false;
};

// Quadrature of d^alpha over cells whose centers lie outside B_R (with a
// half-diagonal margin so the covered region contains R^N \ B_R).
inline real tail_integral(const grid_field& d, real radius, real alpha) {
    const grid& g = *d.g;
    const real hn = std::pow(g.h, g.dim);
    const real margin = 0.5 * g.h * std::sqrt(static_cast<real>(g.dim));
    sum_accumulator acc;
    g.for_each_cell([&](std::size_t cell, std::size_t) {
        const real frac = g.cell_frac[cell];
        if (frac <= 0) return;
        point c = g.cell_lower(cell);
        for (int i = 0; i < g.dim; ++i) c[i] += 0.5 * g.h;
        if (norm(c, g.dim) <= radius - margin) return;
        acc.add(frac * hn * std::pow(g.domain.distance(c), alpha));
    });
    return acc.total();
}

// Per radius R: sup of the distance field outside B_R, plus the explicit
// quasibounded bound 2 (omega_N^-1 int_{R^N \ B_R'} d^alpha)^{1/(N+alpha)}
// with R' = R - r/2 whenever R >= r (so the bound provably covers |x| > R).
inline std::vector<tail_record> quasibounded_profile(const grid_field& d,
                                                     const std::vector<real>& radii,
                                                     std::optional<real> alpha = std::nullopt) {
    const grid& g = *d.g;
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        require(radii[i] < radii[i + 1], "quasibounded_profile: radii must be increasing");
    require(!radii.empty() && radii.front() > 0, "quasibounded_profile: radii must be positive");
    const real trunc = g.domain.bounding_radius();
    if (radii.back() >= trunc) {
        std::ostringstream s;
        s << "quasibounded_profile: radius " << radii.back()
          << " exceeds the domain truncation (bounding radius " << trunc << ")";
        fail(s.str());
    }
    const real r_in = inradius(d).value;
    std::vector<tail_record> out;
    for (real R : radii) {
        tail_record rec;
        rec.radius = R;
        for (std::size_t i = 0; i < d.v.size(); ++i) {
            if (g.cls[i] != node_class::interior) continue;
            if (norm(g.node_point(i), g.dim) > R) rec.tail_sup = std::max(rec.tail_sup, d.v[i]);
        }
        if (alpha && R >= r_in) {
            const real integral = tail_integral(d, R - 0.5 * r_in, *alpha);
            rec.bound = 2.0 * std::pow(integral / unit_ball_volume(g.dim),
                                       1.0 / (g.dim + *alpha));
            rec.bound_applicable = true;
            require(rec.tail_sup <= rec.bound + 1e-12,
                    "quasibounded_profile: tail sup exceeds the quasibounded bound");
        }
        out.push_back(rec);
    }
    return out;
}

} // namespace pflab
