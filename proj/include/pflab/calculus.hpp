#pragma once

#include "pflab/distance.hpp"

namespace pflab {

namespace detail {

// Forward-difference gradient magnitude^2 on the cell with lower corner f0.
inline real cell_grad2(const grid& g, const std::vector<real>& v, std::size_t f0) {
    real s = 0;
    for (int i = 0; i < g.dim; ++i) {
        const real d = (v[f0 + g.stride(i)] - v[f0]) / g.h;
        s += d * d;
    }
    return s;
}

} // namespace detail

struct energy_value {
    real value = 0;
    real log_value = -inf; // log of the energy, stable for large p
};

// p-Dirichlet energy sum over all cells: sum w_c |grad u|^p h^N, with the
// forward-difference gradient into each cell. cell_weights = nullptr means
// unit weights (the zero-trace convention); otherwise per-cell fractions.
inline energy_value p_energy_raw(const grid& g, const std::vector<real>& v, real p,
                                 const std::vector<real>* cell_weights = nullptr) {
    require(p > 1, "p_energy: requires p > 1");
    const real hn = std::pow(g.h, g.dim);
    // two passes: rescale by the max gradient so large p cannot overflow
    real max_g2 = 0;
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        if (cell_weights && (*cell_weights)[cell] <= 0) return;
        max_g2 = std::max(max_g2, detail::cell_grad2(g, v, f0));
    });
    energy_value e;
    if (max_g2 == 0) {
        e.value = 0;
        return e;
    }
    const real logm = 0.5 * std::log(max_g2);
    sum_accumulator acc;
    acc.reserve(g.cell_count());
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        const real w = cell_weights ? (*cell_weights)[cell] : 1.0;
        if (w <= 0) {
            acc.add(0.0);
            return;
        }
        const real g2 = detail::cell_grad2(g, v, f0);
        acc.add(g2 > 0 ? w * std::exp(0.5 * p * (std::log(g2) - 2.0 * logm)) : 0.0);
    });
    const real s = acc.total();
    e.log_value = p * logm + std::log(s) + g.dim * std::log(g.h);
    e.value = std::exp(p * logm) * s * hn;
    return e;
}

// Gradient of p_energy_raw with respect to node values (dense, fixed order).
inline energy_value p_energy_grad(const grid& g, const std::vector<real>& v, real p,
                                  std::vector<real>& grad,
                                  const std::vector<real>* cell_weights = nullptr) {
    grad.assign(v.size(), 0.0);
    const real hn = std::pow(g.h, g.dim);
    sum_accumulator acc;
    acc.reserve(g.cell_count());
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        const real w = cell_weights ? (*cell_weights)[cell] : 1.0;
        if (w <= 0) {
            acc.add(0.0);
            return;
        }
        const real g2 = detail::cell_grad2(g, v, f0);
        if (g2 <= 0) {
            acc.add(0.0);
            return;
        }
        acc.add(w * std::pow(g2, 0.5 * p));
        const real coef = w * p * std::pow(g2, 0.5 * p - 1.0) * hn / (g.h * g.h);
        for (int i = 0; i < g.dim; ++i) {
            const std::size_t f1 = f0 + g.stride(i);
            const real diff = v[f1] - v[f0];
            grad[f1] += coef * diff;
            grad[f0] -= coef * diff;
        }
    });
    energy_value e;
    e.value = acc.total() * hn;
    e.log_value = e.value > 0 ? std::log(e.value) : -inf;
    return e;
}

inline real p_energy(const grid_field& u, real p) {
    require(is_zero_trace(u), "p_energy: field is not in the zero-trace class");
    return p_energy_raw(*u.g, u.v, p).value;
}

// Diagonal of the p-energy Hessian (Jacobi preconditioner scale), floored to
// keep flat regions movable.
inline void p_energy_hessian_diag(const grid& g, const std::vector<real>& v, real p,
                                  std::vector<real>& diag,
                                  const std::vector<real>* cell_weights = nullptr) {
    diag.assign(v.size(), 0.0);
    const real hfac = std::pow(g.h, g.dim) / (g.h * g.h);
    const real curv = p * std::max<real>(1.0, p - 1.0);
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        const real w = cell_weights ? (*cell_weights)[cell] : 1.0;
        if (w <= 0) return;
        const real g2 = detail::cell_grad2(g, v, f0);
        if (g2 <= 0) return;
        const real coef = w * curv * std::pow(g2, 0.5 * p - 1.0) * hfac;
        for (int i = 0; i < g.dim; ++i) {
            const std::size_t f1 = f0 + g.stride(i);
            diag[f0] += coef;
            diag[f1] += coef;
        }
    });
    real dmax = 0;
    for (real x : diag) dmax = std::max(dmax, x);
    const real floor_val = dmax > 0 ? 1e-8 * dmax : 1.0;
    for (auto& x : diag) x = std::max(x, floor_val);
}

// Midpoint-rule integral of |u|^q over interior cells: the cell value is the
// multilinear interpolant at the cell center (corner average) and cut cells
// carry their fractional volume.
inline real lq_integral(const grid& g, const std::vector<real>& v, real q) {
    const real hn = std::pow(g.h, g.dim);
    const real scale = 1.0 / static_cast<real>(1 << g.dim);
    sum_accumulator acc;
    acc.reserve(g.cell_count());
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        const real frac = g.cell_frac[cell];
        if (frac <= 0) {
            acc.add(0.0);
            return;
        }
        real avg = 0;
        for (int corner = 0; corner < (1 << g.dim); ++corner) {
            std::size_t f = f0;
            for (int i = 0; i < g.dim; ++i)
                if (corner & (1 << i)) f += g.stride(i);
            avg += v[f];
        }
        avg *= scale;
        acc.add(frac * hn * std::pow(std::abs(avg), q));
    });
    return acc.total();
}

// d(lq_integral)/dv, accumulated into grad with the given prefactor.
inline void lq_integral_grad(const grid& g, const std::vector<real>& v, real q,
                             std::vector<real>& grad, real prefactor) {
    const real hn = std::pow(g.h, g.dim);
    const real scale = 1.0 / static_cast<real>(1 << g.dim);
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        const real frac = g.cell_frac[cell];
        if (frac <= 0) return;
        real avg = 0;
        for (int corner = 0; corner < (1 << g.dim); ++corner) {
            std::size_t f = f0;
            for (int i = 0; i < g.dim; ++i)
                if (corner & (1 << i)) f += g.stride(i);
            avg += v[f];
        }
        avg *= scale;
        if (avg == 0 && q > 1) return;
        const real dmid = q * std::pow(std::abs(avg), q - 1.0) * (avg >= 0 ? 1.0 : -1.0);
        const real coef = prefactor * frac * hn * dmid * scale;
        for (int corner = 0; corner < (1 << g.dim); ++corner) {
            std::size_t f = f0;
            for (int i = 0; i < g.dim; ++i)
                if (corner & (1 << i)) f += g.stride(i);
            grad[f] += coef;
        }
    });
}

inline real lq_norm(const grid_field& u, real q) {
    require(q >= 1, "lq_norm: requires q >= 1 or q = inf");
    if (std::isinf(q)) {
        real m = 0;
        for (real x : u.v) m = std::max(m, std::abs(x));
        return m;
    }
    return std::pow(lq_integral(*u.g, u.v, q), 1.0 / q);
}

inline constexpr std::size_t holder_pair_budget = 2'000'000;

struct holder_result {
    real value = 0;
    bool exact = true;
    std::size_t nodes_used = 0;
};

// Pairwise Holder seminorm sup |u(x)-u(y)| / |x-y|^beta over grid nodes.
// Exact mode covers every pair (interior, boundary, exterior, pinned);
// above the pair budget a strided node subsample is used and flagged.
inline holder_result holder_seminorm(const grid_field& u, real beta,
                                     std::size_t pair_budget = holder_pair_budget) {
    require(beta > 0 && beta <= 1, "holder_seminorm: requires beta in (0,1]");
    const grid& g = *u.g;
    const std::size_t n = g.node_count();
    holder_result res;
    std::vector<std::size_t> nodes;
    if (n * (n - 1) / 2 <= pair_budget) {
        nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
    } else {
        res.exact = false;
        std::size_t target = static_cast<std::size_t>(std::sqrt(2.0 * pair_budget)) + 1;
        const std::size_t stride = (n + target - 1) / target;
        for (std::size_t i = 0; i < n; i += stride) nodes.push_back(i);
    }
    res.nodes_used = nodes.size();
    std::vector<point> pts(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) pts[i] = g.node_point(nodes[i]);
    real best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const real ui = u.v[nodes[i]];
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const real diff = std::abs(ui - u.v[nodes[j]]);
            if (diff == 0) continue;
            const real r = dist(pts[i], pts[j], g.dim);
            best = std::max(best, diff / std::pow(r, beta));
        }
    }
    res.value = best;
    return res;
}

// Hardy quotient p_energy(u) / || u / max(d, clamp)^e ||_q^p with
// e = N/q + (p-N)/p (q finite), e = 1 - N/p (q = inf).
inline real hardy_weight_exponent(real p, real q, int dim) {
    if (std::isinf(q)) return 1.0 - dim / p;
    return dim / q + (p - dim) / p;
}

inline grid_field hardy_weighted(const grid_field& u, const grid_field& d, real p, real q,
                                 real clamp) {
    const int dim = u.g->dim;
    const real e = hardy_weight_exponent(p, q, dim);
    grid_field w = u;
    for (std::size_t i = 0; i < w.v.size(); ++i)
        w.v[i] = u.v[i] / std::pow(std::max(d.v[i], clamp), e);
    return w;
}

inline real hardy_quotient(const grid_field& u, const grid_field& d, real p, real q,
                           real clamp) {
    require(p > u.g->dim, "hardy_quotient: requires p > N");
    require(q >= p, "hardy_quotient: requires q in [p, inf]");
    require(clamp > 0, "hardy_quotient: requires clamp > 0");
    require(is_zero_trace(u), "hardy_quotient: field is not in the zero-trace class");
    const grid_field w = hardy_weighted(u, d, p, q, clamp);
    const real denom = lq_norm(w, q);
    if (denom == 0) return inf;
    return p_energy_raw(*u.g, u.v, p).value / std::pow(denom, p);
}

struct interpolation_audit_result {
    real seminorm_beta = 0;
    real seminorm_alpha = 0;
    real lgamma_norm = 0;
    real sup_norm = 0;
    real bound_beta = 0;  // C1 ||u||^theta [u]_alpha^{1-theta}
    real bound_sup = 0;   // C2 ||u||^chi  [u]_alpha^{1-chi}
    bool pass_beta = true;
    bool pass_sup = true;
    real margin_beta = 0; // bound - value
    real margin_sup = 0;
};

inline interpolation_audit_result interpolation_audit(const grid_field& u,
                                                      const holder_interp& interp) {
    require(is_zero_trace(u), "interpolation_audit: field is not in the zero-trace class");
    const std::size_t n = u.g->node_count();
    require(n * (n - 1) / 2 <= holder_pair_budget,
            "interpolation_audit: pair budget exceeded, exact mode refused");
    interpolation_audit_result r;
    r.seminorm_beta = holder_seminorm(u, interp.beta).value;
    r.seminorm_alpha = holder_seminorm(u, interp.alpha).value;
    r.lgamma_norm = lq_norm(u, interp.gamma);
    r.sup_norm = lq_norm(u, inf);
    r.bound_beta = interp.c1 * std::pow(r.lgamma_norm, interp.theta) *
                   std::pow(r.seminorm_alpha, 1.0 - interp.theta);
    r.bound_sup = interp.c2 * std::pow(r.lgamma_norm, interp.chi) *
                  std::pow(r.seminorm_alpha, 1.0 - interp.chi);
    r.margin_beta = r.bound_beta - r.seminorm_beta;
    r.margin_sup = r.bound_sup - r.sup_norm;
    r.pass_beta = r.seminorm_beta <= r.bound_beta * (1 + 1e-12);
    r.pass_sup = r.sup_norm <= r.bound_sup * (1 + 1e-12);
    return r;
}

} // namespace pflab
