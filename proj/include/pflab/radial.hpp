#pragma once

#include "pflab/solvers.hpp"

namespace pflab {

// 1-D chain discretization shared by the radial ball reduction (weight
// N omega_N r^{N-1}) and the flat interval. Values live on n+1 nodes; the
// right end is always pinned to 0, the left end optionally (interval) or
// free (radial, u'(0) free).
struct chain_problem {
    int n = 0;
    real delta = 0;
    std::vector<real> w; // per-cell measure weight, already including delta
    bool left_pinned = false;
    std::vector<real> radii; // node coordinates (diagnostics)

    real energy(const std::vector<real>& u, real p) const {
        sum_accumulator acc;
        acc.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const real s = std::abs(u[static_cast<std::size_t>(i + 1)] - u[static_cast<std::size_t>(i)]) / delta;
            acc.add(s > 0 ? w[static_cast<std::size_t>(i)] * std::pow(s, p) : 0.0);
        }
        return acc.total();
    }

    real mass(const std::vector<real>& u, real q) const {
        sum_accumulator acc;
        acc.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const real a =
                std::abs(u[static_cast<std::size_t>(i)] + u[static_cast<std::size_t>(i + 1)]) * 0.5;
            acc.add(a > 0 ? w[static_cast<std::size_t>(i)] * std::pow(a, q) : 0.0);
        }
        return acc.total();
    }

    void energy_grad(const std::vector<real>& u, real p, std::vector<real>& grad) const {
        grad.assign(u.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            const real diff =
                (u[static_cast<std::size_t>(i + 1)] - u[static_cast<std::size_t>(i)]) / delta;
            if (diff == 0) continue;
            const real coef = w[static_cast<std::size_t>(i)] * p *
                              std::pow(std::abs(diff), p - 1.0) * (diff > 0 ? 1.0 : -1.0) / delta;
            grad[static_cast<std::size_t>(i + 1)] += coef;
            grad[static_cast<std::size_t>(i)] -= coef;
        }
    }

    void mass_grad(const std::vector<real>& u, real q, std::vector<real>& grad,
                   real pref) const {
        for (int i = 0; i < n; ++i) {
            const real a = (u[static_cast<std::size_t>(i)] + u[static_cast<std::size_t>(i + 1)]) * 0.5;
            if (a == 0 && q > 1) continue;
            const real coef = pref * w[static_cast<std::size_t>(i)] * q *
                              std::pow(std::abs(a), q - 1.0) * (a >= 0 ? 1.0 : -1.0) * 0.5;
            grad[static_cast<std::size_t>(i)] += coef;
            grad[static_cast<std::size_t>(i + 1)] += coef;
        }
    }

    void energy_hessian_diag(const std::vector<real>& u, real p, std::vector<real>& diag) const {
        diag.assign(u.size(), 0.0);
        const real curv = p * std::max<real>(1.0, p - 1.0);
        for (int i = 0; i < n; ++i) {
            const real s =
                std::abs(u[static_cast<std::size_t>(i + 1)] - u[static_cast<std::size_t>(i)]) / delta;
            if (s <= 0) continue;
            const real coef =
                w[static_cast<std::size_t>(i)] * curv * std::pow(s, p - 2.0) / (delta * delta);
            diag[static_cast<std::size_t>(i)] += coef;
            diag[static_cast<std::size_t>(i + 1)] += coef;
        }
        real dmax = 0;
        for (real x : diag) dmax = std::max(dmax, x);
        const real floor_val = dmax > 0 ? 1e-8 * dmax : 1.0;
        for (auto& x : diag) x = std::max(x, floor_val);
    }

    std::vector<std::uint8_t> free_mask() const {
        std::vector<std::uint8_t> m(static_cast<std::size_t>(n + 1), 1);
        m[static_cast<std::size_t>(n)] = 0;
        if (left_pinned) m[0] = 0;
        return m;
    }
};

inline chain_problem make_radial_chain(int dim, real radius, int nodes) {
    require(nodes >= 64, "radial chain: needs at least 64 nodes");
    require(radius > 0, "radial chain: requires R > 0");
    chain_problem c;
    c.n = nodes;
    c.delta = radius / nodes;
    c.left_pinned = false;
    const real nw = dim * unit_ball_volume(dim);
    c.w.resize(static_cast<std::size_t>(nodes));
    c.radii.resize(static_cast<std::size_t>(nodes + 1));
    for (int i = 0; i <= nodes; ++i) c.radii[static_cast<std::size_t>(i)] = i * c.delta;
    for (int i = 0; i < nodes; ++i) {
        const real mid = (i + 0.5) * c.delta;
        c.w[static_cast<std::size_t>(i)] = nw * std::pow(mid, dim - 1.0) * c.delta;
    }
    return c;
}

inline chain_problem make_interval_chain(int nodes) {
    require(nodes >= 16, "interval chain: needs at least 16 nodes");
    chain_problem c;
    c.n = nodes;
    c.delta = 1.0 / nodes;
    c.left_pinned = true;
    c.w.assign(static_cast<std::size_t>(nodes), c.delta);
    c.radii.resize(static_cast<std::size_t>(nodes + 1));
    for (int i = 0; i <= nodes; ++i) c.radii[static_cast<std::size_t>(i)] = i * c.delta;
    return c;
}

namespace detail {

// Thomas solve of the p=2 chain system A v = b on free nodes.
inline void chain_thomas(const chain_problem& c, const std::vector<real>& b,
                         std::vector<real>& v) {
    const int n = c.n;
    const int lo = c.left_pinned ? 1 : 0;
    const int hi = n - 1; // node n pinned
    const int m = hi - lo + 1;
    if (m <= 0) return;
    auto stiff = [&](int cell) { return c.w[static_cast<std::size_t>(cell)] / (c.delta * c.delta); };
    std::vector<real> diag(static_cast<std::size_t>(m)), off(static_cast<std::size_t>(m)),
        rhs(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const int node = lo + j;
        real dd = 0;
        if (node > 0) dd += stiff(node - 1);
        if (node < n) dd += stiff(node);
        diag[static_cast<std::size_t>(j)] = dd;
        off[static_cast<std::size_t>(j)] = node < hi ? -stiff(node) : 0.0;
        rhs[static_cast<std::size_t>(j)] = b[static_cast<std::size_t>(node)];
    }
    for (int j = 1; j < m; ++j) {
        const real f = off[static_cast<std::size_t>(j - 1)] / diag[static_cast<std::size_t>(j - 1)];
        diag[static_cast<std::size_t>(j)] -= f * off[static_cast<std::size_t>(j - 1)];
        rhs[static_cast<std::size_t>(j)] -= f * rhs[static_cast<std::size_t>(j - 1)];
    }
    v[static_cast<std::size_t>(hi)] = rhs[static_cast<std::size_t>(m - 1)] / diag[static_cast<std::size_t>(m - 1)];
    for (int j = m - 2; j >= 0; --j) {
        const int node = lo + j;
        v[static_cast<std::size_t>(node)] =
            (rhs[static_cast<std::size_t>(j)] -
             off[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(node + 1)]) /
            diag[static_cast<std::size_t>(j)];
    }
}

struct chain_lane_emden_obj {
    const chain_problem& c;
    real p, q;
    std::vector<real> scratch;
    real value(const std::vector<real>& u) { return c.energy(u, p) / p - c.mass(u, q) / q; }
    real value_grad(const std::vector<real>& u, std::vector<real>& grad) {
        c.energy_grad(u, p, grad);
        for (auto& x : grad) x /= p;
        c.mass_grad(u, q, grad, -1.0 / q);
        return c.energy(u, p) / p - c.mass(u, q) / q;
    }
    void diag_precond(const std::vector<real>& u, std::vector<real>& diag) {
        c.energy_hessian_diag(u, p, diag);
        for (auto& x : diag) x /= p;
    }
};

struct chain_energy_linear_obj {
    const chain_problem& c;
    real p;
    const std::vector<real>* b;
    real value(const std::vector<real>& u) {
        real e = c.energy(u, p) / p;
        if (b)
            for (std::size_t i = 0; i < u.size(); ++i) e -= (*b)[i] * u[i];
        return e;
    }
    real value_grad(const std::vector<real>& u, std::vector<real>& grad) {
        c.energy_grad(u, p, grad);
        real e = c.energy(u, p) / p;
        for (std::size_t i = 0; i < u.size(); ++i) {
            grad[i] /= p;
            if (b) {
                grad[i] -= (*b)[i];
                e -= (*b)[i] * u[i];
            }
        }
        return e;
    }
    void diag_precond(const std::vector<real>& u, std::vector<real>& diag) {
        c.energy_hessian_diag(u, p, diag);
        for (auto& x : diag) x /= p;
    }
};

inline std::vector<real> chain_distance_profile(const chain_problem& c) {
    std::vector<real> u(static_cast<std::size_t>(c.n + 1), 0.0);
    const real R = c.radii.back();
    for (int i = 0; i <= c.n; ++i) {
        const real r = c.radii[static_cast<std::size_t>(i)];
        u[static_cast<std::size_t>(i)] = c.left_pinned ? std::min(r, R - r) : R - r;
    }
    return u;
}

} // namespace detail

// Lane-Emden solve on a chain (q < p): same identities and rescaling as the
// grid route, reported with the radial profile.
inline solve_report chain_lane_emden(const chain_problem& c, real p, real q,
                                     const solver_options& opts = {}) {
    require(q >= 1 && q < p, "chain_lane_emden: requires 1 <= q < p");
    auto mask = c.free_mask();
    auto u = detail::chain_distance_profile(c);
    auto rescale_opt = [&](std::vector<real>& v) {
        const real e = c.energy(v, p), m = c.mass(v, q);
        if (e <= 0 || m <= 0) return;
        const real t = std::pow(m / e, 1.0 / (p - q));
        for (std::size_t i = 0; i < v.size(); ++i)
            if (mask[i]) v[i] *= t;
    };
    rescale_opt(u);

    solve_report rep;
    rep.route = solve_route::radial;
    long iters = 0;
    if (p == 2.0 && q == 1.0) {
        // torsion: linear system A u = b with b from the mass gradient
        std::vector<real> b(u.size(), 0.0);
        c.mass_grad(std::vector<real>(u.size(), 1.0), 1.0, b, 1.0);
        detail::chain_thomas(c, b, u);
        iters = 1;
    } else {
        detail::chain_lane_emden_obj obj{c, p, q, {}};
        descent_options dopt;
        dopt.tol = opts.tol > 0 ? opts.tol : 1e-10;
        dopt.max_iter = opts.max_iter;
        dopt.clamp_lo = 0;
        auto drep = minimize(obj, u, mask, dopt);
        iters = drep.iterations;
        if (!drep.converged)
            throw std::runtime_error("chain_lane_emden: descent exhausted its budget");
    }
    rescale_opt(u);
    const real e = c.energy(u, p), m = c.mass(u, q);
    rep.residual_energy_identity = std::abs(e - m) / std::max(m, 1e-300);
    rep.log_constant = -(p - q) / q * std::log(m);
    rep.constant = std::exp(rep.log_constant);
    rep.constant_root_p = std::exp(rep.log_constant / p);
    rep.functional_value = e / p - m / q;
    const real minprob_target = (q - p) / (p * q) * m;
    rep.residual_minimum_identity = std::abs(rep.functional_value - minprob_target) /
                                    std::max(std::abs(minprob_target), 1e-300);
    rep.iterations = iters;
    rep.center_value = u.front();
    rep.extras["sup_w"] = *std::max_element(u.begin(), u.end());
    rep.radial_profile = std::move(u);
    return rep;
}

// q = p inverse power iteration on a chain; p = 2 inner solves are direct.
inline solve_report chain_pp(const chain_problem& c, real p, const solver_options& opts = {}) {
    require(p > 1, "chain_pp: requires p > 1");
    auto mask = c.free_mask();
    auto u = detail::chain_distance_profile(c);
    {
        const real m = c.mass(u, p);
        const real s = std::pow(m, -1.0 / p);
        for (auto& x : u) x *= s;
    }
    const real tol = opts.tol > 0 ? opts.tol : 1e-10;
    real lambda = c.energy(u, p);
    std::vector<real> b(u.size());
    long iters = 0;
    bool converged = false;
    for (int outer = 0; outer < 400; ++outer) {
        b.assign(u.size(), 0.0);
        c.mass_grad(u, p, b, 1.0 / p); // gradient of (1/p) M_p at u
        std::vector<real> v = u;
        if (p == 2.0) {
            detail::chain_thomas(c, b, v);
            ++iters;
        } else {
            detail::chain_energy_linear_obj obj{c, p, &b};
            descent_options dopt;
            dopt.tol = tol / 10;
            dopt.max_iter = opts.max_iter;
            dopt.clamp_lo = 0;
            auto drep = minimize(obj, v, mask, dopt);
            iters += drep.iterations;
        }
        const real m = c.mass(v, p);
        if (m <= 0) break;
        const real s = std::pow(m, -1.0 / p);
        for (std::size_t i = 0; i < v.size(); ++i) u[i] = mask[i] ? v[i] * s : 0.0;
        const real lam_new = c.energy(u, p) / c.mass(u, p);
        const real change = std::abs(lam_new - lambda);
        lambda = lam_new;
        if (outer >= 2 && change <= tol * std::max(lambda, 1e-300)) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("chain_pp: inverse iteration exhausted its budget");
    const real m = c.mass(u, p);
    const real s = std::pow(m, -1.0 / p);
    for (auto& x : u) x *= s;
    solve_report rep;
    rep.route = solve_route::radial;
    rep.constant = c.energy(u, p);
    rep.log_constant = std::log(rep.constant);
    rep.constant_root_p = std::pow(rep.constant, 1.0 / p);
    rep.residual_constraint = std::abs(c.mass(u, p) - 1.0);
    rep.iterations = iters;
    rep.center_value = u.front();
    rep.radial_profile = std::move(u);
    return rep;
}

// q = inf on a radial chain: exact discrete minimizer with constant flux,
// u(0) = 1, u(R) = 0 (requires p > N through the weight integrability).
inline solve_report chain_sup(const chain_problem& c, real p) {
    require(!c.left_pinned, "chain_sup: requires the radial chain (free center)");
    // |u'|^{p-2} u' w_i = const: u' per cell proportional to w_i^{-1/(p-1)}
    std::vector<real> step(static_cast<std::size_t>(c.n));
    real total = 0;
    for (int i = 0; i < c.n; ++i) {
        step[static_cast<std::size_t>(i)] =
            std::pow(c.w[static_cast<std::size_t>(i)] / c.delta, -1.0 / (p - 1.0)) * c.delta;
        total += step[static_cast<std::size_t>(i)];
    }
    std::vector<real> u(static_cast<std::size_t>(c.n + 1), 0.0);
    u[0] = 1.0;
    real acc = 0;
    for (int i = 0; i < c.n; ++i) {
        acc += step[static_cast<std::size_t>(i)];
        u[static_cast<std::size_t>(i + 1)] = 1.0 - acc / total;
    }
    solve_report rep;
    rep.route = solve_route::radial;
    rep.constant = c.energy(u, p);
    rep.log_constant = std::log(rep.constant);
    rep.constant_root_p = std::pow(rep.constant, 1.0 / p);
    rep.center_value = 1.0;
    rep.iterations = 1;
    rep.radial_profile = std::move(u);
    return rep;
}

// p < q < inf on a chain: normalized quotient descent (upper bound label).
inline solve_report chain_super(const chain_problem& c, real p, real q,
                                const solver_options& opts = {}) {
    struct obj_t {
        const chain_problem& c;
        real p, q;
        real value(const std::vector<real>& u) {
            const real e = c.energy(u, p), m = c.mass(u, q);
            if (e <= 0 || m <= 0) return inf;
            return std::log(e) - (p / q) * std::log(m);
        }
        real value_grad(const std::vector<real>& u, std::vector<real>& grad) {
            const real e = c.energy(u, p), m = c.mass(u, q);
            grad.assign(u.size(), 0.0);
            if (e <= 0 || m <= 0) return inf;
            std::vector<real> ge;
            c.energy_grad(u, p, ge);
            for (std::size_t i = 0; i < u.size(); ++i) grad[i] = ge[i] / e;
            c.mass_grad(u, q, grad, -(p / q) / m);
            return std::log(e) - (p / q) * std::log(m);
        }
        void diag_precond(const std::vector<real>& u, std::vector<real>& diag) {
            c.energy_hessian_diag(u, p, diag);
            const real e = c.energy(u, p);
            if (e > 0)
                for (auto& x : diag) x /= e;
        }
    } obj{c, p, q};
    auto mask = c.free_mask();
    auto u = detail::chain_distance_profile(c);
    descent_options dopt;
    dopt.tol = opts.tol > 0 ? opts.tol : 1e-10;
    dopt.max_iter = opts.max_iter;
    dopt.clamp_lo = 0;
    auto drep = minimize(obj, u, mask, dopt);
    const real m = c.mass(u, q);
    const real s = std::pow(m, -1.0 / q);
    for (auto& x : u) x *= s;
    solve_report rep;
    rep.route = solve_route::radial;
    rep.upper_bound_only = true;
    rep.note = "nonconvex Rayleigh descent; value is an upper bound";
    rep.constant = c.energy(u, p);
    rep.log_constant = std::log(rep.constant);
    rep.constant_root_p = std::pow(rep.constant, 1.0 / p);
    rep.iterations = drep.iterations;
    rep.center_value = u.front();
    rep.radial_profile = std::move(u);
    return rep;
}

// lambda_{p,q}(B_R) through the radial reduction with weight r^{N-1}.
inline solve_report radial_ball_frequency(real p, real q, int dim, real radius, int nodes,
                                          const solver_options& opts = {}) {
    require(p > 1, "radial_ball_frequency: requires p > 1");
    auto c = make_radial_chain(dim, radius, nodes);
    if (std::isinf(q)) {
        require(p > dim, "radial_ball_frequency: q = inf requires p > N");
        return chain_sup(c, p);
    }
    require(q >= 1, "radial_ball_frequency: requires q >= 1");
    if (q < p) return chain_lane_emden(c, p, q, opts);
    if (q == p) return chain_pp(c, p, opts);
    return chain_super(c, p, q, opts);
}

// One-dimensional constant pi_{p,q} = lambda_{p,q}((0,1))^{1/p} with the (A4)
// lower bound asserted: a violation signals a solver bug, since the discrete
// infimum over the piecewise-linear subspace can only overestimate.
inline solve_report pi_pq(real p, real q, int nodes, const solver_options& opts = {}) {
    require(p > 1 && q >= 1 && std::isfinite(q), "pi_pq: requires p > 1, 1 <= q < inf");
    auto c = make_interval_chain(nodes);
    solve_report rep;
    if (q < p)
        rep = chain_lane_emden(c, p, q, opts);
    else if (q == p)
        rep = chain_pp(c, p, opts);
    else
        rep = chain_super(c, p, q, opts);
    rep.route = solve_route::one_d;
    const real pi_value = std::exp(rep.log_constant / p);
    rep.constant_root_p = pi_value;
    const real bound = pi_pq_lower_bound(p, q);
    rep.extras["pi"] = pi_value;
    rep.extras["a4_bound"] = bound;
    rep.extras["a4_margin"] = pi_value - bound;
    if (pi_value < bound * (1.0 - 1e-9)) {
        std::ostringstream s;
        s << "pi_pq: computed pi_{p,q} = " << pi_value << " violates the lower bound " << bound
          << " (solver bug)";
        throw std::runtime_error(s.str());
    }
    return rep;
}

} // namespace pflab
