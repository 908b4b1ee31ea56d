#pragma once

#include <map>

#include "pflab/opt.hpp"

namespace pflab {

enum class solve_route {
    lane_emden,
    inverse_iteration,
    point_sup,
    radial,
    one_d,
    point_constrained,
    hardy
};

inline const char* route_name(solve_route r) {
    switch (r) {
        case solve_route::lane_emden: return "lane_emden";
        case solve_route::inverse_iteration: return "inverse_iteration";
        case solve_route::point_sup: return "point_sup";
        case solve_route::radial: return "radial";
        case solve_route::one_d: return "one_d";
        case solve_route::point_constrained: return "point_constrained";
        case solve_route::hardy: return "hardy";
    }
    return "?";
}

struct solve_report {
    real constant = 0;        // lambda, mu, h, or pi estimate
    real constant_root_p = 0; // constant^{1/p}
    real log_constant = 0;
    grid_field extremal;               // grid routes
    std::vector<real> radial_profile;  // radial / 1-D routes
    real residual_energy_identity = 0; // (pqnorm) relative residual
    real residual_minimum_identity = 0;
    real residual_stationarity = 0;
    real residual_constraint = 0;
    long iterations = 0;
    solve_route route = solve_route::lane_emden;
    bool upper_bound_only = false;
    std::vector<std::size_t> peak_candidates; // q = inf ties within tolerance
    real center_value = 0;                    // radial: w(0)
    real functional_value = 0;                // F_{p,q}(w)
    std::map<std::string, real> extras;
    std::string note;
};

struct solver_options {
    real tol = 0;          // 0: pick by dimension (1e-8 1-D, 1e-6 otherwise)
    long max_iter = 100000;
    real identity_tol = 1e-5;
    bool exhaustive_peaks = false; // q = inf: try every interior node
    real hardy_clamp = 0;          // 0: default h/2
};

inline real pick_tol(const solver_options& o, int dim) {
    if (o.tol > 0) return o.tol;
    return dim == 1 ? 1e-8 : 1e-6;
}

namespace detail {

inline std::vector<std::uint8_t> interior_mask(const grid& g) {
    std::vector<std::uint8_t> m(g.node_count(), 0);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (g.cls[i] == node_class::interior) m[i] = 1;
    return m;
}

// Lane-Emden functional F(u) = (1/p) E(u) - (1/q) int |u|^q.
struct lane_emden_obj {
    const grid& g;
    real p, q;
    std::vector<real> scratch;

    real value(const std::vector<real>& v) {
        const real e = p_energy_raw(g, v, p).value;
        return e / p - lq_integral(g, v, q) / q;
    }
    real value_grad(const std::vector<real>& v, std::vector<real>& grad) {
        const real e = p_energy_grad(g, v, p, grad).value;
        for (auto& x : grad) x /= p;
        lq_integral_grad(g, v, q, grad, -1.0 / q);
        return e / p - lq_integral(g, v, q) / q;
    }
    void diag_precond(const std::vector<real>& v, std::vector<real>& diag) {
        p_energy_hessian_diag(g, v, p, diag);
        for (auto& x : diag) x /= p;
    }
};

// plain p-energy with optional cell weights and fixed linear term:
// G(v) = (1/p) E(v) - b.v
struct energy_linear_obj {
    const grid& g;
    real p;
    const std::vector<real>* b = nullptr;
    const std::vector<real>* cell_w = nullptr;

    real value(const std::vector<real>& v) {
        real e = p_energy_raw(g, v, p, cell_w).value / p;
        if (b)
            for (std::size_t i = 0; i < v.size(); ++i) e -= (*b)[i] * v[i];
        return e;
    }
    real value_grad(const std::vector<real>& v, std::vector<real>& grad) {
        real e = p_energy_grad(g, v, p, grad, cell_w).value / p;
        for (std::size_t i = 0; i < v.size(); ++i) {
            grad[i] /= p;
            if (b) {
                grad[i] -= (*b)[i];
                e -= (*b)[i] * v[i];
            }
        }
        return e;
    }
    void diag_precond(const std::vector<real>& v, std::vector<real>& diag) {
        p_energy_hessian_diag(g, v, p, diag, cell_w);
        for (auto& x : diag) x /= p;
    }
};

// b_i for the linearized mass term: gradient of (1/p') int |u|^{p'} type
// couplings; here phi_c = |avg u|^{p-2} avg u per cell.
inline void linear_mass_vector(const grid& g, const std::vector<real>& u, real p,
                               std::vector<real>& b) {
    b.assign(u.size(), 0.0);
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
            avg += u[f];
        }
        avg *= scale;
        if (avg == 0) return;
        const real phi = std::pow(std::abs(avg), p - 2.0) * avg;
        const real coef = frac * hn * phi * scale;
        for (int corner = 0; corner < (1 << g.dim); ++corner) {
            std::size_t f = f0;
            for (int i = 0; i < g.dim; ++i)
                if (corner & (1 << i)) f += g.stride(i);
            b[f] += coef;
        }
    });
}

inline real scaled_stationarity(lane_emden_obj& obj, const std::vector<real>& v,
                                const std::vector<std::uint8_t>& mask) {
    std::vector<real> grad;
    const real f = obj.value_grad(v, grad);
    real gmax = 0, vmax = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!mask[i]) continue;
        gmax = std::max(gmax, std::abs(grad[i]));
        vmax = std::max(vmax, std::abs(v[i]));
    }
    return gmax * vmax / (std::abs(f) + 1e-300);
}

} // namespace detail

// Positive solution of -Delta_p w = w^{q-1} by direct minimization of the
// Lane-Emden functional, warm-started at the optimally rescaled distance
// field. On success the (pqnorm) and (minprob) identities are verified and
// lambda_{p,q} = (int w^q)^{-(p-q)/q} is reported.
inline solve_report solve_lane_emden(grid_ptr gp, real p, real q,
                                     const solver_options& opts = {}) {
    const grid& g = *gp;
    require(p > 1, "solve_lane_emden: requires p > 1");
    require(q >= 1 && q < p, "solve_lane_emden: requires 1 <= q < p");
    require(count_class(g, node_class::interior) > 0, "solve_lane_emden: empty interior");
    require(interior_components(g) == 1,
            "solve_lane_emden: interior is disconnected (flood fill found several components)");

    solve_report rep;
    rep.route = solve_route::lane_emden;

    grid_field w = distance_field(gp);
    auto mask = detail::interior_mask(g);

    auto rescale_opt = [&](std::vector<real>& v) {
        const real e = p_energy_raw(g, v, p).value;
        const real m = lq_integral(g, v, q);
        if (e <= 0 || m <= 0) return;
        const real t = std::pow(m / e, 1.0 / (p - q));
        for (std::size_t i = 0; i < v.size(); ++i)
            if (mask[i]) v[i] *= t;
    };
    rescale_opt(w.v);

    detail::lane_emden_obj obj{g, p, q, {}};
    const real tol = pick_tol(opts, g.dim);
    descent_report drep;
    if (p >= 2.0) {
        // source iteration -Delta_p u_{k+1} = u_k^{q-1} with Kacanov inner
        // solves; for q = 1 the source is constant and one solve suffices
        std::vector<real> b(w.v.size(), 0.0);
        real m_prev = -1;
        for (int outer = 0; outer < 200; ++outer) {
            b.assign(w.v.size(), 0.0);
            lq_integral_grad(g, w.v, q, b, 1.0 / q);
            auto krep = kacanov_solve(g, p, &b, mask, w.v, tol / 10.0);
            drep.iterations += krep.outer + krep.cg_total;
            for (std::size_t i = 0; i < w.v.size(); ++i)
                if (mask[i]) w.v[i] = std::max<real>(w.v[i], 0.0);
            rescale_opt(w.v);
            const real m = lq_integral(g, w.v, q);
            if (m_prev > 0 && std::abs(m - m_prev) <= tol * m) {
                drep.converged = true;
                break;
            }
            m_prev = m;
        }
    } else {
        descent_options dopt;
        dopt.tol = tol;
        dopt.max_iter = opts.max_iter;
        dopt.clamp_lo = 0; // the minimizer is nonnegative
        drep = minimize(obj, w.v, mask, dopt);
    }
    rescale_opt(w.v);

    const real e = p_energy_raw(g, w.v, p).value;
    const real m = lq_integral(g, w.v, q);
    rep.residual_energy_identity = std::abs(e - m) / std::max(m, 1e-300);
    const real log_m = std::log(m);
    rep.log_constant = -(p - q) / q * log_m;
    rep.constant = std::exp(rep.log_constant);
    rep.constant_root_p = std::exp(rep.log_constant / p);
    rep.functional_value = e / p - m / q;
    const real minprob_target = (q - p) / (p * q) * m; // lambda^{-q/(p-q)} = m
    rep.residual_minimum_identity =
        std::abs(rep.functional_value - minprob_target) / std::max(std::abs(minprob_target), 1e-300);
    rep.residual_stationarity = detail::scaled_stationarity(obj, w.v, mask);
    rep.iterations = drep.iterations;
    rep.extremal = std::move(w);
    rep.center_value = lq_norm(rep.extremal, inf);

    if (!drep.converged ||
        rep.residual_energy_identity > opts.identity_tol ||
        rep.residual_minimum_identity > opts.identity_tol) {
        std::ostringstream s;
        s << "solve_lane_emden: no convergence within budget (iterations=" << drep.iterations
          << ", pqnorm residual=" << rep.residual_energy_identity
          << ", minprob residual=" << rep.residual_minimum_identity << ")";
        throw std::runtime_error(s.str());
    }
    return rep;
}

// Inverse power iteration for q = p: repeat v = argmin (1/p)E(v) - <|u|^{p-2}u, v>,
// u = v/||v||_p, until the Rayleigh quotient stabilizes.
inline solve_report principal_frequency_pp(grid_ptr gp, real p, const solver_options& opts = {}) {
    const grid& g = *gp;
    require(p > 1, "principal_frequency: requires p > 1");
    require(count_class(g, node_class::interior) > 0, "principal_frequency: empty interior");
    solve_report rep;
    rep.route = solve_route::inverse_iteration;
    auto mask = detail::interior_mask(g);

    grid_field u = distance_field(gp);
    {
        const real nn = lq_norm(u, p);
        require(nn > 0, "principal_frequency: distance field vanishes");
        for (auto& x : u.v) x /= nn;
    }
    const real tol = pick_tol(opts, g.dim);
    real lambda = p_energy_raw(g, u.v, p).value;
    std::vector<real> b;
    long total_iters = 0;
    bool converged = false;
    for (int outer = 0; outer < 600; ++outer) {
        detail::linear_mass_vector(g, u.v, p, b);
        std::vector<real> v = u.v;
        {
            // rescale the warm start to the inner problem's magnitude:
            // min over s of (1/p) E(u) s^p - s b.u
            const real e0 = p_energy_raw(g, v, p).value;
            real bu = 0;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (mask[i]) bu += b[i] * v[i];
            if (e0 > 0 && bu > 0) {
                const real s = std::pow(bu / e0, 1.0 / (p - 1.0));
                for (std::size_t i = 0; i < v.size(); ++i)
                    if (mask[i]) v[i] *= s;
            }
        }
        if (p >= 2.0) {
            auto krep = kacanov_solve(g, p, &b, mask, v, tol / 10.0);
            total_iters += krep.outer + krep.cg_total;
        } else {
            detail::energy_linear_obj obj{g, p, &b, nullptr};
            descent_options dopt;
            dopt.tol = tol / 10.0;
            dopt.max_iter = opts.max_iter;
            dopt.clamp_lo = 0;
            real b2 = 0;
            for (std::size_t i = 0; i < b.size(); ++i)
                if (mask[i]) b2 += b[i] * b[i];
            dopt.grad_tol = (tol / 10.0) * std::sqrt(b2);
            auto drep = minimize(obj, v, mask, dopt);
            total_iters += drep.iterations;
        }
        real nn = 0;
        {
            grid_field tmp{gp, v};
            nn = lq_norm(tmp, p);
        }
        if (nn <= 0) break;
        for (std::size_t i = 0; i < v.size(); ++i) u.v[i] = mask[i] ? v[i] / nn : 0.0;
        const real lam_new = p_energy_raw(g, u.v, p).value / lq_integral(g, u.v, p);
        const real change = std::abs(lam_new - lambda);
        lambda = lam_new;
        if (outer >= 2 && change <= tol * std::max(lambda, 1e-300)) {
            converged = true;
            ++total_iters;
            break;
        }
    }
    // normalize the reported extremal against the quadrature norm exactly
    {
        const real nn = lq_norm(u, p);
        for (auto& x : u.v) x /= nn;
    }
    lambda = p_energy_raw(g, u.v, p).value;
    rep.constant = lambda;
    rep.log_constant = std::log(lambda);
    rep.constant_root_p = std::pow(lambda, 1.0 / p);
    rep.residual_constraint = std::abs(lq_norm(u, p) - 1.0);
    rep.iterations = total_iters;
    rep.extremal = std::move(u);
    if (!converged)
        throw std::runtime_error("principal_frequency: inverse iteration exhausted its budget");
    return rep;
}

// q = inf route: for each candidate peak x0 minimize the p-energy subject to
// u(x0) = 1, 0 <= u <= 1; lambda_{p,inf} is the deterministic minimum over
// candidates (local maxima of the distance field plus the global argmax).
inline solve_report principal_frequency_sup(grid_ptr gp, real p, const solver_options& opts = {}) {
    const grid& g = *gp;
    require(p > g.dim, "principal_frequency: q = inf requires p > N");
    solve_report rep;
    rep.route = solve_route::point_sup;
    auto mask = detail::interior_mask(g);
    grid_field d = distance_field(gp);

    std::vector<std::size_t> candidates;
    std::size_t global_argmax = inradius(d).argmax_node;
    if (opts.exhaustive_peaks) {
        for (std::size_t i = 0; i < d.v.size(); ++i)
            if (g.cls[i] == node_class::interior) candidates.push_back(i);
    } else {
        for (std::size_t i = 0; i < d.v.size(); ++i) {
            if (g.cls[i] != node_class::interior || d.v[i] <= 0) continue;
            const auto idx = g.unflat(i);
            bool is_max = true;
            for (int ax = 0; ax < g.dim && is_max; ++ax) {
                for (int dir : {-1, 1}) {
                    auto nb = idx;
                    nb[static_cast<std::size_t>(ax)] += dir;
                    if (nb[static_cast<std::size_t>(ax)] < 0 ||
                        nb[static_cast<std::size_t>(ax)] >= g.shape[static_cast<std::size_t>(ax)])
                        continue;
                    if (d.v[g.flat(nb)] > d.v[i]) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) candidates.push_back(i);
        }
        if (std::find(candidates.begin(), candidates.end(), global_argmax) == candidates.end())
            candidates.push_back(global_argmax);
        if (candidates.size() > 32) {
            std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
                if (d.v[a] != d.v[b]) return d.v[a] > d.v[b];
                return a < b;
            });
            candidates.resize(32);
            rep.note = "peak candidates pruned to the 32 deepest";
        }
        std::sort(candidates.begin(), candidates.end());
    }
    require(!candidates.empty(), "principal_frequency: no peak candidates (empty interior)");

    const real tol = pick_tol(opts, g.dim);
    real best = inf;
    std::size_t best_node = candidates.front();
    grid_field best_u;
    long total_iters = 0;
    std::vector<real> energies(candidates.size(), inf);
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const std::size_t x0 = candidates[ci];
        grid_field u = make_field(gp);
        const real d0 = d.v[x0];
        for (std::size_t i = 0; i < u.v.size(); ++i)
            if (mask[i]) u.v[i] = std::min<real>(1.0, d.v[i] / d0);
        u.v[x0] = 1.0;
        auto m = mask;
        m[x0] = 0;
        if (p >= 2.0) {
            auto krep = kacanov_solve(g, p, nullptr, m, u.v, tol);
            total_iters += krep.outer + krep.cg_total;
            // the discrete maximum principle keeps the solution in [0,1]
            for (std::size_t i = 0; i < u.v.size(); ++i)
                if (m[i]) u.v[i] = std::clamp<real>(u.v[i], 0.0, 1.0);
        } else {
            detail::energy_linear_obj obj{g, p, nullptr, nullptr};
            descent_options dopt;
            dopt.tol = tol;
            dopt.max_iter = opts.max_iter;
            dopt.clamp_lo = 0;
            dopt.clamp_hi = 1;
            auto drep = minimize(obj, u.v, m, dopt);
            total_iters += drep.iterations;
        }
        const real e = p_energy_raw(g, u.v, p).value;
        energies[ci] = e;
        if (e < best) {
            best = e;
            best_node = x0;
            best_u = std::move(u);
        }
    }
    for (std::size_t ci = 0; ci < candidates.size(); ++ci)
        if (energies[ci] <= best * (1.0 + 1e-6)) rep.peak_candidates.push_back(candidates[ci]);

    rep.constant = best;
    rep.log_constant = std::log(best);
    rep.constant_root_p = std::pow(best, 1.0 / p);
    rep.extremal = std::move(best_u);
    rep.residual_constraint = std::abs(lq_norm(rep.extremal, inf) - 1.0);
    rep.iterations = total_iters;
    rep.extras["peak_node"] = static_cast<real>(best_node);
    return rep;
}

// super-homogeneous route p < q < inf: normalized descent on the Rayleigh
// quotient; labeled an upper bound (no convexity certificate).
inline solve_report principal_frequency_super(grid_ptr gp, real p, real q,
                                              const solver_options& opts = {}) {
    const grid& g = *gp;
    require(p < q && std::isfinite(q), "principal_frequency: route requires p < q < inf");
    // admissibility: the q = p solve certifies lambda_p > 0 on this grid
    solver_options certify = opts;
    certify.tol = std::max(pick_tol(opts, g.dim), 1e-5);
    auto pp = principal_frequency_pp(gp, p, certify);
    require(pp.constant > 0, "principal_frequency: lambda_p certificate failed");

    solve_report rep;
    rep.route = solve_route::lane_emden; // descent on the quotient
    rep.upper_bound_only = true;
    rep.note = "nonconvex Rayleigh descent; value is an upper bound";
    auto mask = detail::interior_mask(g);

    struct quotient_obj {
        const grid& g;
        real p, q;
        real value(const std::vector<real>& v) {
            const real e = p_energy_raw(g, v, p).value;
            const real mq = lq_integral(g, v, q);
            if (e <= 0 || mq <= 0) return inf;
            return std::log(e) - (p / q) * std::log(mq);
        }
        real value_grad(const std::vector<real>& v, std::vector<real>& grad) {
            std::vector<real> ge;
            const real e = p_energy_grad(g, v, p, ge).value;
            const real mq = lq_integral(g, v, q);
            grad.assign(v.size(), 0.0);
            if (e <= 0 || mq <= 0) return inf;
            for (std::size_t i = 0; i < v.size(); ++i) grad[i] = ge[i] / e;
            lq_integral_grad(g, v, q, grad, -(p / q) / mq);
            return std::log(e) - (p / q) * std::log(mq);
        }
        void diag_precond(const std::vector<real>& v, std::vector<real>& diag) {
            p_energy_hessian_diag(g, v, p, diag);
            const real e = p_energy_raw(g, v, p).value;
            if (e > 0)
                for (auto& x : diag) x /= e;
        }
    } obj{g, p, q};

    grid_field u = pp.extremal;
    descent_options dopt;
    dopt.tol = pick_tol(opts, g.dim);
    dopt.max_iter = opts.max_iter;
    dopt.clamp_lo = 0;
    auto drep = minimize(obj, u.v, mask, dopt);
    const real nn = lq_norm(u, q);
    for (auto& x : u.v) x /= nn;
    rep.constant = p_energy_raw(g, u.v, p).value;
    rep.log_constant = std::log(rep.constant);
    rep.constant_root_p = std::pow(rep.constant, 1.0 / p);
    rep.residual_constraint = std::abs(lq_norm(u, q) - 1.0);
    rep.iterations = drep.iterations;
    rep.extremal = std::move(u);
    rep.extras["lambda_p_certificate"] = pp.constant;
    return rep;
}

// Generalized principal frequency lambda_{p,q} on a grid; dispatches on the
// regime of (p,q).
inline solve_report principal_frequency(grid_ptr gp, real p, real q,
                                        const solver_options& opts = {}) {
    require(p > 1, "principal_frequency: requires p > 1");
    if (std::isinf(q)) return principal_frequency_sup(gp, p, opts);
    require(q >= 1, "principal_frequency: requires q >= 1");
    if (q < p) {
        auto rep = solve_lane_emden(gp, p, q, opts);
        // normalized extremal: lambda^{1/(p-q)} w has unit L^q norm
        const real t = std::exp(rep.log_constant / (p - q));
        for (auto& x : rep.extremal.v) x *= t;
        rep.residual_constraint = std::abs(lq_norm(rep.extremal, q) - 1.0);
        return rep;
    }
    if (q == p) return principal_frequency_pp(gp, p, opts);
    return principal_frequency_super(gp, p, q, opts);
}

// Morrey-type constant mu_p(B_1): minimal p-energy over the ball with the two
// point constraints u(center) = 1, u(z) = 0 at a boundary node, free boundary
// otherwise. Cell energies carry exact in-ball volume fractions so the
// Holder monotonicity of (mu_p/omega_N)^{1/p} holds on a fixed grid.
inline solve_report morrey_mu(real p, int dim, int nodes_per_diameter,
                              const solver_options& opts = {}) {
    require(dim >= 1 && dim <= 3, "morrey_mu: dimension must be 1..3");
    require(p > dim, "morrey_mu: requires p > N");
    require(nodes_per_diameter >= 8, "morrey_mu: needs at least 8 nodes per diameter");
    auto dom = make_ball(dim, point{}, 1.0);
    const real h = 2.0 / nodes_per_diameter;
    auto gp = rasterize(dom, h);
    const grid& g = *gp;

    // dofs: nodes of any cell with positive in-ball volume
    std::vector<std::uint8_t> touches(g.node_count(), 0);
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        if (g.cell_frac[cell] <= 0) return;
        for (int corner = 0; corner < (1 << g.dim); ++corner) {
            std::size_t f = f0;
            for (int i = 0; i < g.dim; ++i)
                if (corner & (1 << i)) f += g.stride(i);
            touches[f] = 1;
        }
    });

    std::array<int, 3> cidx{0, 0, 0}, zidx{0, 0, 0};
    for (int i = 0; i < dim; ++i)
        cidx[static_cast<std::size_t>(i)] = (g.shape[static_cast<std::size_t>(i)] - 1) / 2;
    zidx = cidx;
    zidx[0] = g.shape[0] - 1; // z = (1, 0, ...)
    const std::size_t center = g.flat(cidx);
    const std::size_t znode = g.flat(zidx);
    require(touches[center] && touches[znode], "morrey_mu: constraint nodes not on the mesh");

    std::vector<real> v(g.node_count(), 0.0);
    const point zp = g.node_point(znode);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!touches[i]) continue;
        v[i] = std::min<real>(1.0, dist(g.node_point(i), zp, dim)); // feasible 1-Lipschitz cone
    }
    v[center] = 1.0;
    v[znode] = 0.0;
    auto mask = touches;
    mask[center] = 0;
    mask[znode] = 0;

    solve_report rep;
    if (p >= 2.0) {
        auto krep = kacanov_solve(g, p, nullptr, mask, v, pick_tol(opts, g.dim) * 0.1,
                                  &g.cell_frac, 500);
        rep.iterations = krep.outer + krep.cg_total;
        if (!krep.converged)
            throw std::runtime_error("morrey_mu: Kacanov iteration exhausted its budget");
    } else {
        detail::energy_linear_obj obj{g, p, nullptr, &g.cell_frac};
        descent_options dopt;
        dopt.tol = pick_tol(opts, g.dim) * 0.1;
        dopt.max_iter = opts.max_iter;
        auto drep = minimize(obj, v, mask, dopt);
        rep.iterations = drep.iterations;
        if (!drep.converged)
            throw std::runtime_error("morrey_mu: descent exhausted its budget");
    }
    rep.route = solve_route::point_constrained;
    rep.constant = p_energy_raw(g, v, p, &g.cell_frac).value;
    rep.log_constant = std::log(rep.constant);
    rep.constant_root_p = std::pow(rep.constant, 1.0 / p);
    rep.extremal = grid_field{gp, std::move(v)};
    const real wn = unit_ball_volume(dim);
    rep.extras["omega_n"] = wn;
    rep.extras["trial_slack"] = std::pow(wn, 1.0 / p) - rep.constant_root_p;
    return rep;
}

// Hardy constants: h_p (q = p) and h_{p,q} (p < q < inf) by normalized
// descent on the weighted Rayleigh quotient with the clamped distance
// weight; h_{p,inf} by convex point-constrained solves at the candidate
// peaks of the weight profile (the sup constraint is active at a peak).
inline solve_report hardy_constant(grid_ptr gp, const grid_field& d, real p, real q,
                                   const solver_options& opts = {}) {
    const grid& g = *gp;
    require(p > g.dim, "hardy_constant: requires p > N");
    require(q >= p, "hardy_constant: requires q in [p, inf]");
    auto mask = detail::interior_mask(g);
    require(count_class(g, node_class::interior) > 0, "hardy_constant: empty interior");

    const real clamp = opts.hardy_clamp > 0 ? opts.hardy_clamp : g.h;
    const real e_w = hardy_weight_exponent(p, q, g.dim);
    std::vector<real> wgt(g.node_count());
    for (std::size_t i = 0; i < wgt.size(); ++i)
        wgt[i] = 1.0 / std::pow(std::max(d.v[i], clamp), e_w);

    if (std::isinf(q)) {
        // sup-normalized: minimize E(u) with u(x0) = d~(x0)^{a_p} over the
        // peak candidates of the weight profile
        std::vector<real> profile(g.node_count(), 0.0);
        for (std::size_t i = 0; i < profile.size(); ++i)
            if (mask[i]) profile[i] = 1.0 / wgt[i]; // d~^{a_p}
        std::vector<std::size_t> candidates;
        real pmax = 0;
        std::size_t argmax = 0;
        for (std::size_t i = 0; i < profile.size(); ++i) {
            if (!mask[i]) continue;
            if (profile[i] > pmax) {
                pmax = profile[i];
                argmax = i;
            }
            const auto idx = g.unflat(i);
            bool is_max = true;
            for (int ax = 0; ax < g.dim && is_max; ++ax)
                for (int dir : {-1, 1}) {
                    auto nb = idx;
                    nb[static_cast<std::size_t>(ax)] += dir;
                    if (nb[static_cast<std::size_t>(ax)] < 0 ||
                        nb[static_cast<std::size_t>(ax)] >= g.shape[static_cast<std::size_t>(ax)])
                        continue;
                    if (profile[g.flat(nb)] > profile[i]) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) candidates.push_back(i);
        }
        if (std::find(candidates.begin(), candidates.end(), argmax) == candidates.end())
            candidates.push_back(argmax);
        if (candidates.size() > 16) {
            std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
                if (profile[a] != profile[b]) return profile[a] > profile[b];
                return a < b;
            });
            candidates.resize(16);
        }
        std::sort(candidates.begin(), candidates.end());

        const real tol = pick_tol(opts, g.dim);
        solve_report rep;
        rep.route = solve_route::hardy;
        real best = inf;
        grid_field best_u;
        long iters = 0;
        for (std::size_t x0 : candidates) {
            grid_field u = make_field(gp);
            for (std::size_t i = 0; i < u.v.size(); ++i)
                if (mask[i]) u.v[i] = std::min(profile[i], profile[x0] * d.v[i] / d.v[x0]);
            u.v[x0] = profile[x0];
            auto m = mask;
            m[x0] = 0;
            if (p >= 2.0) {
                auto krep = kacanov_solve(g, p, nullptr, m, u.v, tol);
                iters += krep.outer + krep.cg_total;
            } else {
                detail::energy_linear_obj obj{g, p, nullptr, nullptr};
                descent_options dopt;
                dopt.tol = tol;
                dopt.max_iter = opts.max_iter;
                dopt.clamp_lo = 0;
                iters += minimize(obj, u.v, m, dopt).iterations;
            }
            // honest quotient at the found field
            real supw = 0;
            for (std::size_t i = 0; i < u.v.size(); ++i)
                supw = std::max(supw, u.v[i] * wgt[i]);
            const real e = p_energy_raw(g, u.v, p).value / std::pow(supw, p);
            if (e < best) {
                best = e;
                best_u = std::move(u);
            }
        }
        rep.constant = best;
        rep.log_constant = std::log(best);
        rep.constant_root_p = std::pow(best, 1.0 / p);
        rep.iterations = iters;
        rep.extras["clamp"] = clamp;
        rep.extras["candidates"] = static_cast<real>(candidates.size());
        rep.extremal = std::move(best_u);
        return rep;
    }

    struct hardy_obj {
        const grid& g;
        real p, q;
        const std::vector<real>& wgt;
        std::vector<real> scratch;

        real weighted_term(const std::vector<real>& v, std::vector<real>* grad, real pref) {
            scratch.resize(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) scratch[i] = v[i] * wgt[i];
            const real mq = lq_integral(g, scratch, q);
            if (grad && mq > 0) {
                // chain rule through v -> v * wgt
                std::vector<real> tmp(v.size(), 0.0);
                lq_integral_grad(g, scratch, q, tmp, pref * (p / q) / mq);
                for (std::size_t i = 0; i < v.size(); ++i) (*grad)[i] += tmp[i] * wgt[i];
            }
            return mq > 0 ? (p / q) * std::log(mq) : -inf;
        }
        real value(const std::vector<real>& v) {
            const real e = p_energy_raw(g, v, p).value;
            if (e <= 0) return inf;
            const real wt = weighted_term(v, nullptr, 0);
            return std::log(e) - wt;
        }
        real value_grad(const std::vector<real>& v, std::vector<real>& grad) {
            std::vector<real> ge;
            const real e = p_energy_grad(g, v, p, ge).value;
            grad.assign(v.size(), 0.0);
            if (e <= 0) return inf;
            for (std::size_t i = 0; i < v.size(); ++i) grad[i] = ge[i] / e;
            const real wt = weighted_term(v, &grad, -1.0);
            return std::log(e) - wt;
        }
        void diag_precond(const std::vector<real>& v, std::vector<real>& diag) {
            p_energy_hessian_diag(g, v, p, diag);
            const real e = p_energy_raw(g, v, p).value;
            if (e > 0)
                for (auto& x : diag) x /= e;
        }
    } obj{g, p, q, wgt, {}};

    grid_field u = d; // zero-trace warm start
    descent_options dopt;
    dopt.tol = pick_tol(opts, g.dim);
    dopt.max_iter = opts.max_iter;
    dopt.clamp_lo = 0;
    auto drep = minimize(obj, u.v, mask, dopt);

    solve_report rep;
    rep.route = solve_route::hardy;
    rep.constant = std::exp(obj.value(u.v));
    rep.log_constant = obj.value(u.v);
    rep.constant_root_p = std::exp(rep.log_constant / p);
    rep.iterations = drep.iterations;
    rep.extras["clamp"] = clamp;
    const int n = g.dim;
    if (q == p) {
        const real bound = std::pow((p - n) / p, p);
        rep.extras["lower_bound"] = bound;
        rep.extras["lower_bound_slack"] = rep.constant - bound;
    }
    rep.extremal = std::move(u);
    if (!drep.converged)
        throw std::runtime_error("hardy_constant: descent exhausted its budget");
    return rep;
}

// q = p extremal with asymptotic diagnostics: sup norm, exact pairwise
// Lipschitz constant and the sup distance of u_p/||u_p||_inf to d/r.
inline solve_report eigen_asymptotics_extremal(grid_ptr gp, real p,
                                               const solver_options& opts = {}) {
    const grid& g = *gp;
    require(p > g.dim, "eigen_asymptotics_extremal: requires p > N");
    auto rep = principal_frequency_pp(gp, p, opts);
    grid_field d = distance_field(gp);
    const real r = inradius(d).value;
    const real sup = lq_norm(rep.extremal, inf);
    auto lip = holder_seminorm(rep.extremal, 1.0);
    real gap = 0;
    for (std::size_t i = 0; i < d.v.size(); ++i)
        gap = std::max(gap, std::abs(rep.extremal.v[i] / sup - d.v[i] / r));
    rep.extras["sup_norm"] = sup;
    rep.extras["lipschitz"] = lip.value / sup;
    rep.extras["lipschitz_exact"] = lip.exact ? 1.0 : 0.0;
    rep.extras["sup_gap_to_distance"] = gap;
    rep.extras["inradius"] = r;
    return rep;
}

} // namespace pflab
