#pragma once

#include "pflab/calculus.hpp"

namespace pflab {

struct descent_options {
    real tol = 1e-6;      // relative per-iteration decrease threshold
    long max_iter = 100000;
    int stall_iters = 5;  // consecutive stagnant iterations before stopping
    real clamp_lo = -inf; // projection bounds applied after every step
    real clamp_hi = inf;
    real grad_tol = 0;    // 2-norm gradient threshold on free coords (0: off)
};

struct descent_report {
    long iterations = 0;
    bool converged = false;
    real value = 0;
};

// Projected descent with backtracking line search. Directions are the
// steepest-descent directions with Polak-Ribiere momentum, normalized to
// unit max magnitude so the step length lives in field units (stable for
// large p). Momentum resets whenever the projection becomes active.
//
// Obj must provide:
//   real value(const std::vector<real>& v)
//   real value_grad(const std::vector<real>& v, std::vector<real>& grad)
// and may provide a Jacobi scale for the stiff large-p energies:
//   void diag_precond(const std::vector<real>& v, std::vector<real>& diag)
template <class Obj>
descent_report minimize(Obj&& obj, std::vector<real>& v,
                        const std::vector<std::uint8_t>& free_mask,
                        const descent_options& opt) {
    const std::size_t n = v.size();
    constexpr bool has_precond = requires(Obj& o, const std::vector<real>& x,
                                          std::vector<real>& d) { o.diag_precond(x, d); };
    auto project = [&](std::vector<real>& x) {
        if (opt.clamp_lo == -inf && opt.clamp_hi == inf) return false;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!free_mask[i]) continue;
            const real c = std::clamp(x[i], opt.clamp_lo, opt.clamp_hi);
            if (c != x[i]) {
                x[i] = c;
                changed = true;
            }
        }
        return changed;
    };
    project(v);

    std::vector<real> grad(n), pgrad(n), prev_pgrad, prev_grad, dir(n, 0.0), trial(n), diag;
    descent_report rep;
    real f = obj.value_grad(v, grad);
    rep.value = f;
    real step = 1.0;
    int stall = 0;
    bool have_prev = false;

    auto precondition = [&]() {
        if constexpr (has_precond) {
            obj.diag_precond(v, diag);
            for (std::size_t i = 0; i < n; ++i) pgrad[i] = grad[i] / diag[i];
        } else {
            pgrad = grad;
        }
    };
    precondition();
    auto grad_small = [&]() {
        if (opt.grad_tol <= 0) return false;
        real g2 = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (free_mask[i]) g2 += grad[i] * grad[i];
        return std::sqrt(g2) <= opt.grad_tol;
    };
    if (grad_small()) {
        rep.converged = true;
        rep.value = f;
        return rep;
    }

    for (long it = 0; it < opt.max_iter; ++it) {
        // Polak-Ribiere+ momentum on the preconditioned free coordinates
        real beta = 0;
        if (have_prev) {
            real num = 0, den = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!free_mask[i]) continue;
                num += pgrad[i] * (grad[i] - prev_grad[i]);
                den += prev_pgrad[i] * prev_grad[i];
            }
            beta = den > 0 ? std::max<real>(0, num / den) : 0;
        }
        real dg = 0, dmax = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!free_mask[i]) {
                dir[i] = 0;
                continue;
            }
            dir[i] = -pgrad[i] + beta * dir[i];
            dg += dir[i] * grad[i];
        }
        if (dg >= 0) { // not a descent direction: restart with steepest
            dg = 0;
            for (std::size_t i = 0; i < n; ++i) {
                dir[i] = free_mask[i] ? -pgrad[i] : 0.0;
                dg += dir[i] * grad[i];
            }
        }
        for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(dir[i]));
        if (dmax == 0) {
            rep.converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) dir[i] /= dmax;
        dg /= dmax;

        // backtracking Armijo line search
        real t = std::min<real>(step * 2.0, 1e6);
        bool accepted = false;
        bool projected = false;
        real f_new = f;
        for (int ls = 0; ls < 60; ++ls) {
            trial = v;
            for (std::size_t i = 0; i < n; ++i)
                if (free_mask[i]) trial[i] += t * dir[i];
            projected = project(trial);
            f_new = obj.value(trial);
            real gain = 0;
            if (projected) {
                for (std::size_t i = 0; i < n; ++i)
                    if (free_mask[i]) gain += grad[i] * (trial[i] - v[i]);
            } else {
                gain = t * dg;
            }
            if (f_new <= f + 1e-4 * gain && std::isfinite(f_new)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        ++rep.iterations;
        if (!accepted) {
            if (beta > 0) { // retry pure steepest next round
                have_prev = false;
                continue;
            }
            rep.converged = true;
            break;
        }
        const real decrease = f - f_new;
        v.swap(trial);
        step = t;
        prev_grad = grad;
        prev_pgrad = pgrad;
        f = obj.value_grad(v, grad);
        precondition();
        have_prev = !projected;
        if (grad_small()) {
            rep.converged = true;
            break;
        }
        if (decrease <= opt.tol * (std::abs(f) + 1e-300)) {
            if (++stall >= opt.stall_iters) {
                rep.converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }
    rep.value = f;
    return rep;
}

// Apply the weighted stiffness operator (A_a x)_i = d/dx_i of
// (1/2) sum_c a_c |grad x|_c^2 h^N with per-cell coefficients a_c.
inline void weighted_stiffness_apply(const grid& g, const std::vector<real>& a,
                                     const std::vector<real>& x, std::vector<real>& out) {
    out.assign(x.size(), 0.0);
    const real hfac = std::pow(g.h, g.dim) / (g.h * g.h);
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        const real ac = a[cell];
        if (ac <= 0) return;
        const real coef = ac * hfac;
        for (int i = 0; i < g.dim; ++i) {
            const std::size_t f1 = f0 + g.stride(i);
            const real diff = x[f1] - x[f0];
            out[f1] += coef * diff;
            out[f0] -= coef * diff;
        }
    });
}

// Jacobi-preconditioned CG for the weighted system A_a v = b on the free
// nodes; fixed entries of v act as Dirichlet data. The preconditioner is
// essential: the coefficients a_c span many orders of magnitude for large p.
inline long cg_weighted(const grid& g, const std::vector<real>& a, std::vector<real>& v,
                        const std::vector<real>& b, const std::vector<std::uint8_t>& free_mask,
                        real rel_tol, long max_iter) {
    const std::size_t n = v.size();
    std::vector<real> av(n), r(n), z(n), p(n), ap(n), dinv(n, 0.0);
    const real hfac = std::pow(g.h, g.dim) / (g.h * g.h);
    g.for_each_cell([&](std::size_t cell, std::size_t f0) {
        if (a[cell] <= 0) return;
        const real coef = a[cell] * hfac;
        for (int i = 0; i < g.dim; ++i) {
            dinv[f0] += coef;
            dinv[f0 + g.stride(i)] += coef;
        }
    });
    for (std::size_t i = 0; i < n; ++i) dinv[i] = dinv[i] > 0 ? 1.0 / dinv[i] : 0.0;

    weighted_stiffness_apply(g, a, v, av);
    real rr = 0, bb = 0, rz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = free_mask[i] ? b[i] - av[i] : 0.0;
        z[i] = r[i] * dinv[i];
        rr += r[i] * r[i];
        rz += r[i] * z[i];
        if (free_mask[i]) bb += b[i] * b[i];
    }
    const real ref = std::max(bb, rr);
    if (rr == 0 || rr <= rel_tol * rel_tol * ref) return 0;
    p = z;
    long it = 0;
    for (; it < max_iter; ++it) {
        weighted_stiffness_apply(g, a, p, ap);
        real pap = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (free_mask[i]) pap += p[i] * ap[i];
        if (pap <= 0) break;
        const real alpha = rz / pap;
        real rr_new = 0, rz_new = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!free_mask[i]) continue;
            v[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * dinv[i];
            rr_new += r[i] * r[i];
            rz_new += r[i] * z[i];
        }
        if (rr_new <= rel_tol * rel_tol * ref) {
            ++it;
            break;
        }
        const real beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = free_mask[i] ? z[i] + beta * p[i] : 0.0;
    }
    return it;
}

struct kacanov_report {
    long outer = 0;
    long cg_total = 0;
    bool converged = false;
    real residual = 0;
};

// Damped Kacanov (lagged diffusivity) for minimizing (1/p) E_p(v) - b.v with
// p >= 2: freeze a_c = w_c |grad v|^{p-2}, solve the weighted Poisson system,
// backtrack on the true objective. The nonlinear residual b - A_{a(v)} v is
// the exact gradient of the objective, which gives a clean stopping rule.
inline kacanov_report kacanov_solve(const grid& g, real p, const std::vector<real>* b,
                                    const std::vector<std::uint8_t>& free_mask,
                                    std::vector<real>& v, real rel_tol,
                                    const std::vector<real>* cell_w = nullptr,
                                    long max_outer = 200) {
    kacanov_report rep;
    const std::size_t n = v.size();
    const std::size_t ncells = g.cell_count();
    std::vector<real> a(ncells), av(n), resid(n), trial(n);
    auto objective = [&](const std::vector<real>& x) {
        real val = p_energy_raw(g, x, p, cell_w).value / p;
        if (b)
            for (std::size_t i = 0; i < n; ++i) val -= (*b)[i] * x[i];
        return val;
    };
    std::vector<std::uint8_t> active(ncells, 1);
    if (cell_w)
        for (std::size_t c = 0; c < ncells; ++c) active[c] = (*cell_w)[c] > 0 ? 1 : 0;
    auto coeffs = [&](const std::vector<real>& x) {
        real amax = 0;
        g.for_each_cell([&](std::size_t cell, std::size_t f0) {
            if (!active[cell]) {
                a[cell] = 0;
                return;
            }
            const real w = cell_w ? (*cell_w)[cell] : 1.0;
            const real g2 = detail::cell_grad2(g, x, f0);
            a[cell] = g2 > 0 ? w * std::pow(g2, 0.5 * p - 1.0) : 0.0;
            amax = std::max(amax, a[cell]);
        });
        const real floor_val = amax > 0 ? 1e-12 * amax : 1.0;
        for (std::size_t c = 0; c < ncells; ++c)
            if (active[c]) a[c] = std::max(a[c], floor_val);
    };
    real ref = 0;
    if (b) {
        for (std::size_t i = 0; i < n; ++i)
            if (free_mask[i]) ref += (*b)[i] * (*b)[i];
        ref = std::sqrt(ref);
    }
    real fval = objective(v);
    for (long outer = 0; outer < max_outer; ++outer) {
        ++rep.outer;
        coeffs(v);
        // nonlinear residual = -gradient of the objective at v
        weighted_stiffness_apply(g, a, v, av);
        real rr = 0;
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] = free_mask[i] ? (b ? (*b)[i] : 0.0) - av[i] : 0.0;
            rr += resid[i] * resid[i];
        }
        rep.residual = std::sqrt(rr);
        if (outer == 0 && ref == 0) ref = rep.residual;
        if (rep.residual <= rel_tol * std::max(ref, 1e-300)) {
            rep.converged = true;
            break;
        }
        trial = v;
        std::vector<real> rhs(n, 0.0);
        if (b) rhs = *b;
        rep.cg_total += cg_weighted(g, a, trial, rhs, free_mask, 0.05, 10000);
        // damping on the true objective
        real t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            std::vector<real> cand(n);
            for (std::size_t i = 0; i < n; ++i)
                cand[i] = free_mask[i] ? v[i] + t * (trial[i] - v[i]) : v[i];
            const real fc = objective(cand);
            if (fc <= fval) {
                v.swap(cand);
                fval = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break; // stationary within rounding
    }
    return rep;
}

// Conjugate gradient for the p=2 problems: minimize (1/2) u^T A u - b^T u on
// the free nodes, where A u is applied through the quadratic energy gradient.
// Returns the iteration count.
inline long cg_quadratic(const grid& g, std::vector<real>& v, const std::vector<real>& b,
                         const std::vector<std::uint8_t>& free_mask, real rel_tol,
                         long max_iter) {
    const std::size_t n = v.size();
    std::vector<real> av(n), r(n), p(n), ap(n);
    auto apply = [&](const std::vector<real>& x, std::vector<real>& out) {
        p_energy_grad(g, x, 2.0, out);
        for (std::size_t i = 0; i < n; ++i) out[i] = free_mask[i] ? 0.5 * out[i] : 0.0;
    };
    apply(v, av);
    real rr = 0, bb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = free_mask[i] ? b[i] - av[i] : 0.0;
        rr += r[i] * r[i];
        if (free_mask[i]) bb += b[i] * b[i];
    }
    const real ref = std::max(bb, rr); // absolute scale, warm starts stop early
    if (rr == 0 || rr <= rel_tol * rel_tol * ref) return 0;
    p = r;
    long it = 0;
    for (; it < max_iter; ++it) {
        apply(p, ap);
        real pap = 0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0) break;
        const real alpha = rr / pap;
        real rr_new = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!free_mask[i]) continue;
            v[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            rr_new += r[i] * r[i];
        }
        if (rr_new <= rel_tol * rel_tol * ref) {
            ++it;
            break;
        }
        const real beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = free_mask[i] ? r[i] + beta * p[i] : 0.0;
    }
    return it;
}

} // namespace pflab
