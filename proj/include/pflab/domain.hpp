#pragma once

#include <optional>
#include <sstream>

#include "pflab/constants.hpp"
#include "pflab/quadrature.hpp"

namespace pflab {

// Profile of the slowly-shrinking strip: f_alpha(t) = 1/log(2 + (t/alpha)^2).
inline real strip_profile(real alpha, real t) {
    const real s = t / alpha;
    return 1.0 / std::log(2.0 + s * s);
}

// F_alpha = f_alpha^2 and its second derivative (used by the torsion barrier).
inline real strip_profile_sq(real alpha, real t) {
    const real f = strip_profile(alpha, t);
    return f * f;
}

inline real strip_profile_sq_dd(real alpha, real t) {
    // analytic second derivative of F_1(s) = (log(2+s^2))^-2 at s = t/alpha,
    // scaled by 1/alpha^2
    const real s = t / alpha;
    const real g = 2.0 + s * s;
    const real L = std::log(g);
    const real Lp = 2.0 * s / g;          // (log g)'
    const real Lpp = 2.0 / g - 4.0 * s * s / (g * g);
    // F_1 = L^-2, F_1' = -2 L^-3 L', F_1'' = 6 L^-4 L'^2 - 2 L^-3 L''
    const real F1dd = 6.0 * std::pow(L, -4.0) * Lp * Lp - 2.0 * std::pow(L, -3.0) * Lpp;
    return F1dd / (alpha * alpha);
}

struct domain_spec {
    enum class kind_t { interval, box, ball, annulus, tower, punctured_box, strip };

    kind_t kind{};
    int dim = 1;
    std::array<real, 3> lo{{0, 0, 0}};
    std::array<real, 3> hi{{0, 0, 0}};
    point center{};
    real radius = 0;
    real inner_radius = 0;
    int levels = 0;       // tower truncation m
    int side = 0;         // punctured box side M
    real hole_radius = 0; // tower / punctured epsilon
    real alpha = 0;       // strip profile parameter
    real truncation = 0;  // strip |x1| <= R
    bool analytic_distance = true;
    std::vector<point> removed; // removed centers, lexicographic order

    std::string name() const {
        std::ostringstream s;
        switch (kind) {
            case kind_t::interval: s << "interval(" << lo[0] << "," << hi[0] << ")"; break;
            case kind_t::box:
                s << "box(";
                for (int i = 0; i < dim; ++i) s << (i ? "x" : "") << "[" << lo[i] << "," << hi[i] << "]";
                s << ")";
                break;
            case kind_t::ball: s << "ball(N=" << dim << ",R=" << radius << ")"; break;
            case kind_t::annulus:
                s << "annulus(N=" << dim << ",Rin=" << inner_radius << ",Rout=" << radius << ")";
                break;
            case kind_t::tower:
                s << "tower(N=" << dim << ",m=" << levels << ",eps=" << hole_radius << ")";
                break;
            case kind_t::punctured_box:
                s << "punctured_box(N=" << dim << ",M=" << side << ",eps=" << hole_radius << ")";
                break;
            case kind_t::strip:
                s << "strip(alpha=" << alpha << ",R=" << truncation << ")";
                break;
        }
        return s.str();
    }

    void bounding_box(std::array<real, 3>& blo, std::array<real, 3>& bhi) const {
        switch (kind) {
            case kind_t::interval:
            case kind_t::box:
            case kind_t::tower:
            case kind_t::punctured_box:
                blo = lo;
                bhi = hi;
                break;
            case kind_t::ball:
            case kind_t::annulus:
                for (int i = 0; i < dim; ++i) {
                    blo[static_cast<std::size_t>(i)] = center[i] - radius;
                    bhi[static_cast<std::size_t>(i)] = center[i] + radius;
                }
                break;
            case kind_t::strip:
                blo = {-truncation, -strip_profile(alpha, 0.0), 0};
                bhi = {truncation, strip_profile(alpha, 0.0), 0};
                break;
        }
    }

    real bounding_radius() const {
        std::array<real, 3> blo{}, bhi{};
        bounding_box(blo, bhi);
        real s = 0;
        for (int i = 0; i < dim; ++i) {
            const real m = std::max(std::abs(blo[static_cast<std::size_t>(i)]),
                                    std::abs(bhi[static_cast<std::size_t>(i)]));
            s += m * m;
        }
        return std::sqrt(s);
    }

    bool in_bounding_open_box(const point& x) const {
        std::array<real, 3> blo{}, bhi{};
        bounding_box(blo, bhi);
        for (int i = 0; i < dim; ++i)
            if (!(x[i] > blo[static_cast<std::size_t>(i)] && x[i] < bhi[static_cast<std::size_t>(i)]))
                return false;
        return true;
    }

    // Exact membership in the open set.
    bool contains(const point& x) const {
        switch (kind) {
            case kind_t::interval:
                return x[0] > lo[0] && x[0] < hi[0];
            case kind_t::box:
                return in_bounding_open_box(x);
            case kind_t::ball:
                return dist2(x, center, dim) < radius * radius;
            case kind_t::annulus: {
                const real r2 = dist2(x, center, dim);
                return r2 > inner_radius * inner_radius && r2 < radius * radius;
            }
            case kind_t::tower:
            case kind_t::punctured_box: {
                if (!in_bounding_open_box(x)) return false;
                if (hole_radius > 0) {
                    for (const auto& c : removed)
                        if (dist2(x, c, dim) <= hole_radius * hole_radius) return false;
                } else {
                    for (const auto& c : removed)
                        if (dist2(x, c, dim) == 0.0) return false;
                }
                return true;
            }
            case kind_t::strip:
                return std::abs(x[0]) < truncation &&
                       std::abs(x[1]) < strip_profile(alpha, x[0]);
        }
        return false;
    }

    // d_Omega(x): closed-form distance to the boundary, extended by 0 outside.
    real distance(const point& x) const {
        if (!contains(x)) return 0.0;
        switch (kind) {
            case kind_t::interval:
                return std::min(x[0] - lo[0], hi[0] - x[0]);
            case kind_t::box: {
                real d = inf;
                for (int i = 0; i < dim; ++i)
                    d = std::min({d, x[i] - lo[static_cast<std::size_t>(i)],
                                  hi[static_cast<std::size_t>(i)] - x[i]});
                return d;
            }
            case kind_t::ball:
                return radius - dist(x, center, dim);
            case kind_t::annulus: {
                const real r = dist(x, center, dim);
                return std::min(r - inner_radius, radius - r);
            }
            case kind_t::tower:
            case kind_t::punctured_box: {
                real d = inf;
                for (int i = 0; i < dim; ++i)
                    d = std::min({d, x[i] - lo[static_cast<std::size_t>(i)],
                                  hi[static_cast<std::size_t>(i)] - x[i]});
                for (const auto& c : removed)
                    d = std::min(d, dist(x, c, dim) - hole_radius);
                return d;
            }
            case kind_t::strip:
                return strip_distance(x);
        }
        return 0.0;
    }

    // Distance from a point outside the closure to the closure (0 on it).
    real exterior_gap(const point& x) const {
        switch (kind) {
            case kind_t::interval:
            case kind_t::box:
            case kind_t::tower:
            case kind_t::punctured_box: {
                real s = 0;
                for (int i = 0; i < dim; ++i) {
                    const real e = std::max({lo[static_cast<std::size_t>(i)] - x[i],
                                             x[i] - hi[static_cast<std::size_t>(i)], 0.0});
                    s += e * e;
                }
                real g = std::sqrt(s);
                if (g == 0 && hole_radius > 0) {
                    // inside the box: a point strictly inside a removed hole
                    for (const auto& c : removed) {
                        const real r = dist(x, c, dim);
                        if (r < hole_radius) g = std::max(g, hole_radius - r);
                    }
                }
                return g;
            }
            case kind_t::ball:
                return std::max<real>(0, dist(x, center, dim) - radius);
            case kind_t::annulus: {
                const real r = dist(x, center, dim);
                return std::max({r - radius, inner_radius - r, 0.0});
            }
            case kind_t::strip: {
                if (contains(x)) return 0;
                // conservative: gap to the bounding rectangle, then to the curve
                const real fx = std::abs(x[0]) <= truncation
                                    ? std::abs(x[1]) - strip_profile(alpha, x[0])
                                    : inf;
                real s = 0;
                const real ex = std::max(std::abs(x[0]) - truncation, 0.0);
                s += ex * ex;
                real g = std::sqrt(s);
                if (std::isfinite(fx) && fx > 0) g = std::max(g, curve_gap(x));
                return g;
            }
        }
        return 0;
    }

private:
    // distance to the upper boundary curve (t, f(t)) by deterministic ternary
    // search; |f'| < 1 keeps the nearest parameter within +-1 of x0.
    real curve_distance(real x0, real y0) const {
        auto g = [&](real t) {
            const real dy = y0 - strip_profile(alpha, t);
            const real dx = x0 - t;
            return dx * dx + dy * dy;
        };
        real a = std::max(-truncation, x0 - 1.0);
        real b = std::min(truncation, x0 + 1.0);
        for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
            const real m1 = a + (b - a) / 3.0;
            const real m2 = b - (b - a) / 3.0;
            if (g(m1) < g(m2)) b = m2; else a = m1;
        }
        return std::sqrt(g(0.5 * (a + b)));
    }

    real strip_distance(const point& x) const {
        const real cap = truncation - std::abs(x[0]);
        const real dcurve = curve_distance(x[0], std::abs(x[1]));
        return std::min(cap, dcurve);
    }

    real curve_gap(const point& x) const { return curve_distance(x[0], std::abs(x[1])); }
};

inline domain_spec make_interval(real a, real b) {
    require(a < b, "interval: requires a < b");
    domain_spec d;
    d.kind = domain_spec::kind_t::interval;
    d.dim = 1;
    d.lo = {a, 0, 0};
    d.hi = {b, 0, 0};
    return d;
}

inline domain_spec make_box(const std::vector<real>& lo, const std::vector<real>& hi) {
    require(lo.size() == hi.size() && !lo.empty() && lo.size() <= 3,
            "box: extents must have matching dimension 1..3");
    for (std::size_t i = 0; i < lo.size(); ++i)
        require(lo[i] < hi[i], "box: requires lo < hi on every axis");
    domain_spec d;
    d.kind = domain_spec::kind_t::box;
    d.dim = static_cast<int>(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        d.lo[i] = lo[i];
        d.hi[i] = hi[i];
    }
    return d;
}

inline domain_spec make_ball(int dim, const point& center, real radius) {
    require(dim >= 1 && dim <= 3, "ball: dimension must be 1..3");
    require(radius > 0, "ball: requires R > 0");
    domain_spec d;
    d.kind = domain_spec::kind_t::ball;
    d.dim = dim;
    d.center = center;
    d.radius = radius;
    return d;
}

inline domain_spec make_annulus(int dim, const point& center, real r_in, real r_out) {
    require(dim >= 1 && dim <= 3, "annulus: dimension must be 1..3");
    require(0 < r_in && r_in < r_out, "annulus: requires 0 < R_in < R_out");
    domain_spec d;
    d.kind = domain_spec::kind_t::annulus;
    d.dim = dim;
    d.center = center;
    d.radius = r_out;
    d.inner_radius = r_in;
    return d;
}

// Truncated fragile tower: levels C_k = (0,1)^{N-1} x (k,k+1] for k = 0..m,
// each split into 2^{kN} dyadic cubes of side 2^-k with the center of every
// cube removed; the top face is Dirichlet boundary.
inline domain_spec make_tower(int dim, int m, real eps) {
    require(dim >= 2 && dim <= 3, "tower: dimension must be 2..3");
    require(m >= 0, "tower: requires m >= 0");
    require(eps >= 0, "tower: requires eps >= 0");
    require(eps < std::pow(2.0, -(m + 1)),
            "tower: requires eps < 2^-(m+1) so holes stay inside their cubes");
    domain_spec d;
    d.kind = domain_spec::kind_t::tower;
    d.dim = dim;
    d.levels = m;
    d.hole_radius = eps;
    for (int i = 0; i < dim - 1; ++i) {
        d.lo[static_cast<std::size_t>(i)] = 0;
        d.hi[static_cast<std::size_t>(i)] = 1;
    }
    d.lo[static_cast<std::size_t>(dim - 1)] = 0;
    d.hi[static_cast<std::size_t>(dim - 1)] = static_cast<real>(m + 1);
    for (int k = 0; k <= m; ++k) {
        const int cells = 1 << k; // per axis
        const real h = std::pow(2.0, -k);
        std::array<int, 3> j{0, 0, 0};
        while (true) {
            point c{};
            for (int i = 0; i < dim - 1; ++i)
                c[i] = (j[static_cast<std::size_t>(i)] + 0.5) * h;
            c[dim - 1] = k + (j[static_cast<std::size_t>(dim - 1)] + 0.5) * h;
            d.removed.push_back(c);
            int axis = dim - 1;
            while (axis >= 0) {
                if (++j[static_cast<std::size_t>(axis)] < cells) break;
                j[static_cast<std::size_t>(axis)] = 0;
                --axis;
            }
            if (axis < 0) break;
        }
    }
    return d;
}

// Truncation of R^N \ Z^N: the open box (0,M)^N minus the interior lattice.
inline domain_spec make_punctured_box(int dim, int m_side, real eps) {
    require(dim >= 1 && dim <= 3, "punctured_box: dimension must be 1..3");
    require(m_side >= 1, "punctured_box: requires side M >= 1");
    require(eps >= 0 && eps < 0.5, "punctured_box: requires 0 <= eps < 1/2");
    domain_spec d;
    d.kind = domain_spec::kind_t::punctured_box;
    d.dim = dim;
    d.side = m_side;
    d.hole_radius = eps;
    for (int i = 0; i < dim; ++i) {
        d.lo[static_cast<std::size_t>(i)] = 0;
        d.hi[static_cast<std::size_t>(i)] = static_cast<real>(m_side);
    }
    std::array<int, 3> j{1, 1, 1};
    if (m_side >= 2) {
        while (true) {
            point c{};
            for (int i = 0; i < dim; ++i) c[i] = static_cast<real>(j[static_cast<std::size_t>(i)]);
            d.removed.push_back(c);
            int axis = dim - 1;
            while (axis >= 0) {
                if (++j[static_cast<std::size_t>(axis)] <= m_side - 1) break;
                j[static_cast<std::size_t>(axis)] = 1;
                --axis;
            }
            if (axis < 0) break;
        }
    }
    return d;
}

inline domain_spec make_strip(real alpha, real trunc_r) {
    const real log2 = std::log(2.0);
    require(alpha * alpha > 1.0 / (log2 * log2 * log2),
            "strip: requires alpha^2 > (log 2)^-3");
    require(trunc_r >= 1.0 / log2, "strip: requires truncation R >= 1/log 2");
    domain_spec d;
    d.kind = domain_spec::kind_t::strip;
    d.dim = 2;
    d.alpha = alpha;
    d.truncation = trunc_r;
    return d;
}

// Fraction of the cell [c, c+h]^N covered by the open set. Closed form for
// product primitives and planar balls/annuli, 3^N indicator sampling otherwise.
inline real cell_volume_fraction(const domain_spec& dom, const point& cell_lo, real h) {
    auto axis_overlap = [&](int i, real a, real b) {
        const real l = std::max(cell_lo[i], a);
        const real r = std::min(cell_lo[i] + h, b);
        return std::max<real>(0, r - l) / h;
    };
    switch (dom.kind) {
        case domain_spec::kind_t::interval:
            return axis_overlap(0, dom.lo[0], dom.hi[0]);
        case domain_spec::kind_t::box: {
            real f = 1;
            for (int i = 0; i < dom.dim; ++i)
                f *= axis_overlap(i, dom.lo[static_cast<std::size_t>(i)],
                                  dom.hi[static_cast<std::size_t>(i)]);
            return f;
        }
        case domain_spec::kind_t::ball:
            if (dom.dim == 1) {
                return axis_overlap(0, dom.center[0] - dom.radius, dom.center[0] + dom.radius);
            } else if (dom.dim == 2) {
                return disk_rect_area(dom.center[0], dom.center[1], dom.radius, cell_lo[0],
                                      cell_lo[0] + h, cell_lo[1], cell_lo[1] + h) /
                       (h * h);
            }
            break;
        case domain_spec::kind_t::annulus:
            if (dom.dim == 2) {
                const real outer =
                    disk_rect_area(dom.center[0], dom.center[1], dom.radius, cell_lo[0],
                                   cell_lo[0] + h, cell_lo[1], cell_lo[1] + h);
                const real inner =
                    disk_rect_area(dom.center[0], dom.center[1], dom.inner_radius, cell_lo[0],
                                   cell_lo[0] + h, cell_lo[1], cell_lo[1] + h);
                return (outer - inner) / (h * h);
            }
            break;
        case domain_spec::kind_t::tower:
        case domain_spec::kind_t::punctured_box: {
            real f = 1;
            for (int i = 0; i < dom.dim; ++i)
                f *= axis_overlap(i, dom.lo[static_cast<std::size_t>(i)],
                                  dom.hi[static_cast<std::size_t>(i)]);
            if (dom.hole_radius == 0 || f == 0) return f;
            // only resample when a hole can intersect the cell
            const real reach = dom.hole_radius + h * std::sqrt(static_cast<real>(dom.dim));
            bool near = false;
            point cc{};
            for (int i = 0; i < dom.dim; ++i) cc[i] = cell_lo[i] + 0.5 * h;
            for (const auto& c : dom.removed)
                if (dist(cc, c, dom.dim) < reach) { near = true; break; }
            if (!near) return f;
            break;
        }
        case domain_spec::kind_t::strip:
            break;
    }
    // 3^N indicator sampling
    const int n = dom.dim;
    const int total = n == 1 ? 3 : (n == 2 ? 9 : 27);
    int inside = 0;
    std::array<int, 3> j{0, 0, 0};
    for (int s = 0; s < total; ++s) {
        point x{};
        int rem = s;
        for (int i = 0; i < n; ++i) {
            j[static_cast<std::size_t>(i)] = rem % 3;
            rem /= 3;
            x[i] = cell_lo[i] + (j[static_cast<std::size_t>(i)] + 0.5) * h / 3.0;
        }
        if (dom.contains(x)) ++inside;
    }
    return static_cast<real>(inside) / total;
}

} // namespace pflab
