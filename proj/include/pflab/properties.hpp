#pragma once

#include <random>

#include "pflab/acceptance.hpp"

namespace pflab {

// Randomized battery behind acceptance criterion 13: homogeneity, domain
// monotonicity, scale covariance, positivity, and the nodewise
// (eq:lowest)/(eq:up) sandwich. Fixed seed, deterministic case order.
inline criterion_result acceptance_suite::criterion13() {
    criterion_result cr;
    cr.id = 13;
    cr.name = "randomized property battery (fixed seed)";
    if (!opts_.run_property_battery) {
        cr.checks.push_back(detail_acc::make_check("property-battery", true, 0, 0, 0,
                                                   "skipped by options"));
        cr.checks.back().skipped = true;
        return cr;
    }
    std::mt19937 gen(20230117);
    auto uni = [&](real a, real b) {
        return a + (b - a) * std::generate_canonical<real, 53>(gen);
    };
    int cases = 0;

    // --- homogeneity of p_energy, lq_norm, holder_seminorm, hardy_quotient
    {
        int failures = 0;
        real worst = 0;
        for (int it = 0; it < 40; ++it) {
            const int dim = it % 2 == 0 ? 1 : 2;
            grid_ptr gp = dim == 1 ? rasterize(make_interval(0, 1), 1.0 / 24)
                                   : rasterize(make_ball(2, point{}, 1.0), 1.0 / 10);
            grid_field u = make_field(gp);
            for (std::size_t i = 0; i < u.v.size(); ++i)
                if (gp->cls[i] == node_class::interior) u.v[i] = uni(-1.0, 1.0);
            const real c = uni(-3.0, 3.0);
            const real p = uni(1.5, 24.0);
            const real q = uni(1.0, 6.0);
            const real beta = uni(0.2, 1.0);
            grid_field cu = u;
            for (auto& x : cu.v) x *= c;
            auto rel = [](real a, real b) {
                return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30});
            };
            real err = rel(p_energy(cu, p), std::pow(std::abs(c), p) * p_energy(u, p));
            err = std::max(err, rel(lq_norm(cu, q), std::abs(c) * lq_norm(u, q)));
            err = std::max(err,
                           rel(holder_seminorm(cu, beta).value,
                               std::abs(c) * holder_seminorm(u, beta).value));
            if (dim == 2 && c != 0) {
                auto d = distance_field(gp);
                const real hp = uni(3.0, 8.0);
                err = std::max(err, rel(hardy_quotient(cu, d, hp, hp, gp->h),
                                        hardy_quotient(u, d, hp, hp, gp->h)));
            }
            worst = std::max(worst, err);
            if (err > 1e-9) ++failures;
            ++cases;
        }
        cr.checks.push_back(detail_acc::make_check("property-homogeneity", failures == 0,
                                                   worst, 1e-9, 1e-9 - worst,
                                                   "40 randomized fields"));
    }

    // --- domain monotonicity: lambda on nested boxes never increases outward
    {
        int failures = 0;
        for (int it = 0; it < 20; ++it) {
            const real h = 1.0 / 12;
            const int wcells = 12 + static_cast<int>(uni(0, 6.999)); // outer box, lattice sized
            const int hcells = 12 + static_cast<int>(uni(0, 6.999));
            const int dx = 1 + static_cast<int>(uni(0, 2.999));
            const int dy = 1 + static_cast<int>(uni(0, 2.999));
            const int icw = wcells - dx - 1 - static_cast<int>(uni(0, 1.999));
            const int ich = hcells - dy - 1 - static_cast<int>(uni(0, 1.999));
            auto outer = make_box({0, 0}, {wcells * h, hcells * h});
            auto inner = make_box({dx * h, dy * h}, {(dx + icw) * h, (dy + ich) * h});
            static const real pv[] = {2.0, 2.5, 4.0};
            const real p = pv[it % 3];
            const real q = it % 2 == 0 ? 1.0 : p;
            auto solve = [&](const domain_spec& dom) {
                auto gp = rasterize(dom, h);
                auto rep = q < p ? solve_lane_emden(gp, p, q) : principal_frequency_pp(gp, p);
                if (q < p) residuals_.add(rep);
                // positivity of the extremal on the way through
                for (std::size_t i = 0; i < rep.extremal.v.size(); ++i) {
                    if (gp->cls[i] == node_class::interior && rep.extremal.v[i] <= 0) ++failures;
                    if (rep.extremal.v[i] < 0) ++failures;
                }
                return rep.constant;
            };
            const real lo = solve(outer), li = solve(inner);
            if (li < lo * (1 - 1e-9)) ++failures;
            cases += 2; // monotonicity + positivity
        }
        cr.checks.push_back(detail_acc::make_check("property-monotonicity-positivity",
                                                   failures == 0, failures, 0, -failures,
                                                   "20 nested box pairs"));
    }

    // --- scale covariance on balls through the radial solver
    {
        int failures = 0;
        real worst = 0;
        struct pq {
            real p, q;
        };
        for (const auto [p, q] : {pq{4, 1}, pq{4, 4}, pq{4, inf}, pq{8, 2}}) {
            const real expo = p - 2 + (std::isfinite(q) ? 2 * p / q : 0.0);
            real ref = 0;
            for (real t : {0.5, 1.0, 2.0}) {
                const auto rep = radial_ball_frequency(p, q, 2, t, 512);
                if (std::isfinite(q) && q < p) residuals_.add(rep);
                const real inv = rep.constant * std::pow(t, expo);
                if (t == 0.5)
                    ref = inv;
                else {
                    const real err = std::abs(inv / ref - 1.0);
                    worst = std::max(worst, err);
                    if (err > 0.01) ++failures;
                }
                ++cases;
            }
        }
        cr.checks.push_back(detail_acc::make_check("property-scale-covariance", failures == 0,
                                                   worst, 0.01, 0.01 - worst,
                                                   "exponent p-N+Np/q across t in {1/2,1,2}"));
    }

    // --- nodewise sandwich (eq:lowest) and (eq:up)
    {
        int failures = 0;
        std::string note;
        for (int it = 0; it < 10; ++it) {
            const real p = it % 2 == 0 ? 4.0 : 8.0;
            const real q = 1.0;
            const bool use_ball = it % 4 < 2;
            grid_ptr gp = use_ball
                              ? rasterize(make_ball(2, point{}, 1.0), 1.0 / 24)
                              : rasterize(make_box({0, 0}, {1.0, 1.0 + 0.25 * (it % 3)}), 1.0 / 24);
            auto d = distance_field(gp);
            auto lane = solve_lane_emden(gp, p, q);
            residuals_.add(lane);
            const real w_ball0 = radial_ball_frequency(p, q, 2, 1.0, 512).center_value;
            const real mu = morrey_mu(p, 2, 48).constant;
            const real energy = p_energy_raw(*gp, lane.extremal.v, p).value;
            const real up_coef = std::pow(mu, -1.0 / p) * std::pow(energy, 1.0 / p);
            const real h = gp->h;
            const real sup_w = lq_norm(lane.extremal, inf);
            for (std::size_t i = 0; i < d.v.size(); ++i) {
                if (gp->cls[i] != node_class::interior) continue;
                const real w = lane.extremal.v[i];
                // (eq:lowest) with discretization slack
                const real lower = std::pow(d.v[i], p / (p - q)) * w_ball0;
                if (lower > w + 2 * h * sup_w + 1e-12) ++failures;
                // (eq:up); the staircase layer (d < h) is excluded: there the
                // discrete Dirichlet row sits farther from the node than d
                if (d.v[i] >= h) {
                    const real upper = std::pow(d.v[i], 1.0 - 2.0 / p) * up_coef;
                    if (w > upper * (1 + 1e-9)) ++failures;
                }
            }
            ++cases;
        }
        cr.checks.push_back(detail_acc::make_check("property-sandwich", failures == 0, failures,
                                                   0, -failures,
                                                   "(eq:lowest)/(eq:up) on 10 domains"));
    }

    cr.checks.push_back(detail_acc::make_check("property-case-count", cases >= 100,
                                               static_cast<real>(cases), 100.0,
                                               static_cast<real>(cases) - 100.0));
    return cr;
}

} // namespace pflab
