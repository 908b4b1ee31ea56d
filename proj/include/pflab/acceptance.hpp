#pragma once

#include <chrono>
#include <filesystem>
#include <mutex>
#include <set>

#include "pflab/report.hpp"
#include "pflab/workqueue.hpp"

namespace pflab {

struct check_result {
    std::string tag;
    bool pass = true;
    bool skipped = false;
    real value = std::numeric_limits<real>::quiet_NaN();
    real target = std::numeric_limits<real>::quiet_NaN();
    real slack = std::numeric_limits<real>::quiet_NaN();
    std::string note;
};

struct criterion_result {
    int id = 0;
    std::string name;
    bool pass = true;
    std::vector<check_result> checks;
    real seconds = 0;
};

struct acceptance_options {
    int workers = 4;
    std::set<std::string> fault_tags; // named checks negated (fault injection)
    bool run_property_battery = true;
    std::set<int> only; // restrict to these criteria (testing hook); empty = all
};

struct acceptance_run {
    std::vector<criterion_result> criteria;
    std::vector<report_row> rows;
    real seconds = 0;
    bool pass = true;
    std::vector<std::string> failing_tags;
};

namespace detail_acc {

struct residual_log {
    std::mutex mu;
    real max_pqnorm = 0;
    real max_minprob = 0;
    long solves = 0;

    void add(const solve_report& rep) {
        std::lock_guard<std::mutex> lock(mu);
        max_pqnorm = std::max(max_pqnorm, rep.residual_energy_identity);
        max_minprob = std::max(max_minprob, rep.residual_minimum_identity);
        ++solves;
    }
};

inline check_result make_check(const std::string& tag, bool pass, real value, real target,
                               real slack, const std::string& note = "") {
    check_result c;
    c.tag = tag;
    c.pass = pass;
    c.value = value;
    c.target = target;
    c.slack = slack;
    c.note = note;
    return c;
}

inline report_row row_from_check(const std::string& experiment, const check_result& c) {
    report_row r;
    r.experiment = experiment;
    r.tag = c.tag;
    r.value = c.value;
    r.target = c.target;
    r.slack = c.slack;
    r.pass = c.skipped ? 2 : (c.pass ? 1 : 0);
    if (!c.note.empty()) r.detail["note"] = c.note;
    return r;
}

} // namespace detail_acc

// ---------------------------------------------------------------------------
// The acceptance criteria, each with its grid sizes and tolerances pinned.
// ---------------------------------------------------------------------------
class acceptance_suite {
public:
    explicit acceptance_suite(const acceptance_options& opts) : opts_(opts) {}

    acceptance_run run() {
        const auto t0 = std::chrono::steady_clock::now();
        acceptance_run out;
        out.criteria.resize(14);
        // criterion 3 aggregates residuals from the other criteria's solves
        std::vector<int> ids;
        for (int id : {1, 2, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13})
            if (opts_.only.empty() || opts_.only.count(id)) ids.push_back(id);
        run_jobs(ids.size(), opts_.workers, [&](std::size_t i) {
            const int id = ids[i];
            const auto c0 = std::chrono::steady_clock::now();
            criterion_result res;
            switch (id) {
                case 1: res = criterion1(); break;
                case 2: res = criterion2(); break;
                case 4: res = criterion4(); break;
                case 5: res = criterion5(); break;
                case 6: res = criterion6(); break;
                case 7: res = criterion7(); break;
                case 8: res = criterion8(); break;
                case 9: res = criterion9(); break;
                case 10: res = criterion10(); break;
                case 11: res = criterion11(); break;
                case 12: res = criterion12(); break;
                case 13: res = criterion13(); break;
            }
            res.seconds =
                std::chrono::duration<real>(std::chrono::steady_clock::now() - c0).count();
            out.criteria[static_cast<std::size_t>(id - 1)] = std::move(res);
        });
        if (opts_.only.empty() || opts_.only.count(3)) out.criteria[2] = criterion3();
        for (int id = 1; id <= 14; ++id)
            if (out.criteria[static_cast<std::size_t>(id - 1)].id == 0)
                out.criteria[static_cast<std::size_t>(id - 1)].id = id;
        // criterion 14 (runtime + determinism) is evaluated by the caller,
        // which owns the double run; keep a placeholder entry here.
        criterion_result c14;
        c14.id = 14;
        c14.name = "reproduce-all runtime and CSV determinism";
        out.criteria[13] = c14;

        for (auto& cr : out.criteria) {
            for (auto& ck : cr.checks) {
                if (opts_.fault_tags.count(ck.tag)) {
                    ck.pass = !ck.pass;
                    ck.note += " [fault injected]";
                }
                if (!ck.pass && !ck.skipped) {
                    cr.pass = false;
                    out.failing_tags.push_back(ck.tag);
                }
            }
            if (cr.id != 14 && !cr.pass) out.pass = false;
        }
        for (const auto& cr : out.criteria) {
            std::string exp = "acceptance/criterion" + std::to_string(cr.id);
            for (const auto& ck : cr.checks) out.rows.push_back(detail_acc::row_from_check(exp, ck));
        }
        out.seconds = std::chrono::duration<real>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

private:
    acceptance_options opts_;
    detail_acc::residual_log residuals_;

    static bool finite_pass(real lhs, real rhs, real rel_tol) { // lhs <= rhs within slack
        return lhs <= rhs * (1 + rel_tol) + 1e-300;
    }

    // 1. 1-D exact constants at 1024 nodes, under a second each.
    criterion_result criterion1() {
        criterion_result cr;
        cr.id = 1;
        cr.name = "1-D exact constants lambda_{2,1}=12, lambda_{2,2}=pi^2";
        auto t0 = std::chrono::steady_clock::now();
        auto r1 = chain_lane_emden(make_interval_chain(1024), 2.0, 1.0);
        const real s1 = std::chrono::duration<real>(std::chrono::steady_clock::now() - t0).count();
        residuals_.add(r1);
        cr.checks.push_back(detail_acc::make_check(
            "lambda21-interval", std::abs(r1.constant / 12.0 - 1.0) <= 0.01 && s1 < 1.0,
            r1.constant, 12.0, 0.01 - std::abs(r1.constant / 12.0 - 1.0)));
        t0 = std::chrono::steady_clock::now();
        auto r2 = chain_pp(make_interval_chain(1024), 2.0);
        const real s2 = std::chrono::duration<real>(std::chrono::steady_clock::now() - t0).count();
        cr.checks.push_back(detail_acc::make_check(
            "lambda22-interval", std::abs(r2.constant / (pi * pi) - 1.0) <= 0.005 && s2 < 1.0,
            r2.constant, pi * pi, 0.005 - std::abs(r2.constant / (pi * pi) - 1.0)));
        return cr;
    }

    // 2. Talenti value and extremal on the unit disk, radial route.
    criterion_result criterion2() {
        criterion_result cr;
        cr.id = 2;
        cr.name = "radial lambda_{p,inf}(B_1) matches ((p-2)/(p-1))^{p-1} 2pi";
        for (real p : {4.0, 8.0}) {
            const auto rep = radial_ball_frequency(p, inf, 2, 1.0, 512);
            const real target = ball_sup_frequency(p, 2);
            const real gap = std::abs(rep.constant / target - 1.0);
            cr.checks.push_back(detail_acc::make_check(
                "talenti-p" + std::to_string(static_cast<int>(p)), gap <= 0.01, rep.constant,
                target, 0.01 - gap));
            // extremal vs 1 - r^{(p-2)/(p-1)}
            const real kappa = (p - 2) / (p - 1);
            real sup_diff = 0;
            const auto& c = rep.radial_profile;
            for (std::size_t i = 0; i < c.size(); ++i) {
                const real r = static_cast<real>(i) / (c.size() - 1);
                sup_diff = std::max(sup_diff, std::abs(c[i] - (1.0 - std::pow(r, kappa))));
            }
            cr.checks.push_back(detail_acc::make_check(
                "talenti-extremal-p" + std::to_string(static_cast<int>(p)), sup_diff <= 0.01,
                sup_diff, 0.01, 0.01 - sup_diff));
        }
        return cr;
    }

    // 3. identity residuals across every Lane-Emden solve of the suite.
    criterion_result criterion3() {
        criterion_result cr;
        cr.id = 3;
        cr.name = "(pqnorm) and (minprob) identity residuals < 1e-5";
        std::lock_guard<std::mutex> lock(residuals_.mu);
        cr.checks.push_back(detail_acc::make_check("pqnorm", residuals_.max_pqnorm < 1e-5,
                                                   residuals_.max_pqnorm, 1e-5,
                                                   1e-5 - residuals_.max_pqnorm));
        cr.checks.push_back(detail_acc::make_check("minprob", residuals_.max_minprob < 1e-5,
                                                   residuals_.max_minprob, 1e-5,
                                                   1e-5 - residuals_.max_minprob));
        cr.checks.back().note =
            "aggregated over " + std::to_string(residuals_.solves) + " Lane-Emden solves";
        return cr;
    }

    // 4. (A4) lower bound, strict, over the exponent grid.
    criterion_result criterion4() {
        criterion_result cr;
        cr.id = 4;
        cr.name = "(A4): pi_{p,q} above the explicit lower bound";
        for (real p : {1.5, 2.0, 4.0, 8.0}) {
            for (real q : {1.0, 1.5, 2.0, 4.0}) {
                if (q >= p) continue;
                const auto rep = pi_pq(p, q, 1024);
                residuals_.add(rep);
                const real bound = pi_pq_lower_bound(p, q);
                const real pi_value = rep.constant_root_p;
                std::ostringstream tag;
                tag << "A4"; // fault-injection hook keys on the bare tag
                bool ok = pi_value > bound;
                cr.checks.push_back(
                    detail_acc::make_check(tag.str(), ok, pi_value, bound, pi_value - bound));
                cr.checks.back().note = "p=" + std::to_string(p) + " q=" + std::to_string(q);
            }
        }
        return cr;
    }

    // 5. inradius bound sharp on balls, strict on the square.
    criterion_result criterion5() {
        criterion_result cr;
        cr.id = 5;
        cr.name = "inradius bound: equality on balls, strict excess on the square";
        for (int n : {1, 2}) {
            const real h = n == 1 ? 1.0 / 256 : 1.0 / 64;
            auto gp = rasterize(make_ball(n, point{}, 1.0), h);
            auto d = distance_field(gp);
            const real r = inradius(d).value;
            for (real alpha : {1.0, 2.0}) {
                const real integral = std::pow(distance_lq_norm(d, alpha), alpha);
                const real bound = inradius_upper_bound(n, alpha, integral);
                const bool ok = std::abs(bound - r) <= 2 * h;
                std::ostringstream tag;
                tag << "inraggio-ball-N" << n << "-a" << alpha;
                cr.checks.push_back(detail_acc::make_check(tag.str(), ok, r, bound,
                                                           2 * h - std::abs(bound - r)));
            }
        }
        {
            auto gp = rasterize(make_box({0, 0}, {1, 1}), 1.0 / 64);
            auto d = distance_field(gp);
            const real r = inradius(d).value;
            const real integral = std::pow(distance_lq_norm(d, 1.0), 1.0);
            const real bound = inradius_upper_bound(2, 1.0, integral);
            cr.checks.push_back(detail_acc::make_check("inraggio-square-strict", bound > r + 0.02,
                                                       r, bound, bound - r));
        }
        return cr;
    }

    // 6. p -> infinity frequency asymptotics on interval and square.
    criterion_result criterion6() {
        criterion_result cr;
        cr.id = 6;
        cr.name = "lambda_{p,q}^{1/p} gap minimal at p=32 and below 0.2";
        const std::vector<real> ps{4, 8, 16, 32};
        struct sweep_spec {
            std::string tag;
            domain_spec dom;
            real h;
            q_choice qc;
        };
        std::vector<sweep_spec> specs;
        specs.push_back({"teo:limite-interval-q1", make_interval(0, 1), 1.0 / 1024,
                         q_choice::fixed(1.0)});
        specs.push_back({"teo:asymp-p-interval", make_interval(0, 1), 1.0 / 1024,
                         q_choice::equal_p()});
        specs.push_back({"teo:limite-square-q1", make_box({0, 0}, {1, 1}), 1.0 / 96,
                         q_choice::fixed(1.0)});
        specs.push_back({"teo:asymp-p-square", make_box({0, 0}, {1, 1}), 1.0 / 64,
                         q_choice::equal_p()});
        for (const auto& sp : specs) {
            solver_options so;
            so.tol = sp.dom.dim == 1 ? 1e-10 : 1e-8;
            const auto recs = sweep_p_asymptotics(sp.dom, sp.h, sp.qc, ps, so);
            bool ok = true;
            real last_gap = inf, min_gap = inf;
            for (const auto& r : recs) {
                if (!r.pass) ok = false;
                min_gap = std::min(min_gap, r.gap);
                last_gap = r.gap;
            }
            ok = ok && last_gap <= min_gap * (1 + 1e-9) && last_gap < 0.2;
            cr.checks.push_back(
                detail_acc::make_check(sp.tag, ok, last_gap, 0.2, 0.2 - last_gap));
        }
        return cr;
    }

    // 7. Lane-Emden solutions approach the distance function as p grows.
    criterion_result criterion7() {
        criterion_result cr;
        cr.id = 7;
        cr.name = "w_{p,1} -> d in L^1 and sup norm, minima at p=32";
        const std::vector<real> ps{4, 8, 16, 32};
        // interval via the chain route
        {
            auto chain = make_interval_chain(1024);
            auto dprof = detail::chain_distance_profile(chain);
            const real nd1 = chain.mass(dprof, 1.0);
            std::vector<real> l1(ps.size()), supg(ps.size());
            for (std::size_t i = 0; i < ps.size(); ++i) {
                auto rep = chain_lane_emden(chain, ps[i], 1.0);
                residuals_.add(rep);
                std::vector<real> diff(dprof.size());
                real sup = 0;
                for (std::size_t j = 0; j < diff.size(); ++j) {
                    diff[j] = rep.radial_profile[j] - dprof[j];
                    sup = std::max(sup, std::abs(diff[j]));
                }
                l1[i] = chain.mass(diff, 1.0) / nd1;
                supg[i] = sup / 0.5;
            }
            const bool ok_l1 = l1.back() <= *std::min_element(l1.begin(), l1.end()) * (1 + 1e-9);
            const bool ok_sup =
                supg.back() <= *std::min_element(supg.begin(), supg.end()) * (1 + 1e-9) &&
                supg.back() < 0.1;
            cr.checks.push_back(detail_acc::make_check("convw-interval-l1", ok_l1, l1.back(),
                                                       l1.front(), l1.front() - l1.back()));
            cr.checks.push_back(detail_acc::make_check("convw-interval-sup", ok_sup, supg.back(),
                                                       0.1, 0.1 - supg.back()));
        }
        // disk via the grid route
        {
            auto gp = rasterize(make_ball(2, point{}, 1.0), 1.0 / 48);
            auto d = distance_field(gp);
            const real nd1 = std::pow(distance_lq_norm(d, 1.0), 1.0);
            const real r = inradius(d).value;
            std::vector<real> l1(ps.size()), supg(ps.size());
            for (std::size_t i = 0; i < ps.size(); ++i) {
                auto rep = solve_lane_emden(gp, ps[i], 1.0);
                residuals_.add(rep);
                grid_field diff = rep.extremal;
                for (std::size_t j = 0; j < diff.v.size(); ++j) diff.v[j] -= d.v[j];
                l1[i] = lq_integral(*gp, diff.v, 1.0) / nd1;
                supg[i] = lq_norm(diff, inf) / r;
            }
            const bool ok_l1 = l1.back() <= *std::min_element(l1.begin(), l1.end()) * (1 + 1e-9);
            const bool ok_sup =
                supg.back() <= *std::min_element(supg.begin(), supg.end()) * (1 + 1e-9);
            cr.checks.push_back(detail_acc::make_check("convw-ball-l1", ok_l1, l1.back(),
                                                       l1.front(), l1.front() - l1.back()));
            cr.checks.push_back(detail_acc::make_check("convw-ball-sup", ok_sup, supg.back(),
                                                       supg.front(), supg.front() - supg.back()));
        }
        return cr;
    }

    // 8. Morrey constant monotonicity and asymptotics window.
    criterion_result criterion8() {
        criterion_result cr;
        cr.id = 8;
        cr.name = "Morrey constant: (mu_p/omega_2)^{1/p} non-decreasing, window at p=32";
        const std::vector<real> ps{4, 8, 16, 32};
        std::vector<real> roots;
        real mu32 = 0;
        bool mono = true, below = true;
        for (real p : ps) {
            const auto rep = morrey_mu(p, 2, 64);
            const real root = std::pow(rep.constant / pi, 1.0 / p);
            if (!roots.empty() && root < roots.back() * (1 - 1e-9)) mono = false;
            if (rep.constant > pi * (1 + 1e-9)) below = false;
            roots.push_back(root);
            if (p == 32.0) mu32 = rep.constant;
        }
        cr.checks.push_back(detail_acc::make_check("lm:morreyA-monotone", mono, roots.back(),
                                                   roots.front(), roots.back() - roots.front()));
        cr.checks.push_back(
            detail_acc::make_check("lm:morreyA-trial", below, mu32, pi, pi - mu32));
        const real root32 = std::pow(mu32, 1.0 / 32.0);
        cr.checks.push_back(detail_acc::make_check("eq:limitemup-window",
                                                   root32 > 0.8 && root32 <= 1.0, root32, 1.0,
                                                   1.0 - root32));
        return cr;
    }

    // 9. Hardy lower bounds and the interpolation bound at q = 2p.
    criterion_result criterion9() {
        criterion_result cr;
        cr.id = 9;
        cr.name = "Hardy constants above their explicit lower bounds";
        auto gp = rasterize(make_ball(2, point{}, 1.0), 1.0 / 32);
        auto d = distance_field(gp);
        for (real p : {4.0, 8.0}) {
            const auto hp = hardy_constant(gp, d, p, p);
            const real bound = std::pow((p - 2) / p, p);
            cr.checks.push_back(detail_acc::make_check(
                "lowerboundhardyext-hp-p" + std::to_string(static_cast<int>(p)),
                hp.constant >= bound, hp.constant, bound, hp.constant - bound));
            const auto hinf = hardy_constant(gp, d, p, inf);
            const auto mu = morrey_mu(p, 2, 64);
            cr.checks.push_back(detail_acc::make_check(
                "lowerboundhardyext-hinf-p" + std::to_string(static_cast<int>(p)),
                hinf.constant >= mu.constant * 0.95, hinf.constant, mu.constant * 0.95,
                hinf.constant - mu.constant * 0.95));
            const auto hq = hardy_constant(gp, d, p, 2 * p);
            const real rhs = std::pow(hp.constant, 0.5) * std::pow(hinf.constant, 0.5);
            cr.checks.push_back(detail_acc::make_check(
                "lowerboundhardy-q2p-p" + std::to_string(static_cast<int>(p)),
                hq.constant >= rhs * (1 - 1e-9), hq.constant, rhs, hq.constant - rhs));
        }
        return cr;
    }

    // 10. two-sided sandwiches on the unit square.
    criterion_result criterion10() {
        criterion_result cr;
        cr.id = 10;
        cr.name = "two-sided geometric sandwiches on the unit square";
        const auto square = make_box({0, 0}, {1, 1});
        for (const auto rows = bounds_audit(square, 4.0, 2.0, 1.0 / 48); const auto& r : rows) {
            if (r.skipped) continue;
            if (r.tag == "eq:pqstima1" || r.tag == "eq:pqstima2")
                cr.checks.push_back(
                    detail_acc::make_check(r.tag, r.pass, r.value, r.target, r.slack, r.note));
        }
        for (const auto rows = bounds_audit(square, 4.0, 4.0, 1.0 / 48); const auto& r : rows) {
            if (r.skipped) continue;
            if (r.tag == "HP1" || r.tag == "eq:pqstima1p")
                cr.checks.push_back(
                    detail_acc::make_check(r.tag, r.pass, r.value, r.target, r.slack, r.note));
        }
        return cr;
    }

    // 11. fragile tower decay against the explicit slab bound.
    criterion_result criterion11() {
        criterion_result cr;
        cr.id = 11;
        cr.name = "tower decay, slab bound, and the shrinking pinning gap";
        const auto recs = tower_decay_experiment(2, 2.0, 1.0, {0, 1, 2, 3}, 1.0 / 32);
        real prev = inf;
        bool decay = true, gaps_shrink = true;
        for (const auto& r : recs) {
            if (r.value > prev * (1 + 1e-9)) decay = false;
            prev = r.value;
            const auto git = r.extras.find("pinning_gap_h");
            const auto git2 = r.extras.find("pinning_gap_h2");
            if (git != r.extras.end() && git2 != r.extras.end() &&
                git2->second >= git->second * (1 - 1e-9))
                gaps_shrink = false;
            std::ostringstream tag;
            tag << "tower-slab-bound-m" << static_cast<int>(r.parameter);
            cr.checks.push_back(detail_acc::make_check(
                tag.str(), r.value <= r.target * (1 + 1e-9), r.value, r.target, r.slack,
                r.value <= r.target ? "" :
                "pinned lambda exceeds the slab bound: at p=N the discrete point capacity "
                "decays only logarithmically in h (documented spec calibration defect)"));
        }
        cr.checks.push_back(detail_acc::make_check("tower-decay", decay, recs.back().value,
                                                   recs.front().value,
                                                   recs.front().value - recs.back().value));
        cr.checks.push_back(detail_acc::make_check(
            "tower-pinning-gap-shrinks", gaps_shrink,
            recs.back().extras.at("pinning_gap_h2"), recs.back().extras.at("pinning_gap_h"),
            recs.back().extras.at("pinning_gap_h") - recs.back().extras.at("pinning_gap_h2")));
        return cr;
    }

    // 12. strip torsion barrier and tail decay.
    criterion_result criterion12() {
        criterion_result cr;
        cr.id = 12;
        cr.name = "strip torsion below the Appendix barrier with decaying tails";
        const real alpha = std::sqrt(2.0 / std::pow(std::log(2.0), 3));
        const auto recs = strip_barrier_experiment(alpha, {10.0, 20.0});
        for (const auto& r : recs) {
            const real h = r.extras.at("h");
            std::ostringstream tag;
            tag << "strip-barrier-R" << static_cast<int>(r.parameter);
            cr.checks.push_back(detail_acc::make_check(
                tag.str(), r.extras.at("min_barrier_slack") >= -10 * h * h,
                r.extras.at("min_barrier_slack"), -10 * h * h,
                r.extras.at("min_barrier_slack") + 10 * h * h));
            std::ostringstream tag2;
            tag2 << "strip-tails-R" << static_cast<int>(r.parameter);
            cr.checks.push_back(detail_acc::make_check(
                tag2.str(), r.pass, r.extras.at("tail_sup_R8"), r.extras.at("tail_sup_R2"),
                r.extras.at("tail_sup_R2") - r.extras.at("tail_sup_R8")));
        }
        return cr;
    }

    // 13. randomized property battery with a fixed seed.
    criterion_result criterion13();

    // 14 is evaluated by the caller around the double run.

public:
    detail_acc::residual_log& residuals() { return residuals_; }
};

} // namespace pflab

#include "pflab/properties.hpp"
