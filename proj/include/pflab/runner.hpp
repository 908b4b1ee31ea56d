#pragma once

#include "pflab/acceptance.hpp"
#include "pflab/binio.hpp"
#include "pflab/config.hpp"
#include "pflab/svg.hpp"

namespace pflab {

struct run_options {
    std::string out_dir = "out";
    int workers = 0;          // 0: take from config, else 1
    bool plots = false;
    bool timing = false;
    real tolerance_scale = 1.0;
    std::size_t node_budget = default_node_budget;
};

namespace detail_run {

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, "cannot create output directory " + dir);
}

inline real parse_q(const config_file& cf, const std::string& section, const std::string& key) {
    const auto* v = cf.find(section, key);
    if (!v) cf.fail(1, "missing required key '" + key + "' in [" + section + "]");
    if (v->type == config_value::type_t::string) {
        if (v->str == "inf") return inf;
        cf.fail(v->line, "q must be a number, inf, or \"p\"");
    }
    return v->num;
}

inline report_row base_row(const std::string& experiment, const domain_spec& dom, real h, real p,
                           real q) {
    report_row r;
    r.experiment = experiment;
    r.domain = dom.name();
    r.dim = dom.dim;
    r.h = h;
    r.p = p;
    r.q = q;
    return r;
}

inline void fill_from_sweep(report_row& r, const sweep_record& rec) {
    r.tag = rec.tag;
    r.value = rec.value;
    r.value_root_p = rec.value_root_p;
    r.target = rec.target;
    r.gap = rec.gap;
    r.slack = rec.slack;
    r.pass = rec.skipped ? 2 : (rec.pass ? 1 : 0);
    r.iterations = rec.iterations;
    r.detail = sweep_detail(rec);
}

} // namespace detail_run

// q -> infinity sweep on a grid (general domains); mirrors the radial route.
inline std::vector<sweep_record> sweep_q_to_sup(grid_ptr gp, real p,
                                                const std::vector<real>& q_list,
                                                const solver_options& opts = {}) {
    require(p > gp->dim, "sweep_q_to_sup: requires p > N");
    for (std::size_t i = 0; i + 1 < q_list.size(); ++i)
        require(q_list[i] < q_list[i + 1], "sweep_q_to_sup: q_list must be increasing");
    require(!q_list.empty() && q_list.front() >= p, "sweep_q_to_sup: requires min q >= p");
    const auto sup_rep = principal_frequency_sup(gp, p, opts);
    const auto pp_rep = principal_frequency_pp(gp, p, opts);
    std::vector<sweep_record> out;
    for (real q : q_list) {
        sweep_record rec;
        rec.parameter = q;
        rec.tag = "teo:limiteq";
        rec.target = sup_rep.constant;
        try {
            const auto rep =
                q == p ? pp_rep : principal_frequency_super(gp, p, q, opts);
            rec.value = rep.constant;
            rec.value_root_p = rep.constant_root_p;
            rec.iterations = rep.iterations;
            rec.gap = std::abs(rep.constant - sup_rep.constant) / sup_rep.constant;
            const real lower = std::pow(pp_rep.constant, p / q) *
                               std::pow(sup_rep.constant, (q - p) / q);
            rec.extras["interpolation_lower_bound"] = lower;
            rec.slack = rep.constant - lower;
            rec.pass = rep.constant >= lower * (1 - 1e-9);
            if (!rec.pass) rec.note = "interpolation lower bound violated";
        } catch (const std::exception& e) {
            rec.pass = false;
            rec.note = e.what();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

// Configuration-driven experiment execution. Returns the exit status
// (nonzero iff any audit failed) and writes report.csv / report.json and
// optional plots under out_dir.
inline int run_experiment(const config_file& cf, const run_options& ropt) {
    using detail_run::base_row;
    using detail_run::fill_from_sweep;

    static const std::set<std::string> domain_keys{"kind", "a",      "b",    "lo",
                                                   "hi",   "dim",    "center", "radius",
                                                   "r_in", "r_out",  "levels", "eps",
                                                   "side", "alpha",  "truncation"};
    std::map<std::string, std::set<std::string>> allowed;
    allowed[""] = {"kind", "workers"};
    allowed["domain"] = domain_keys;
    allowed["exponents"] = {"p", "q", "p_list", "q_list"};
    allowed["grid"] = {"h", "radial_nodes", "chain_nodes", "morrey_nodes", "h_divisor"};
    allowed["tolerances"] = {"solver", "identity", "max_iter", "hardy_clamp"};
    allowed["output"] = {"dir", "plots", "field", "field_text"};
    allowed["tower"] = {"m_list"};
    allowed["strip"] = {"r_list", "tail_radii"};
    allowed["geometry"] = {"q_list", "radii", "alpha"};
    cf.check_known(allowed);

    const std::string kind = cf.string("", "kind");
    solver_options sopt;
    sopt.tol = cf.number_or("tolerances", "solver", 0.0) * ropt.tolerance_scale;
    sopt.identity_tol = cf.number_or("tolerances", "identity", 1e-5) * ropt.tolerance_scale;
    sopt.max_iter = static_cast<long>(cf.number_or("tolerances", "max_iter", 100000));
    sopt.hardy_clamp = cf.number_or("tolerances", "hardy_clamp", 0.0);

    std::string out_dir = ropt.out_dir;
    if (const auto* v = cf.find("output", "dir"); v && out_dir == "out") out_dir = v->str;
    detail_run::ensure_dir(out_dir);
    const bool plots = ropt.plots || cf.boolean_or("output", "plots", false);

    std::vector<report_row> rows;
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&](int status) {
        const real secs =
            std::chrono::duration<real>(std::chrono::steady_clock::now() - t0).count();
        for (auto& r : rows)
            if (r.seconds == 0) r.seconds = secs;
        write_csv(out_dir + "/report.csv", rows, ropt.timing);
        write_json(out_dir + "/report.json", rows);
        return status;
    };

    try {
        if (kind == "solve") {
            const auto dom = domain_from_config(cf);
            const real p = cf.number("exponents", "p");
            const real q = detail_run::parse_q(cf, "exponents", "q");
            solve_report rep;
            real h = 0;
            if (const auto* rn = cf.find("grid", "radial_nodes")) {
                require(dom.kind == domain_spec::kind_t::ball,
                        "config: radial_nodes requires a ball domain");
                rep = radial_ball_frequency(p, q, dom.dim, dom.radius,
                                            static_cast<int>(rn->num), sopt);
                h = dom.radius / rn->num;
            } else if (const auto* cn = cf.find("grid", "chain_nodes")) {
                require(dom.kind == domain_spec::kind_t::interval && dom.lo[0] == 0 &&
                            dom.hi[0] == 1,
                        "config: chain_nodes requires the interval (0,1)");
                rep = pi_pq(p, q, static_cast<int>(cn->num), sopt);
                h = 1.0 / cn->num;
            } else {
                h = cf.number("grid", "h");
                auto gp = rasterize(dom, h, ropt.node_budget);
                rep = principal_frequency(gp, p, q, sopt);
                if (const auto* f = cf.find("output", "field"))
                    write_field_binary(out_dir + "/" + f->str, rep.extremal);
                if (const auto* f = cf.find("output", "field_text"))
                    write_field_text(out_dir + "/" + f->str, rep.extremal);
            }
            auto r = base_row("solve", dom, h, p, q);
            r.route = route_name(rep.route);
            r.value = rep.constant;
            r.value_root_p = rep.constant_root_p;
            r.iterations = rep.iterations;
            r.detail = solve_detail(rep);
            rows.push_back(r);
            return finish(0);
        }
        if (kind == "sweep_p") {
            const auto dom = domain_from_config(cf);
            const real h = cf.number("grid", "h");
            const auto plist = cf.array("exponents", "p_list");
            q_choice qc;
            const auto* qv = cf.find("exponents", "q");
            if (!qv) cf.fail(1, "sweep_p requires q (number, inf, or \"p\")");
            if (qv->type == config_value::type_t::string && qv->str == "p")
                qc = q_choice::equal_p();
            else
                qc = q_choice::fixed(detail_run::parse_q(cf, "exponents", "q"));
            const auto recs = sweep_p_asymptotics(dom, h, qc, plist, sopt);
            bool all_pass = true;
            for (const auto& rec : recs) {
                auto r =
                    base_row("sweep_p", dom, h, rec.parameter, qc.track_p ? rec.parameter : qc.value);
                r.route = dom.kind == domain_spec::kind_t::interval ? "one_d" : "grid";
                fill_from_sweep(r, rec);
                all_pass = all_pass && rec.pass;
                rows.push_back(r);
            }
            if (plots) {
                svg_plot plot("gap to the limit target", "p", "|lambda^{1/p}/target - 1|", true,
                              true);
                std::vector<real> xs, ys;
                for (const auto& rec : recs) {
                    xs.push_back(rec.parameter);
                    ys.push_back(rec.gap);
                }
                plot.add_series("gap", xs, ys);
                plot.write(out_dir + "/gap_vs_p.svg");
            }
            return finish(all_pass ? 0 : 1);
        }
        if (kind == "sweep_q") {
            const auto dom = domain_from_config(cf);
            const real p = cf.number("exponents", "p");
            const auto qlist = cf.array("exponents", "q_list");
            std::vector<sweep_record> recs;
            real h = 0;
            if (const auto* rn = cf.find("grid", "radial_nodes")) {
                require(dom.kind == domain_spec::kind_t::ball,
                        "config: radial_nodes requires a ball domain");
                recs = sweep_q_to_sup_radial(dom.dim, dom.radius, static_cast<int>(rn->num), p,
                                             qlist, sopt);
                h = dom.radius / rn->num;
            } else {
                h = cf.number("grid", "h");
                recs = sweep_q_to_sup(rasterize(dom, h, ropt.node_budget), p, qlist, sopt);
            }
            bool all_pass = true;
            for (const auto& rec : recs) {
                auto r = base_row("sweep_q", dom, h, p, rec.parameter);
                r.route = cf.find("grid", "radial_nodes") ? "radial" : "grid";
                fill_from_sweep(r, rec);
                all_pass = all_pass && rec.pass;
                rows.push_back(r);
            }
            if (plots) {
                svg_plot plot("approach to lambda_{p,inf}", "q", "relative gap", true, true);
                std::vector<real> xs, ys;
                for (const auto& rec : recs) {
                    xs.push_back(rec.parameter);
                    ys.push_back(std::max(rec.gap, 1e-16));
                }
                plot.add_series("gap", xs, ys);
                plot.write(out_dir + "/gap_vs_q.svg");
            }
            return finish(all_pass ? 0 : 1);
        }
        if (kind == "audit") {
            const auto dom = domain_from_config(cf);
            const real p = cf.number("exponents", "p");
            const real q = detail_run::parse_q(cf, "exponents", "q");
            const real h = cf.number("grid", "h");
            const int rn = static_cast<int>(cf.number_or("grid", "radial_nodes", 1024));
            const int mn = static_cast<int>(cf.number_or("grid", "morrey_nodes", 64));
            const auto recs = bounds_audit(dom, p, q, h, rn, mn, sopt);
            bool all_pass = true;
            for (const auto& rec : recs) {
                auto r = base_row("audit", dom, h, p, q);
                fill_from_sweep(r, rec);
                if (!rec.skipped) all_pass = all_pass && rec.pass;
                rows.push_back(r);
            }
            return finish(all_pass ? 0 : 1);
        }
        if (kind == "tower") {
            const real p = cf.number("exponents", "p");
            const real q = cf.number("exponents", "q");
            const real h = cf.number("grid", "h");
            std::vector<int> m_list;
            for (real m : cf.array("tower", "m_list")) m_list.push_back(static_cast<int>(m));
            const auto recs = tower_decay_experiment(2, p, q, m_list, h, sopt);
            bool all_pass = true;
            for (const auto& rec : recs) {
                auto dom = make_tower(2, static_cast<int>(rec.parameter), 0.0);
                auto r = base_row("tower", dom, h, p, q);
                fill_from_sweep(r, rec);
                all_pass = all_pass && rec.pass;
                rows.push_back(r);
            }
            if (plots) {
                svg_plot plot("tower decay", "m", "lambda", false, true);
                std::vector<real> xs, ys, bs;
                for (const auto& rec : recs) {
                    xs.push_back(rec.parameter);
                    ys.push_back(rec.value);
                    bs.push_back(rec.target);
                }
                plot.add_series("lambda(T_m)", xs, ys);
                plot.add_series("slab bound", xs, bs);
                plot.write(out_dir + "/tower_decay.svg");
            }
            return finish(all_pass ? 0 : 1);
        }
        if (kind == "strip") {
            const real alpha = cf.number("domain", "alpha");
            const auto rl = cf.array("strip", "r_list");
            std::vector<real> tails{2, 5, 8};
            if (cf.find("strip", "tail_radii")) tails = cf.array("strip", "tail_radii");
            const int hdiv = static_cast<int>(cf.number_or("grid", "h_divisor", 8));
            const auto recs = strip_barrier_experiment(alpha, rl, hdiv, tails, sopt);
            bool all_pass = true;
            for (const auto& rec : recs) {
                auto dom = make_strip(alpha, rec.parameter);
                auto r = base_row("strip", dom, rec.extras.at("h"), 2.0, 1.0);
                fill_from_sweep(r, rec);
                all_pass = all_pass && rec.pass;
                rows.push_back(r);
            }
            if (plots) {
                svg_plot plot("strip tail sups", "R'", "sup of w outside B_R'", false, true);
                for (const auto& rec : recs) {
                    std::vector<real> xs, ys;
                    for (real rp : tails) {
                        std::ostringstream key;
                        key << "tail_sup_R" << rp;
                        xs.push_back(rp);
                        ys.push_back(rec.extras.at(key.str()));
                    }
                    std::ostringstream label;
                    label << "R=" << rec.parameter;
                    plot.add_series(label.str(), xs, ys);
                }
                plot.write(out_dir + "/strip_tails.svg");
            }
            return finish(all_pass ? 0 : 1);
        }
        if (kind == "geometry") {
            const auto dom = domain_from_config(cf);
            const real h = cf.number("grid", "h");
            auto gp = rasterize(dom, h, ropt.node_budget);
            auto d = distance_field(gp);
            const auto ir = inradius(d);
            auto r0 = base_row("geometry", dom, h, 0, 0);
            r0.tag = "inradius";
            r0.value = ir.value;
            r0.detail["uncertainty"] = ir.uncertainty;
            r0.detail["argmax_node"] = ir.argmax_node;
            rows.push_back(r0);
            if (cf.find("geometry", "q_list")) {
                for (real q : cf.array("geometry", "q_list")) {
                    auto r = base_row("geometry", dom, h, 0, q);
                    r.tag = "distance-norm";
                    r.value = distance_lq_norm(d, q);
                    rows.push_back(r);
                }
            }
            if (cf.find("geometry", "radii")) {
                std::optional<real> alpha;
                if (cf.find("geometry", "alpha")) alpha = cf.number("geometry", "alpha");
                const auto profile = quasibounded_profile(d, cf.array("geometry", "radii"), alpha);
                for (const auto& rec : profile) {
                    auto r = base_row("geometry", dom, h, 0, 0);
                    r.tag = "lm:controllo";
                    r.value = rec.tail_sup;
                    r.target = rec.bound;
                    r.pass = rec.bound_applicable ? (rec.tail_sup <= rec.bound ? 1 : 0) : -1;
                    r.detail["radius"] = rec.radius;
                    rows.push_back(r);
                }
            }
            if (const auto* f = cf.find("output", "field"))
                write_field_binary(out_dir + "/" + f->str, d);
            if (const auto* f = cf.find("output", "field_text"))
                write_field_text(out_dir + "/" + f->str, d);
            return finish(0);
        }
        cf.fail(1, "unknown experiment kind '" + kind + "'");
    } catch (const std::exception& e) {
        report_row r;
        r.experiment = kind;
        r.tag = "error";
        r.pass = 0;
        r.detail["error"] = e.what();
        rows.push_back(r);
        finish(1);
        throw;
    }
}

// Bundled acceptance experiments with pinned sizes; writes acceptance.csv,
// acceptance.json and summary.txt, checks CSV byte-determinism over a second
// run, and returns the failing tag list.
struct reproduce_result {
    bool pass = true;
    bool deterministic = true;
    real seconds = 0;
    std::vector<criterion_result> criteria;
    std::vector<std::string> failing_tags;
};

inline reproduce_result reproduce_all(const std::string& out_dir, int workers,
                                      const std::set<std::string>& fault_tags = {},
                                      bool timing = false) {
    detail_run::ensure_dir(out_dir);
    acceptance_options aopt;
    aopt.workers = workers;
    aopt.fault_tags = fault_tags;

    reproduce_result out;
    auto run1 = acceptance_suite(aopt).run();
    const std::string csv1 = out_dir + "/acceptance.csv";
    write_csv(csv1, run1.rows, timing);
    write_json(out_dir + "/acceptance.json", run1.rows);

    auto run2 = acceptance_suite(aopt).run();
    const std::string csv2 = out_dir + "/acceptance.rerun.csv";
    write_csv(csv2, run2.rows, timing);
    {
        std::ifstream a(csv1, std::ios::binary), b(csv2, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        out.deterministic = sa == sb && !sa.empty();
    }
    std::filesystem::remove(csv2);

    out.seconds = run1.seconds + run2.seconds;
    out.criteria = run1.criteria;
    out.failing_tags = run1.failing_tags;
    auto& c14 = out.criteria[13];
    c14.checks.push_back(detail_acc::make_check("csv-determinism", out.deterministic,
                                                out.deterministic ? 1.0 : 0.0, 1.0, 0.0));
    const bool runtime_ok = out.seconds <= 1800.0;
    c14.checks.push_back(detail_acc::make_check(
        "runtime-budget", true, out.seconds, 1800.0, 1800.0 - out.seconds,
        runtime_ok ? "" : "soft warning: reproduce-all exceeded the 30 minute budget"));
    c14.pass = out.deterministic;
    out.pass = run1.pass && c14.pass;
    for (const auto& ck : c14.checks)
        if (!ck.pass) out.failing_tags.push_back(ck.tag);

    std::ofstream summary(out_dir + "/summary.txt");
    char buf[160];
    for (const auto& cr : out.criteria) {
        std::snprintf(buf, sizeof buf, "criterion %2d  %-4s  %s\n", cr.id,
                      cr.pass ? "PASS" : "FAIL", cr.name.c_str());
        summary << buf;
        for (const auto& ck : cr.checks) {
            std::snprintf(buf, sizeof buf, "    %-34s %-4s value=%.6g target=%.6g slack=%.6g %s\n",
                          ck.tag.c_str(), ck.skipped ? "skip" : (ck.pass ? "pass" : "FAIL"),
                          ck.value, ck.target, ck.slack, ck.note.c_str());
            summary << buf;
        }
    }
    return out;
}

} // namespace pflab
