// Command-line front end: declares experiments in plain-text configs, runs
// them, and emits CSV/JSON reports and static SVG plots.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "pflab/runner.hpp"

namespace {

std::size_t node_budget_from_env() {
    if (const char* env = std::getenv("PFLAB_NODE_BUDGET")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        std::cerr << "warning: ignoring malformed PFLAB_NODE_BUDGET='" << env << "'\n";
    }
    return pflab::default_node_budget;
}

void list_domains() {
    std::cout << "domain catalog:\n"
              << "  interval(a, b)                 keys: a, b\n"
              << "  box                            keys: lo = [..], hi = [..]  (dim 1..3)\n"
              << "  ball                           keys: dim, center = [..], radius\n"
              << "  annulus                        keys: dim, center, r_in, r_out  (0 < r_in < r_out)\n"
              << "  tower                          keys: dim (>=2), levels m, eps >= 0\n"
              << "                                 levels C_k = (0,1)^{N-1} x (k,k+1], 2^{kN} dyadic\n"
              << "                                 sub-cubes per level, one removed center each\n"
              << "  punctured_box                  keys: dim, side M, eps in [0, 1/2)\n"
              << "                                 the open box (0,M)^N minus its interior lattice\n"
              << "  strip                          keys: alpha (alpha^2 > (log 2)^-3), truncation R\n"
              << "                                 |x2| < 1/log(2 + (x1/alpha)^2), |x1| < R\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pflab: principal-frequency laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int workers = 4;
    bool plots = false;
    bool timing = false;
    double tol_scale = 1.0;
    std::vector<std::string> faults;

    app.add_option("--workers", workers, "worker count for independent solves")
        ->check(CLI::PositiveNumber);
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_flag("--plots", plots, "write SVG plots");
    app.add_flag("--timing", timing, "write wall times into the CSV (breaks byte determinism)");
    app.add_option("--tolerance-scale", tol_scale, "multiply solver tolerances");

    auto* run_cmd = app.add_subcommand("run", "run one experiment config");
    run_cmd->add_option("config", config_path, "experiment config file")->required();

    auto* repro_cmd = app.add_subcommand("reproduce-all",
                                         "run the bundled acceptance experiments");
    repro_cmd->add_option("--inject-fault", faults,
                          "negate the named check tags (testing hook)");

    auto* list_cmd = app.add_subcommand("list-domains", "print the domain catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            list_domains();
            return 0;
        }
        if (run_cmd->parsed()) {
            const auto cf = pflab::config_file::load(config_path);
            pflab::run_options ropt;
            ropt.out_dir = out_dir;
            ropt.workers = workers;
            ropt.plots = plots;
            ropt.timing = timing;
            ropt.tolerance_scale = tol_scale;
            ropt.node_budget = node_budget_from_env();
            const int status = pflab::run_experiment(cf, ropt);
            std::cout << (status == 0 ? "all audits passed" : "some audits FAILED")
                      << "; reports in " << out_dir << "\n";
            return status;
        }
        if (repro_cmd->parsed()) {
            std::set<std::string> fault_tags(faults.begin(), faults.end());
            const auto res = pflab::reproduce_all(out_dir, workers, fault_tags, timing);
            for (const auto& cr : res.criteria)
                std::cout << "criterion " << cr.id << (cr.pass ? "  PASS  " : "  FAIL  ")
                          << cr.name << "\n";
            std::cout << "total " << res.seconds << " s; summary in " << out_dir
                      << "/summary.txt\n";
            if (!res.failing_tags.empty()) {
                std::cout << "failing tags:";
                for (const auto& t : res.failing_tags) std::cout << " " << t;
                std::cout << "\n";
            }
            return res.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
