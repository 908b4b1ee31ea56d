#pragma once

#include <fstream>

#include <json.hpp>

#include "pflab/asymptotics.hpp"

namespace pflab {

// One CSV row per SolveReport / SweepRecord. Column order and float
// formatting are fixed so identical runs produce byte-identical files.
struct report_row {
    std::string experiment;
    std::string tag = "plumbing";
    std::string domain;
    int dim = 0;
    real h = 0;           // grid spacing, or 1/nodes for 1-D chains
    real p = 0;
    real q = 0;           // inf allowed
    std::string route;
    real value = std::numeric_limits<real>::quiet_NaN();
    real value_root_p = std::numeric_limits<real>::quiet_NaN();
    real target = std::numeric_limits<real>::quiet_NaN();
    real gap = std::numeric_limits<real>::quiet_NaN();
    real slack = std::numeric_limits<real>::quiet_NaN();
    int pass = -1;        // 1 pass, 0 fail, -1 n/a, 2 skipped
    long iterations = 0;
    real seconds = 0;
    nlohmann::json detail; // JSON mirror only
};

inline std::string csv_num(real v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string csv_pass(int pass) {
    switch (pass) {
        case 0: return "0";
        case 1: return "1";
        case 2: return "skip";
        default: return "";
    }
}

inline const char* csv_header() {
    return "experiment,tag,domain,N,h,p,q,route,value,value_pow_1_over_p,target,gap,slack,pass,"
           "iterations,seconds";
}

inline void write_csv(const std::string& path, const std::vector<report_row>& rows,
                      bool timing = false) {
    std::ofstream out(path);
    require(out.good(), "write_csv: cannot open " + path);
    out << csv_header() << "\n";
    char sec[32];
    for (const auto& r : rows) {
        std::snprintf(sec, sizeof sec, "%.3f", timing ? r.seconds : 0.0);
        out << r.experiment << ',' << r.tag << ',' << r.domain << ',' << r.dim << ','
            << csv_num(r.h) << ',' << csv_num(r.p) << ',' << csv_num(r.q) << ',' << r.route << ','
            << csv_num(r.value) << ',' << csv_num(r.value_root_p) << ',' << csv_num(r.target)
            << ',' << csv_num(r.gap) << ',' << csv_num(r.slack) << ',' << csv_pass(r.pass) << ','
            << r.iterations << ',' << sec << "\n";
    }
}

inline nlohmann::json row_json(const report_row& r) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["tag"] = r.tag;
    j["domain"] = r.domain;
    j["N"] = r.dim;
    j["h"] = r.h;
    j["p"] = r.p;
    j["q"] = std::isinf(r.q) ? nlohmann::json("inf") : nlohmann::json(r.q);
    j["route"] = r.route;
    j["value"] = r.value;
    j["value_pow_1_over_p"] = r.value_root_p;
    if (!std::isnan(r.target)) j["target"] = r.target;
    if (!std::isnan(r.gap)) j["gap"] = r.gap;
    if (!std::isnan(r.slack)) j["slack"] = r.slack;
    if (r.pass >= 0) j["pass"] = csv_pass(r.pass);
    j["iterations"] = r.iterations;
    j["seconds"] = r.seconds;
    if (!r.detail.is_null()) j["detail"] = r.detail;
    return j;
}

inline void write_json(const std::string& path, const std::vector<report_row>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back(row_json(r));
    std::ofstream out(path);
    require(out.good(), "write_json: cannot open " + path);
    out << arr.dump(2) << "\n";
}

inline nlohmann::json solve_detail(const solve_report& rep) {
    nlohmann::json j;
    j["residual_energy_identity"] = rep.residual_energy_identity;
    j["residual_minimum_identity"] = rep.residual_minimum_identity;
    j["residual_stationarity"] = rep.residual_stationarity;
    j["residual_constraint"] = rep.residual_constraint;
    j["log_constant"] = rep.log_constant;
    if (rep.center_value != 0) j["center_value"] = rep.center_value;
    if (rep.upper_bound_only) j["upper_bound_only"] = true;
    if (!rep.note.empty()) j["note"] = rep.note;
    if (!rep.peak_candidates.empty()) j["peak_candidates"] = rep.peak_candidates;
    for (const auto& [k, v] : rep.extras) j[k] = v;
    return j;
}

inline nlohmann::json sweep_detail(const sweep_record& rec) {
    nlohmann::json j;
    if (!rec.note.empty()) j["note"] = rec.note;
    for (const auto& [k, v] : rec.extras) j[k] = v;
    return j;
}

} // namespace pflab
