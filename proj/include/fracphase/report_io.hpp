#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fracphase/experiments.hpp"
#include "fracphase/special.hpp"

namespace fracphase {

/// JSON report with insertion-ordered keys so serialization is byte-stable.
inline std::string to_json(const report& rep) {
    nlohmann::ordered_json j;
    j["format"] = "fracphase-report";
    j["version"] = 1;
    j["experiment"] = rep.config.experiment;
    j["a"] = rep.config.a;
    j["seed"] = rep.config.seed;
    j["grid"] = rep.config.grid;
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : rep.records) {
        nlohmann::ordered_json rec;
        rec["eps"] = r.eps;
        rec["energy_total"] = r.energy_total;
        rec["nonlocal"] = r.nonlocal;
        rec["potential"] = r.potential;
        rec["predicted_limit"] = r.predicted_limit;
        rec["relative_gap"] = r.relative_gap;
        j["records"].push_back(rec);
    }
    return j.dump(2) + "\n";
}

inline void emit(const report& rep, const std::string& path, const std::string& format) {
    std::string body;
    if (format == "csv") body = to_csv(rep);
    else if (format == "json") body = to_json(rep);
    else throw std::invalid_argument("emit: format must be csv or json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot open " + path);
    out << body;
}

// ---- constants and kappa reports ----------------------------------------------

inline std::string constants_csv(const constants_report& r) {
    std::string out = "s,d_s,e_s,D_s,d_refine_delta,e_refine_delta\n";
    out += detail::fmt17(r.s) + ',' + detail::fmt17(r.d_s) + ',' + detail::fmt17(r.e_s) + ',' +
           detail::fmt17(r.D_s) + ',' + detail::fmt17(r.d_refine_delta) + ',' +
           detail::fmt17(r.e_refine_delta) + '\n';
    return out;
}

inline std::string constants_json(const constants_report& r) {
    nlohmann::ordered_json j;
    j["format"] = "fracphase-constants";
    j["version"] = 1;
    j["s"] = r.s;
    j["d_s"] = r.d_s;
    j["e_s"] = r.e_s;
    j["D_s"] = r.D_s;
    j["d_refine_delta"] = r.d_refine_delta;
    j["e_refine_delta"] = r.e_refine_delta;
    return j.dump(2) + "\n";
}

inline std::string kappa_csv(const kappa_result& k) {
    std::string out = "T,nodes,value,nonlocal,potential,iterations,converged\n";
    for (const auto& st : k.stages) {
        out += detail::fmt17(st.T) + ',' + std::to_string(st.profile.size()) + ',' +
               detail::fmt17(st.value) + ',' + detail::fmt17(st.nonlocal_part) + ',' +
               detail::fmt17(st.potential_part) + ',' + std::to_string(st.iterations) + ',' +
               (st.converged ? "1" : "0") + '\n';
    }
    out += "extrapolated,," + detail::fmt17(k.value) + ",,,,\n";
    return out;
}

inline std::string kappa_json(const kappa_result& k) {
    nlohmann::ordered_json j;
    j["format"] = "fracphase-kappa";
    j["version"] = 1;
    j["value"] = k.value;
    j["converged"] = k.converged;
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& st : k.stages) {
        nlohmann::ordered_json sj;
        sj["T"] = st.T;
        sj["nodes"] = st.profile.size();
        sj["value"] = st.value;
        sj["nonlocal"] = st.nonlocal_part;
        sj["potential"] = st.potential_part;
        sj["iterations"] = st.iterations;
        sj["converged"] = st.converged;
        j["stages"].push_back(sj);
    }
    return j.dump(2) + "\n";
}

inline void write_text(const std::string& body, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << body;
}

} // namespace fracphase
