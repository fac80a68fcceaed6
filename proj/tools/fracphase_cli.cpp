// Command-line front end: constants, optimal-profile values, and eps-sweep
// experiments with CSV/JSON reports.
//
//   fracphase constants --a -0.5 --out constants.csv
//   fracphase kappa --a -0.5 --out kappa.json --format json
//   fracphase sweep --experiment sharpness --a -0.5 --eps 0.3,0.2,0.13 --out s.csv
//
// A flat key=value config file can stand in for the flags:
//   fracphase sweep --config run.cfg
//
// Exit codes: 0 success, 2 validation error, 3 solver did not converge.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracphase/experiments.hpp"
#include "fracphase/params.hpp"
#include "fracphase/profile.hpp"
#include "fracphase/report_io.hpp"
#include "fracphase/special.hpp"

namespace {

struct nonconvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    return out;
}

std::vector<double> default_eps(const std::string& experiment) {
    if (experiment == "interior" || experiment == "wall") return {0.2, 0.1, 0.05, 0.025};
    if (experiment == "boundary") return {0.3, 0.2, 0.13, 0.09};
    if (experiment == "sharpness") return {0.3, 0.2, 0.13};
    if (experiment == "boundary-effect") return {0.25, 0.15, 0.1};
    return {};
}

void print_records(const fracphase::report& rep) {
    std::printf("experiment %s  (a = %g)\n", rep.config.experiment.c_str(), rep.config.a);
    std::printf("%12s %16s %16s %16s %16s %12s\n", "eps", "energy", "nonlocal", "potential",
                "limit", "gap");
    for (const auto& r : rep.records)
        std::printf("%12.6g %16.9g %16.9g %16.9g %16.9g %11.3f%%\n", r.eps, r.energy_total,
                    r.nonlocal, r.potential, r.predicted_limit, 100.0 * r.relative_gap);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for weighted singular phase-transition energies"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file mirroring the flags");

    double a = -0.5;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::size_t grid = 0;

    auto add_common = [&](CLI::App* is) {
        is->add_option("--a", a, "exponent a in (-1,0)")->capture_default_str();
        is->add_option("--out", out_path, "report output path");
        is->add_option("--format", format, "report format: csv|json")->capture_default_str();
        is->add_option("--seed", seed, "seed echoed into the report")->capture_default_str();
        is->add_option("--grid", grid, "resolution override (0 = auto)")->capture_default_str();
    };

    auto* c_constants = app.add_subcommand("constants", "compute d_s, e_s, D_s for s=(1-a)/2");
    add_common(c_constants);

    auto* c_kappa = app.add_subcommand("kappa", "optimal transition profile constant kappa_s");
    add_common(c_kappa);
    std::string t_list = "8,16,32,64";
    double grid_h = 1.0 / 16.0;
    c_kappa->add_option("--T", t_list, "half-widths for the truncated problems")
        ->capture_default_str();
    c_kappa->add_option("--grid-h", grid_h, "node spacing shared by all stages")
        ->capture_default_str();

    auto* c_sweep = app.add_subcommand("sweep", "eps-sweep experiments");
    add_common(c_sweep);
    std::string experiment;
    std::string eps_csv;
    double gamma = 0.0;
    double profile_T = 16.0;
    int jumps = 1;
    c_sweep->add_option("--experiment", experiment,
                        "interior|boundary|sharpness|boundary-effect|wall")
        ->required();
    c_sweep->add_option("--eps", eps_csv, "comma-separated decreasing eps list");
    c_sweep->add_option("--gamma", gamma, "wall trace value")->capture_default_str();
    c_sweep->add_option("--T", profile_T, "profile half-width (boundary-effect)")
        ->capture_default_str();
    c_sweep->add_option("--jumps", jumps, "interior interface count")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (c_constants->parsed()) {
            const auto p = fracphase::make_params(a);
            const auto rep = fracphase::compute_constants(p.s);
            std::printf("s = %.12g\nd_s = %.12g\ne_s = %.12g\nD_s = %.12g\n", rep.s, rep.d_s,
                        rep.e_s, rep.D_s);
            if (!out_path.empty())
                fracphase::write_text(format == "json" ? fracphase::constants_json(rep)
                                                       : fracphase::constants_csv(rep),
                                      out_path);
        } else if (c_kappa->parsed()) {
            const auto p = fracphase::make_params(a);
            const auto V = fracphase::double_well::quartic();
            const double D = fracphase::constants(p.s).D_s;
            fracphase::kappa_result res;
            res.converged = true;
            for (double T : parse_list(t_list)) {
                const auto n = static_cast<std::size_t>(std::llround(2.0 * T / grid_h)) + 1;
                res.stages.push_back(fracphase::kappa_T(p, V, D, T, n));
                res.converged = res.converged && res.stages.back().converged;
                std::printf("kappa_T(%g) = %.9g  (%zu iterations%s)\n", T,
                            res.stages.back().value, res.stages.back().iterations,
                            res.stages.back().converged ? "" : ", NOT converged");
            }
            if (res.stages.size() >= 3) {
                const auto m = res.stages.size();
                const double d1 = res.stages[m - 2].value - res.stages[m - 3].value;
                const double d2 = res.stages[m - 1].value - res.stages[m - 2].value;
                res.value = res.stages[m - 1].value;
                if (std::abs(d2 - d1) > 1e-14 && d1 * d2 > 0.0) {
                    const double aitken = res.value - d2 * d2 / (d2 - d1);
                    if (std::isfinite(aitken) && std::abs(aitken - res.value) < 0.05 * res.value)
                        res.value = aitken;
                }
            } else if (!res.stages.empty()) {
                res.value = res.stages.back().value;
            }
            std::printf("kappa_s = %.9g\n", res.value);
            if (!out_path.empty())
                fracphase::write_text(format == "json" ? fracphase::kappa_json(res)
                                                       : fracphase::kappa_csv(res),
                                      out_path);
            if (!res.converged) throw nonconvergence("kappa solver hit the iteration cap");
        } else {
            fracphase::experiment_config cfg;
            cfg.experiment = experiment;
            cfg.a = a;
            cfg.eps_list = eps_csv.empty() ? default_eps(experiment) : parse_list(eps_csv);
            cfg.grid = grid;
            cfg.seed = seed;
            cfg.gamma = gamma;
            cfg.profile_T = profile_T;
            cfg.jumps = jumps;
            const auto rep = fracphase::run(cfg);
            print_records(rep);
            if (!out_path.empty()) fracphase::emit(rep, out_path, format);
        }
    } catch (const nonconvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
