#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracphase/extension.hpp"
#include "fracphase/grid.hpp"
#include "fracphase/nonlocal.hpp"
#include "fracphase/params.hpp"
#include "fracphase/profile.hpp"
#include "fracphase/special.hpp"

namespace fracphase {

struct sweep_record {
    double eps = 0.0;
    double energy_total = 0.0;
    double nonlocal = 0.0;  // gradient / seminorm part
    double potential = 0.0; // double-well part
    double predicted_limit = 0.0;
    double relative_gap = 0.0; // (energy_total - predicted)/predicted
};

struct experiment_config {
    std::string experiment; // interior | boundary | sharpness | boundary-effect | wall
    double a = -0.5;
    std::vector<double> eps_list;
    std::size_t grid = 0;     // 0 = per-experiment resolution defaults
    std::uint64_t seed = 0;   // echoed into reports; the sweeps themselves are deterministic
    double profile_T = 16.0;  // transition half-width for the boundary-effect profile
    double gamma = 0.0;       // wall trace value
    int jumps = 1;            // interior interface count (0, 1 or 2)
};

inline const std::vector<std::string>& experiment_tags() {
    static const std::vector<std::string> tags = {"interior", "boundary", "sharpness",
                                                  "boundary-effect", "wall"};
    return tags;
}

inline void validate(const experiment_config& cfg) {
    bool known = false;
    for (const auto& t : experiment_tags()) known = known || t == cfg.experiment;
    if (!known) {
        std::string msg = "unknown experiment '" + cfg.experiment + "'; valid tags:";
        for (const auto& t : experiment_tags()) msg += " " + t;
        throw std::invalid_argument(msg);
    }
    if (!(cfg.a > -1.0 && cfg.a < 0.0))
        throw std::invalid_argument("config: a must lie in (-1, 0)");
    if (cfg.eps_list.empty()) throw std::invalid_argument("config: eps_list must not be empty");
    for (double e : cfg.eps_list)
        if (!(e > 0.0)) throw std::invalid_argument("config: eps values must be positive");
    for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
        if (!(cfg.eps_list[i] < cfg.eps_list[i - 1]))
            throw std::invalid_argument("config: eps_list must be strictly decreasing");
    if (cfg.jumps < 0 || cfg.jumps > 2)
        throw std::invalid_argument("config: jumps must be 0, 1 or 2");
    if (!(cfg.profile_T > 0.0)) throw std::invalid_argument("config: profile_T must be positive");
}

struct report {
    experiment_config config;
    std::vector<sweep_record> records;
};

namespace detail {

inline double relative_gap(double energy, double predicted) {
    return predicted != 0.0 ? (energy - predicted) / predicted : energy;
}

inline std::size_t pow2_at_least(double x) {
    std::size_t p = 1;
    while (static_cast<double>(p) < x) p <<= 1;
    return p;
}

inline std::size_t clamp_size(std::size_t v, std::size_t lo, std::size_t hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

} // namespace detail

// ---- interior: flat-weight recovery sequence ---------------------------------
//
// One (or two) transitions of the optimal interior profile, dilated by the
// constant weight r^a and the eps^{1-a} layer width, evaluated against
//   eps^{1-a} int u'^2 r^a + eps^{a-1} int W(u) r^{-a}
// on A = (0,1). The energy approaches sigma per interface.
inline std::vector<sweep_record> interior_sweep(const experiment_config& cfg) {
    validate(cfg);
    const frac_params p = make_params(cfg.a);
    const double_well W = double_well::quartic();
    const double sigma = sigma_constant(W);
    const double r = 0.25; // distance of A from the virtual boundary; weight = r^a
    const ode_profile theta = make_modica_profile(W);

    std::vector<sweep_record> out;
    for (double eps : cfg.eps_list) {
        const double layer = std::pow(eps, 1.0 - p.a) * std::pow(r, p.a);
        auto u = [&](double x) -> double {
            if (cfg.jumps == 0) return W.lo;
            if (cfg.jumps == 1) return theta((x - 0.5) / layer);
            return x < 0.5 ? theta((x - 1.0 / 3.0) / layer) : theta((2.0 / 3.0 - x) / layer);
        };
        auto du = [&](double x) -> double { // theta' = sqrt(W(theta)) exactly
            if (cfg.jumps == 0) return 0.0;
            const double sign = (cfg.jumps == 2 && x >= 0.5) ? -1.0 : 1.0;
            return sign * std::sqrt(std::max(0.0, W(u(x)))) / layer;
        };
        const std::size_t n_cells =
            cfg.grid ? cfg.grid
                     : detail::clamp_size(static_cast<std::size_t>(8.0 / layer), 2048, 65536);
        const double wpos = std::pow(r, p.a), wneg = std::pow(r, -p.a);
        const double c1 = std::pow(eps, 1.0 - p.a), c2 = std::pow(eps, p.a - 1.0);
        double grad_term = 0.0, well_term = 0.0;
        const double h = 1.0 / static_cast<double>(n_cells);
        for (std::size_t c = 0; c < n_cells; ++c) {
            const double x0 = h * static_cast<double>(c);
            grad_term += fracphase::detail::gauss8(
                [&](double x) { const double d = du(x); return d * d; }, x0, x0 + h);
            well_term += fracphase::detail::gauss8([&](double x) { return W(u(x)); }, x0, x0 + h);
        }
        sweep_record rec;
        rec.eps = eps;
        rec.nonlocal = c1 * wpos * grad_term;
        rec.potential = c2 * wneg * well_term;
        rec.energy_total = rec.nonlocal + rec.potential;
        rec.predicted_limit = sigma * static_cast<double>(cfg.jumps);
        rec.relative_gap = detail::relative_gap(rec.energy_total, rec.predicted_limit);
        out.push_back(rec);
    }
    return out;
}

// ---- boundary: pinned-jump minimization of G_eps -----------------------------

namespace detail {

/// G_eps[v, E] over profiles pinned to the wells at the interval ends,
/// minimized by the same projected scheme as the whole-line problem.
struct interval_minimizer {
    energy_breakdown best;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> v;
};

inline interval_minimizer minimize_pinned(const frac_params& p, double eps,
                                          const double_well& V, double D_s, double x_len,
                                          std::size_t n, const kappa_options& opt = {}) {
    const double h = x_len / static_cast<double>(n - 1);
    gagliardo_form form(n, h, p.s);
    const scalings sc = make_scalings(p, eps);
    const double cnl = std::pow(eps, 1.0 - p.a) / D_s;
    std::vector<double> wpot(n, h * sc.lambda_small);
    wpot.front() *= 0.5;
    wpot.back() *= 0.5;

    auto energy = [&](const std::vector<double>& v) {
        energy_breakdown eb;
        eb.nonlocal = cnl * form.energy(v);
        double pot = 0.0;
        for (std::size_t i = 0; i < n; ++i) pot += wpot[i] * V(v[i]);
        eb.potential = pot;
        eb.total = eb.nonlocal + eb.potential;
        return eb;
    };
    auto gradient = [&](const std::vector<double>& v, std::vector<double>& g) {
        g.assign(n, 0.0);
        form.add_gradient(v, g);
        for (double& gi : g) gi *= cnl;
        for (std::size_t i = 0; i < n; ++i) g[i] += wpot[i] * V.deriv(v[i]);
        g.front() = g.back() = 0.0;
    };

    const double lam = sc.lambda_big;
    std::vector<double> v(n);
    const double mid = 0.5 * (V.lo + V.hi), amp = 0.5 * (V.hi - V.lo);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = h * static_cast<double>(i) - 0.5 * x_len;
        v[i] = mid + amp * std::tanh(x / lam);
    }
    fracphase::detail::project_profile(v, V);

    interval_minimizer res;
    energy_breakdown eb = energy(v);
    std::vector<double> g(n), w(n);
    double step = D_s * std::pow(h, 2.0 * p.s - 1.0) / (16.0 * std::pow(eps, 1.0 - p.a));
    std::vector<double> hist{eb.total};
    bool converged = false;
    std::size_t it = 0;
    for (; it < opt.max_iterations; ++it) {
        gradient(v, g);
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            w = v;
            for (std::size_t i = 0; i < n; ++i) w[i] -= step * g[i];
            fracphase::detail::project_profile(w, V);
            const energy_breakdown ew = energy(w);
            if (ew.total <= eb.total) {
                v.swap(w);
                eb = ew;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        hist.push_back(eb.total);
        if (!moved) { converged = true; break; }
        step = std::min(step * 1.5, 1e9);
        if (hist.size() > opt.tol_window) {
            const double before = hist[hist.size() - 1 - opt.tol_window];
            if (before - eb.total < opt.rel_tol * std::abs(eb.total)) {
                converged = true;
                break;
            }
        }
    }
    res.best = eb;
    res.iterations = it;
    res.converged = converged;
    res.v = std::move(v);
    return res;
}

} // namespace detail

inline std::vector<sweep_record> boundary_sweep(const experiment_config& cfg) {
    validate(cfg);
    const frac_params p = make_params(cfg.a);
    const double_well V = double_well::quartic();
    const double D = constants(p.s).D_s;
    const double kappa = kappa_s(p, V, D).value;

    std::vector<sweep_record> out;
    for (double eps : cfg.eps_list) {
        const scalings sc = make_scalings(p, eps);
        const std::size_t n =
            cfg.grid ? cfg.grid
                     : detail::clamp_size(
                           detail::pow2_at_least(16.0 / sc.lambda_big) + 1, 1025, 32769);
        const auto res = detail::minimize_pinned(p, eps, V, D, 1.0, n);
        sweep_record rec;
        rec.eps = eps;
        rec.nonlocal = res.best.nonlocal;
        rec.potential = res.best.potential;
        rec.energy_total = res.best.total;
        rec.predicted_limit = kappa;
        rec.relative_gap = detail::relative_gap(rec.energy_total, rec.predicted_limit);
        out.push_back(rec);
    }
    return out;
}

// ---- sharpness of the trace constant -----------------------------------------
//
// The piecewise-linear unit step smeared over the layer [-L/2, L/2],
// L = lambda_big, extended by constants and lifted by the Poisson kernel.
// Both sides of
//   eps^{1-a} int_{(-1,1)x(0,1)} |grad u|^2 y^a
//     = (eps^{1-a}/D_s) int_{(-1,1)^2} |v(x)-v(x')|^2/|x-x'|^{1+2s} + R_eps
// stabilize to the same constant because eps^{1-a}/lambda_big^{2s-1} = 1.
inline std::vector<sweep_record> sharpness_experiment(const experiment_config& cfg) {
    validate(cfg);
    const frac_params p = make_params(cfg.a);
    const double D = constants(p.s).D_s;
    std::vector<sweep_record> out;
    for (double eps : cfg.eps_list) {
        const scalings sc = make_scalings(p, eps);
        const double L = sc.lambda_big;
        const std::size_t n =
            cfg.grid ? cfg.grid
                     : detail::clamp_size(detail::pow2_at_least(32.0 / L) + 1, 4097, 32769);
        trace_fn v = sample_trace(-1.0, 1.0, n, [&](double x) {
            return std::clamp((x + 0.5 * L) / L, 0.0, 1.0);
        });
        const std::vector<double> yg = graded_y_grid(1.0, 256, p.a);
        const extension_result ext = poisson_extend(v, yg, p.s);
        const double pref = std::pow(eps, 1.0 - p.a);
        const double lhs = pref * ext.energy;
        const double rhs = pref / D * gagliardo(v, p.s);
        sweep_record rec;
        rec.eps = eps;
        rec.energy_total = lhs;
        rec.nonlocal = rhs;
        rec.potential = 0.0;
        rec.predicted_limit = rhs;
        rec.relative_gap = detail::relative_gap(lhs, rhs);
        out.push_back(rec);
    }
    return out;
}

// ---- boundary effect: H_eps of the rescaled extension profile ----------------

inline std::vector<sweep_record> boundary_effect_check(const experiment_config& cfg) {
    validate(cfg);
    const frac_params p = make_params(cfg.a);
    const double_well V = double_well::quartic();
    const double D = constants(p.s).D_s;
    const double kappa = kappa_s(p, V, D).value;

    const double T = cfg.profile_T;
    const auto nprof = static_cast<std::size_t>(std::llround(64.0 * T)) + 1;
    const profile_solution sol = kappa_T(p, V, D, T, nprof);

    std::vector<sweep_record> out;
    for (double eps : cfg.eps_list) {
        const scalings sc = make_scalings(p, eps);
        const double L = sc.lambda_big;
        const std::size_t n =
            cfg.grid ? cfg.grid
                     : detail::clamp_size(detail::pow2_at_least(48.0 / L) + 1, 4097, 32769);
        trace_fn v = sample_trace(-1.0, 1.0, n,
                                  [&](double x) { return sol.profile(x / L); });
        const std::vector<double> yg = graded_y_grid(1.0, 192, p.a);
        const extension_result ext = poisson_extend(v, yg, p.s);
        sweep_record rec;
        rec.eps = eps;
        rec.nonlocal = std::pow(eps, 1.0 - p.a) * ext.energy;
        rec.potential = sc.lambda_small * trapezoid(v, [&](double t) { return V(t); });
        rec.energy_total = rec.nonlocal + rec.potential;
        rec.predicted_limit = kappa;
        rec.relative_gap = detail::relative_gap(rec.energy_total, rec.predicted_limit);
        out.push_back(rec);
    }
    return out;
}

// ---- wall effect: recovery against the genuine singular weight ---------------
//
// u = beta in the bulk with trace value gamma: u_eps(x) = phi(d(x)/eps) with
// phi(t) = theta(t^{1-a}/(1-a)), evaluated against the true d(x)^a weight.
// Both energy terms share the x^{-a} density
//   [theta'(omega)^2 + W(theta(omega))] x^{-a} eps^{a-1},  omega = (x/eps)^{1-a}/(1-a),
// and the limit is primitive(beta) - primitive(gamma) per unit wall area.
inline std::vector<sweep_record> wall_effect_check(const experiment_config& cfg) {
    validate(cfg);
    const frac_params p = make_params(cfg.a);
    const double_well W = double_well::quartic();
    if (!(cfg.gamma > W.lo && cfg.gamma < W.hi) && cfg.gamma != W.hi)
        throw std::invalid_argument("wall: gamma must lie in (alpha, beta]");
    const well_primitive prim(W);
    const double predicted = prim.total() - prim(cfg.gamma);
    const double R = 0.5; // depth of the boundary strip

    std::vector<sweep_record> out;
    for (double eps : cfg.eps_list) {
        sweep_record rec;
        rec.eps = eps;
        rec.predicted_limit = predicted;
        if (cfg.gamma == W.hi) { // no wall mismatch; u is constant
            rec.relative_gap = detail::relative_gap(0.0, predicted);
            out.push_back(rec);
            continue;
        }
        const ode_profile theta = make_wall_profile(W, cfg.gamma);
        auto omega = [&](double x) { return std::pow(x / eps, 1.0 - p.a) / (1.0 - p.a); };
        const std::size_t n_cells =
            cfg.grid ? cfg.grid
                     : detail::clamp_size(static_cast<std::size_t>(64.0 * R / eps), 4096, 65536);
        // graded cells x_j = R (j/n)^2 resolve both the weight and the eps-layer;
        // theta'(omega)^2 = W(theta(omega)) on the profile, so the two energy
        // densities coincide pointwise and one quadrature serves both terms
        double term = 0.0;
        const double ca = std::pow(eps, p.a - 1.0);
        double x0 = 0.0;
        for (std::size_t c = 0; c < n_cells; ++c) {
            const double x1 =
                R * std::pow(static_cast<double>(c + 1) / static_cast<double>(n_cells), 2.0);
            term += fracphase::detail::gauss8(
                [&](double x) { return W(theta(omega(x))) * std::pow(x, -p.a); }, x0, x1);
            x0 = x1;
        }
        rec.nonlocal = ca * term;
        rec.potential = ca * term;
        rec.energy_total = rec.nonlocal + rec.potential;
        rec.relative_gap = detail::relative_gap(rec.energy_total, rec.predicted_limit);
        out.push_back(rec);
    }
    return out;
}

/// Fitted Lipschitz prefactor: max |u_eps'| over x >= r, times eps^{1-a} r^a.
/// Stable across eps when the recovery sequence obeys its Lipschitz bound.
inline double wall_lipschitz_constant(const experiment_config& cfg, double eps, double r) {
    const frac_params p = make_params(cfg.a);
    const double_well W = double_well::quartic();
    const ode_profile theta = make_wall_profile(W, cfg.gamma);
    double worst = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        const double x = r + (0.5 - r) * static_cast<double>(i) / 4096.0;
        const double om = std::pow(x / eps, 1.0 - p.a) / (1.0 - p.a);
        const double du =
            std::sqrt(std::max(0.0, W(theta(om)))) * std::pow(x / eps, -p.a) / eps;
        worst = std::max(worst, std::abs(du));
    }
    return worst * std::pow(eps, 1.0 - p.a) * std::pow(r, p.a);
}

// ---- dispatch and reports -----------------------------------------------------

inline report run(const experiment_config& cfg) {
    validate(cfg);
    report rep;
    rep.config = cfg;
    if (cfg.experiment == "interior") rep.records = interior_sweep(cfg);
    else if (cfg.experiment == "boundary") rep.records = boundary_sweep(cfg);
    else if (cfg.experiment == "sharpness") rep.records = sharpness_experiment(cfg);
    else if (cfg.experiment == "boundary-effect") rep.records = boundary_effect_check(cfg);
    else rep.records = wall_effect_check(cfg);
    return rep;
}

namespace detail {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

inline std::string to_csv(const report& rep) {
    std::string out = "eps,energy_total,nonlocal,potential,predicted_limit,relative_gap\n";
    for (const auto& r : rep.records) {
        out += detail::fmt17(r.eps) + ',' + detail::fmt17(r.energy_total) + ',' +
               detail::fmt17(r.nonlocal) + ',' + detail::fmt17(r.potential) + ',' +
               detail::fmt17(r.predicted_limit) + ',' + detail::fmt17(r.relative_gap) + '\n';
    }
    return out;
}

} // namespace fracphase
