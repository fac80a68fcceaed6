#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracphase/grid.hpp"
#include "fracphase/nonlocal.hpp"
#include "fracphase/params.hpp"

namespace fracphase {

namespace detail {

// one RK4 step of theta' = sqrt(W(theta)), clamped into [lo, hi]
inline double rk4_sqrtW_step(const double_well& w, double th, double dt) {
    auto f = [&w](double t) { return std::sqrt(std::max(0.0, w(t))); };
    const double k1 = f(th);
    const double k2 = f(th + 0.5 * dt * k1);
    const double k3 = f(th + 0.5 * dt * k2);
    const double k4 = f(th + dt * k3);
    return std::clamp(th + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), w.lo, w.hi);
}

} // namespace detail

/// Transition profile theta' = sqrt(W(theta)) integrated from theta(t0) = v0,
/// cached on a fixed-step table and evaluated by Hermite interpolation with
/// the exact slope sqrt(W). Saturates at the wells outside the table.
class ode_profile {
public:
    ode_profile(const double_well& w, double t0, double v0, double t_span = 80.0,
                double step = 2e-3)
        : w_(w), t0_(t0), step_(step) {
        if (!(v0 > w.lo && v0 < w.hi))
            throw std::invalid_argument("ode_profile: initial value must lie between the wells");
        const auto nsteps = static_cast<std::size_t>(t_span / step);
        fwd_.reserve(nsteps + 1);
        bwd_.reserve(nsteps + 1);
        double th = v0;
        fwd_.push_back(th);
        for (std::size_t i = 0; i < nsteps; ++i) {
            th = detail::rk4_sqrtW_step(w_, th, step_);
            fwd_.push_back(th);
            if (w.hi - th < 1e-15) break;
        }
        th = v0;
        bwd_.push_back(th);
        for (std::size_t i = 0; i < nsteps; ++i) {
            th = detail::rk4_sqrtW_step(w_, th, -step_);
            bwd_.push_back(th);
            if (th - w.lo < 1e-15) break;
        }
    }

    double operator()(double t) const {
        const double u = t - t0_;
        const std::vector<double>& tab = u >= 0.0 ? fwd_ : bwd_;
        const double pos = std::abs(u) / step_;
        const auto k = static_cast<std::size_t>(pos);
        if (k + 1 >= tab.size()) return tab.back();
        const double f = pos - static_cast<double>(k);
        const double sgn = u >= 0.0 ? 1.0 : -1.0;
        const double y0 = tab[k], y1 = tab[k + 1];
        const double m0 = sgn * slope(y0) * step_, m1 = sgn * slope(y1) * step_;
        const double f2 = f * f, f3 = f2 * f;
        return (2 * f3 - 3 * f2 + 1) * y0 + (f3 - 2 * f2 + f) * m0 +
               (-2 * f3 + 3 * f2) * y1 + (f3 - f2) * m1;
    }

private:
    double slope(double th) const { return std::sqrt(std::max(0.0, w_(th))); }

    double_well w_;
    double t0_;
    double step_;
    std::vector<double> fwd_, bwd_;
};

/// The optimum interior transition profile, theta(0) = (lo+hi)/2. For the
/// built-in quartic this is tanh(t/2).
inline ode_profile make_modica_profile(const double_well& w) {
    return ode_profile(w, 0.0, 0.5 * (w.lo + w.hi));
}

inline double modica_profile(const double_well& w, double t) {
    return make_modica_profile(w)(t);
}

/// Wall-contact profile: theta(0) = gamma rising toward the upper well.
inline ode_profile make_wall_profile(const double_well& w, double gamma) {
    if (!(gamma > w.lo && gamma < w.hi))
        throw std::invalid_argument("wall_profile: gamma outside (lo, hi)");
    return ode_profile(w, 0.0, gamma);
}

inline double wall_profile(const double_well& w, double gamma, double t) {
    if (t < 0.0) throw std::invalid_argument("wall_profile: defined on [0, infinity)");
    return make_wall_profile(w, gamma)(t);
}

/// Recovery profile induced by the singular weight: phi(t) = theta(t^{1-a}/(1-a)).
inline double wall_recovery_profile(const ode_profile& theta, double a, double t) {
    return theta(std::pow(t, 1.0 - a) / (1.0 - a));
}

// ---- the optimal-profile problem ---------------------------------------------

/// Whole-line energy  G_1[v, R] = (1/D_s) [v]^2_{R} + int_R V(v)  for profiles
/// equal to the wells outside [-T, T], discretized on the core grid. The core
/// uses the cell-pair quadrature; the core-tail interactions integrate the
/// kernel against the piecewise-linear core exactly (per cell, (c0 + c1 tau)^2
/// against tau^{-2s} in the distance tau to the core edge), and the tail-tail
/// interaction is the closed-form constant 2 (b'-a')^2 (2T)^{1-2s}/(2s(2s-1)).
/// Endpoint values must equal the wells; the edge cells then carry c0 = 0,
/// which is what keeps their tau^{1-2s} term finite.
class line_profile_energy {
public:
    line_profile_energy(double T, std::size_t n, double s, const double_well& V, double D_s)
        : T_(T), n_(n), s_(s), V_(V), D_(D_s), form_(n, 2.0 * T / static_cast<double>(n - 1), s) {
        if (!(T > 0.0)) throw std::invalid_argument("line_profile_energy: T must be positive");
        if (n < 64) throw std::invalid_argument("line_profile_energy: need at least 64 nodes");
        if (!(D_s > 0.0)) throw std::invalid_argument("line_profile_energy: D_s must be positive");
        h_ = 2.0 * T / static_cast<double>(n - 1);
        tail_const_ = 2.0 * (V.hi - V.lo) * (V.hi - V.lo) *
                      std::pow(2.0 * T, 1.0 - 2.0 * s) / (2.0 * s * (2.0 * s - 1.0));
        wpot_.assign(n, h_);
        wpot_.front() = wpot_.back() = 0.5 * h_;
    }

    double T() const { return T_; }
    std::size_t nodes() const { return n_; }
    double spacing() const { return h_; }
    const gagliardo_form& core() const { return form_; }

    energy_breakdown energy(const std::vector<double>& v) const {
        check_pins(v);
        energy_breakdown out;
        out.nonlocal = (form_.energy(v) + tail_energy(v, nullptr) + tail_const_) / D_;
        double pot = 0.0;
        for (std::size_t i = 0; i < n_; ++i) pot += wpot_[i] * V_(v[i]);
        out.potential = pot;
        out.total = out.nonlocal + out.potential;
        return out;
    }

    void gradient(const std::vector<double>& v, std::vector<double>& g) const {
        check_pins(v);
        g.assign(n_, 0.0);
        form_.add_gradient(v, g);
        tail_energy(v, &g);
        for (double& gi : g) gi /= D_;
        for (std::size_t i = 0; i < n_; ++i) g[i] += wpot_[i] * V_.deriv(v[i]);
        g.front() = g.back() = 0.0; // pinned
    }

private:
    void check_pins(const std::vector<double>& v) const {
        if (v.size() != n_) throw std::invalid_argument("line_profile_energy: size mismatch");
        const double scale = std::max(1.0, std::abs(V_.hi - V_.lo));
        if (std::abs(v.front() - V_.lo) > 1e-9 * scale || std::abs(v.back() - V_.hi) > 1e-9 * scale)
            throw std::invalid_argument(
                "line_profile_energy: endpoint values must equal the wells (otherwise the "
                "whole-line energy against constant tails is infinite)");
    }

    // sum over both tails of 2*(1/2s) int_core (v - well)^2 (dist to edge)^{-2s},
    // exact for piecewise-linear v; optionally accumulates the gradient
    double tail_energy(const std::vector<double>& v, std::vector<double>* g) const {
        const double p1 = 1.0 - 2.0 * s_, p2 = 2.0 - 2.0 * s_, p3 = 3.0 - 2.0 * s_;
        double e = 0.0;
        for (int side = 0; side < 2; ++side) {
            const double well = side == 0 ? V_.hi : V_.lo;
            // tau = distance from this side's core edge, increasing inward;
            // node index of the cell endpoint at tau = k h
            auto idx = [&](std::size_t k) { return side == 0 ? n_ - 1 - k : k; };
            for (std::size_t k = 0; k + 1 < n_; ++k) {
                const double t1 = h_ * static_cast<double>(k);
                const double t2 = t1 + h_;
                const double c1 = (v[idx(k + 1)] - v[idx(k)]) / h_; // slope in tau
                if (k == 0) {
                    // edge cell: c0 = v(edge) - well = 0 by the pin, so the
                    // divergent tau^{1-2s} moment never appears
                    const double I2 = std::pow(t2, p3) / p3;
                    e += c1 * c1 * I2 / s_;
                    if (g) (*g)[idx(1)] += 2.0 * c1 * I2 / (s_ * h_);
                    continue;
                }
                const double c0 = v[idx(k)] - well - c1 * t1;
                const double I0 = (std::pow(t2, p1) - std::pow(t1, p1)) / p1;
                const double I1 = (std::pow(t2, p2) - std::pow(t1, p2)) / p2;
                const double I2 = (std::pow(t2, p3) - std::pow(t1, p3)) / p3;
                e += (c0 * c0 * I0 + 2.0 * c0 * c1 * I1 + c1 * c1 * I2) / s_;
                if (g) {
                    const double dc0 = (2.0 * c0 * I0 + 2.0 * c1 * I1) / s_;
                    const double dc1 = (2.0 * c0 * I1 + 2.0 * c1 * I2) / s_;
                    // c1 = (v_{k+1} - v_k)/h, c0 = v_k - well - c1 t1
                    (*g)[idx(k)] += dc0 * (1.0 + t1 / h_) - dc1 / h_;
                    (*g)[idx(k + 1)] += dc1 / h_ - dc0 * t1 / h_;
                }
            }
        }
        return e;
    }

    double T_;
    std::size_t n_;
    double s_;
    double_well V_;
    double D_;
    gagliardo_form form_;
    double h_ = 0.0;
    double tail_const_ = 0.0;
    std::vector<double> wpot_;
};

/// A computed transition profile with its energy split.
struct profile_solution {
    trace_fn profile;
    double T = 0.0;
    double nonlocal_part = 0.0;
    double potential_part = 0.0;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct kappa_options {
    std::size_t max_iterations = 60000;
    double rel_tol = 1e-9;     // relative decrease over tol_window steps
    std::size_t tol_window = 50;
};

namespace detail {

// clamp to the wells, sort nondecreasing, re-pin the ends; neither step can
// increase any term of the energy (clamping contracts every pairwise
// difference and lowers V outside the wells; sorting is the discrete monotone
// rearrangement, and it pushes values near beta' toward the heavier right-tail
// weights)
inline void project_profile(std::vector<double>& v, const double_well& V) {
    for (double& t : v) t = std::clamp(t, V.lo, V.hi);
    std::sort(v.begin(), v.end());
    v.front() = V.lo;
    v.back() = V.hi;
}

} // namespace detail

/// Minimize the whole-line energy over profiles pinned to the wells at +-T by
/// projected gradient descent with backtracking line search. Every iterate is
/// nondecreasing with values in [alpha', beta'], and the energy never
/// increases across a step (projections included). Non-convergence within the
/// iteration cap is reported in the result, not thrown.
inline profile_solution kappa_T(const frac_params& p, const double_well& V, double D_s,
                                double T, std::size_t n, const kappa_options& opt = {}) {
    if (!(T > 0.0)) throw std::invalid_argument("kappa_T: T must be positive");
    if (n < 64) throw std::invalid_argument("kappa_T: need at least 64 nodes");
    if (!(V.lo < V.hi)) throw std::invalid_argument("kappa_T: degenerate wells");
    line_profile_energy E(T, n, p.s, V, D_s);
    const double h = E.spacing();

    // tanh-shaped start across the middle half, inside the constraint set
    std::vector<double> v(n);
    const double mid = 0.5 * (V.lo + V.hi), amp = 0.5 * (V.hi - V.lo);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -T + h * static_cast<double>(i);
        v[i] = mid + amp * std::tanh(4.0 * x / T);
    }
    detail::project_profile(v, V);

    energy_breakdown eb = E.energy(v);
    std::vector<double> g(n), w(n);
    // first step from the h^{1-2s} scale of the nonlocal Hessian diagonal;
    // the backtracking line search corrects any misestimate
    const double lips = 16.0 * std::pow(h, 1.0 - 2.0 * p.s) / D_s + 4.0 * h;
    double step = 1.0 / lips;
    const double step_cap = 1e7 / lips;

    std::vector<double> hist;
    hist.reserve(1024);
    hist.push_back(eb.total);
    std::size_t it = 0;
    bool converged = false;
    for (; it < opt.max_iterations; ++it) {
        E.gradient(v, g);
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            w = v;
            for (std::size_t i = 0; i < n; ++i) w[i] -= step * g[i];
            detail::project_profile(w, V);
            const energy_breakdown ew = E.energy(w);
            if (ew.total <= eb.total) {
                v.swap(w);
                eb = ew;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        hist.push_back(eb.total);
        if (!moved) { converged = true; break; } // line search exhausted: stationary
        step = std::min(step * 1.5, step_cap);
        if (hist.size() > opt.tol_window) {
            const double before = hist[hist.size() - 1 - opt.tol_window];
            if (before - eb.total < opt.rel_tol * std::abs(eb.total)) {
                converged = true;
                break;
            }
        }
    }

    profile_solution sol;
    sol.profile = trace_fn(-T, T, v);
    sol.T = T;
    sol.nonlocal_part = eb.nonlocal;
    sol.potential_part = eb.potential;
    sol.value = eb.total;
    sol.iterations = it;
    sol.converged = converged;
    return sol;
}

struct kappa_result {
    double value = 0.0;               // extrapolated limit
    std::vector<profile_solution> stages;
    bool converged = false;
};

/// kappa_s as the T -> infinity limit of kappa_T over T in {8, 16, 32, 64} on
/// grids sharing one node spacing (so each stage's minimizer embeds in the
/// next stage's feasible set and the discrete values are nonincreasing), with
/// Aitken extrapolation of the last three values.
inline kappa_result kappa_s(const frac_params& p, const double_well& V, double D_s,
                            double h = 1.0 / 16.0, const kappa_options& opt = {}) {
    kappa_result out;
    out.converged = true;
    for (double T : {8.0, 16.0, 32.0, 64.0}) {
        const auto n = static_cast<std::size_t>(std::llround(2.0 * T / h)) + 1;
        out.stages.push_back(kappa_T(p, V, D_s, T, n, opt));
        out.converged = out.converged && out.stages.back().converged;
    }
    const double k1 = out.stages[1].value;
    const double k2 = out.stages[2].value;
    const double k3 = out.stages[3].value;
    const double d1 = k2 - k1, d2 = k3 - k2;
    out.value = k3;
    if (std::abs(d2 - d1) > 1e-14 * std::abs(k3) && d1 * d2 > 0.0) {
        const double aitken = k3 - d2 * d2 / (d2 - d1);
        // accept only a mild correction; otherwise keep the T=64 value
        if (std::isfinite(aitken) && std::abs(aitken - k3) < 0.05 * std::abs(k3))
            out.value = aitken;
    }
    return out;
}

} // namespace fracphase
