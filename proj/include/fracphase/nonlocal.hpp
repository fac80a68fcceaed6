#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracphase/fft.hpp"
#include "fracphase/grid.hpp"
#include "fracphase/params.hpp"
#include "fracphase/special.hpp"

namespace fracphase {

namespace detail {

// second antiderivative of the kernel r^{-1-2s}
inline double kernel_k2(double r, double s) {
    return std::pow(r, 1.0 - 2.0 * s) / (2.0 * s * (2.0 * s - 1.0));
}

// exact kernel mass over a cell pair of width h with gap g (one ordering)
inline double cellpair_mass(double g, double h, double s) {
    return kernel_k2(g, s) - 2.0 * kernel_k2(g + h, s) + kernel_k2(g + 2.0 * h, s);
}

// int_0^h int_0^h (m1 u + m2 w)^2 (u+w)^{-1-2s} du dw = (m1^2+m2^2) A + 2 m1 m2 B
struct adjacent_coeffs {
    double A;
    double B;
};

inline adjacent_coeffs adjacent_cell_coeffs(double h, double s) {
    const double p1 = 1.0 - 2.0 * s, p2 = 2.0 - 2.0 * s, p3 = 3.0 - 2.0 * s;
    auto F = [&](double t) {
        return std::pow(t, p3) / p3 - 2.0 * h * std::pow(t, p2) / p2 +
               h * h * std::pow(t, p1) / p1;
    };
    const double J2 = F(2.0 * h) - F(h);
    const double A = (std::pow(h, p3) / p3 - J2) / (2.0 * s);
    auto G = [&](double t) { return std::pow(t, p3) / p3 - h * std::pow(t, p2) / p2; };
    const double J1 = G(2.0 * h) - G(h);
    const double B = (J1 - std::pow(h, p3) / p3) / p1 + (J2 - std::pow(h, p3) / p3) / (2.0 * s);
    return {A, B};
}

} // namespace detail

/// Cell-pair quadrature of the double integral
///   int_E int_E |v(x) - v(x')|^2 / |x - x'|^{1+2s} dx dx'
/// for piecewise-linear v on a uniform grid. Non-adjacent cell pairs use the
/// cell-midpoint values against the exact kernel mass of the pair; adjacent
/// and same-cell pairs integrate the kernel against the piecewise-linear
/// difference exactly (the |v(x)-v(x')|^2 ~ |x-x'|^2 vanishing kills the
/// singularity, so every term is finite). Dropping the same-cell terms instead
/// would bias the value low by O(h^{2-2s}).
///
/// The far-field sum is a symmetric Toeplitz quadratic form; for large grids
/// it is evaluated by an FFT multiply, which computes the same sums.
class gagliardo_form {
public:
    gagliardo_form(std::size_t n, double h, double s) : n_(n), h_(h), s_(s) {
        if (n < 2) throw std::invalid_argument("gagliardo_form: need >= 2 nodes");
        if (!(h > 0.0)) throw std::invalid_argument("gagliardo_form: need h > 0");
        if (!(s > 0.5 && s < 1.0)) throw std::invalid_argument("gagliardo_form: s outside (1/2,1)");
        const std::size_t m = n - 1; // cells
        // symmetric pair weights, both orderings included
        kernel_.assign(m, 0.0);
        for (std::size_t d = 2; d < m; ++d)
            kernel_[d] = 2.0 * detail::cellpair_mass((static_cast<double>(d) - 1.0) * h, h, s);
        diag_ = 2.0 * std::pow(h, 3.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
        const auto ab = detail::adjacent_cell_coeffs(h, s);
        adjA_ = 2.0 * ab.A;
        adjB_ = 2.0 * ab.B;
        use_fft_ = m >= 64;
        if (use_fft_) {
            const std::size_t p = next_pow2(2 * m);
            std::vector<cplx> ker(p, cplx(0, 0));
            for (std::size_t d = 0; d < m; ++d) {
                ker[d] = kernel_[d];
                if (d > 0) ker[p - d] = kernel_[d];
            }
            fft_inplace(ker, -1);
            kernel_hat_ = std::move(ker);
            pad_ = p;
        }
        // row sums of the Toeplitz kernel via prefix sums (kernel_[0] == 0)
        std::vector<double> pre(m, 0.0);
        pre[0] = kernel_[0];
        for (std::size_t d = 1; d < m; ++d) pre[d] = pre[d - 1] + kernel_[d];
        row_sum_.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) row_sum_[i] = pre[i] + pre[m - 1 - i];
    }

    std::size_t nodes() const { return n_; }
    double spacing() const { return h_; }

    double energy(const std::vector<double>& v) const {
        check(v);
        const std::size_t m = n_ - 1;
        std::vector<double> vm(m), sl(m);
        midpoints_slopes(v, vm, sl);
        double e = far_energy(vm);
        double loc = 0.0;
        for (std::size_t i = 0; i < m; ++i) loc += sl[i] * sl[i];
        e += diag_ * loc;
        double la = 0.0, lb = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            la += sl[i] * sl[i] + sl[i + 1] * sl[i + 1];
            lb += sl[i] * sl[i + 1];
        }
        e += adjA_ * la + 2.0 * adjB_ * lb;
        return e;
    }

    /// accumulate dE/dv into g (g must have n entries)
    void add_gradient(const std::vector<double>& v, std::vector<double>& g) const {
        check(v);
        const std::size_t m = n_ - 1;
        std::vector<double> vm(m), sl(m);
        midpoints_slopes(v, vm, sl);
        // far field: dE/dvm_i = 2 vm_i R_i - 2 C_i
        std::vector<double> conv = kernel_times(vm);
        for (std::size_t i = 0; i < m; ++i) {
            const double d = vm[i] * row_sum_[i] - conv[i];
            g[i] += d;     // chain through vm = (v_i + v_{i+1})/2
            g[i + 1] += d;
        }
        // local terms in the slopes
        std::vector<double> gs(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) gs[i] += 2.0 * diag_ * sl[i];
        for (std::size_t i = 0; i + 1 < m; ++i) {
            gs[i] += 2.0 * adjA_ * sl[i] + 2.0 * adjB_ * sl[i + 1];
            gs[i + 1] += 2.0 * adjA_ * sl[i + 1] + 2.0 * adjB_ * sl[i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            g[i] -= gs[i] / h_;
            g[i + 1] += gs[i] / h_;
        }
    }

private:
    void check(const std::vector<double>& v) const {
        if (v.size() != n_) throw std::invalid_argument("gagliardo_form: size mismatch");
    }

    void midpoints_slopes(const std::vector<double>& v, std::vector<double>& vm,
                          std::vector<double>& sl) const {
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            vm[i] = 0.5 * (v[i] + v[i + 1]);
            sl[i] = (v[i + 1] - v[i]) / h_;
        }
    }

    // (K vm)_i with K_{ij} = kernel_[|i-j|]
    std::vector<double> kernel_times(const std::vector<double>& vm) const {
        const std::size_t m = vm.size();
        std::vector<double> out(m, 0.0);
        if (use_fft_) {
            std::vector<cplx> x(pad_, cplx(0, 0));
            for (std::size_t i = 0; i < m; ++i) x[i] = vm[i];
            fft_inplace(x, -1);
            for (std::size_t i = 0; i < pad_; ++i) x[i] *= kernel_hat_[i];
            fft_inplace(x, +1);
            for (std::size_t i = 0; i < m; ++i) out[i] = x[i].real();
        } else {
            for (std::size_t i = 0; i < m; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < m; ++j) acc += kernel_[i > j ? i - j : j - i] * vm[j];
                out[i] = acc;
            }
        }
        return out;
    }

    double far_energy(const std::vector<double>& vm) const {
        const std::size_t m = vm.size();
        const std::vector<double> conv = kernel_times(vm);
        double e = 0.0;
        for (std::size_t i = 0; i < m; ++i) e += vm[i] * (vm[i] * row_sum_[i] - conv[i]);
        return e;
    }

    std::size_t n_;
    double h_, s_;
    std::vector<double> kernel_;   // pair weight by cell distance (0 for d < 2)
    std::vector<double> row_sum_;
    std::vector<cplx> kernel_hat_;
    std::size_t pad_ = 0;
    double diag_ = 0.0, adjA_ = 0.0, adjB_ = 0.0;
    bool use_fft_ = false;
};

/// Gagliardo seminorm energy of a sampled trace.
inline double gagliardo(const trace_fn& v, double s) {
    gagliardo_form form(v.size(), v.h(), s);
    return form.energy(v.v);
}

struct energy_breakdown {
    double nonlocal = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

/// trapezoid rule for int_E f(v) on the trace grid
template <class F>
double trapezoid(const trace_fn& v, F&& f) {
    const double h = v.h();
    double acc = 0.5 * (f(v.v.front()) + f(v.v.back()));
    for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += f(v.v[i]);
    return acc * h;
}

/// G_eps[v, E] = (eps^{1-a}/D_s) [v]^2 + lambda_eps int_E V(v).
inline energy_breakdown g_energy(const trace_fn& v, const frac_params& p, double eps,
                                 const double_well& V, double D_s) {
    if (!(eps > 0.0)) throw std::invalid_argument("g_energy: eps must be positive");
    if (!(D_s > 0.0) || !std::isfinite(D_s))
        throw std::invalid_argument("g_energy: D_s must be positive");
    const scalings sc = make_scalings(p, eps);
    energy_breakdown out;
    out.nonlocal = std::pow(eps, 1.0 - p.a) / D_s * gagliardo(v, p.s);
    out.potential = sc.lambda_small * trapezoid(v, [&V](double t) { return V(t); });
    out.total = out.nonlocal + out.potential;
    return out;
}

/// Nondecreasing rearrangement: node values sorted ascending on the same grid.
inline trace_fn monotone_rearrange(const trace_fn& v) {
    trace_fn out = v;
    std::sort(out.v.begin(), out.v.end());
    return out;
}

/// Clamp node values to [alpha'+delta, beta'-delta].
inline trace_fn truncate(const trace_fn& v, double delta, double well_lo, double well_hi) {
    if (!(delta > 0.0 && delta < 0.5 * (well_hi - well_lo)))
        throw std::invalid_argument("truncate: delta outside (0, (beta'-alpha')/2)");
    trace_fn out = v;
    const double lo = well_lo + delta, hi = well_hi - delta;
    for (double& t : out.v) t = std::clamp(t, lo, hi);
    return out;
}

/// min of V over [lo+delta, hi-delta], by dense sampling (V is continuous and
/// the minimum of a double well on that interval sits at the clamped ends for
/// every potential we construct, but sampling keeps this honest for user data)
inline double plateau_min(const double_well& V, double delta) {
    const double a = V.lo + delta, b = V.hi - delta;
    double m = std::min(V(a), V(b));
    for (int i = 1; i < 4096; ++i)
        m = std::min(m, V(a + (b - a) * static_cast<double>(i) / 4096.0));
    return m;
}

/// Two-plateau lower bound for G_1[v, J] when fractions a_frac / b_frac of the
/// interval sit delta-close to the two wells:
///   C_s (b'-a'-2d)^2 / |J|^{2s-1} * {1 - (1-a)^{1-2s} - (1-b)^{1-2s}} + C_delta,
/// C_s = 2/(2s(2s-1) D_s). C_delta comes from minimizing the interaction
/// term against the potential floor m_delta |J|(1-a-b); carrying the 1/D_s of
/// the functional through that minimization gives the D_s^{-1/(2s)} factor.
/// `four_term` adds the +(1-a-b)^{1-2s} term the raw interaction integral
/// produces before the bracket is relaxed to its displayed three-term form.
inline double lemma42_lower_bound(double J_len, double a_frac, double b_frac, double delta,
                                  double s, const double_well& V, double D_s,
                                  bool four_term = false) {
    if (!(J_len > 0.0)) throw std::invalid_argument("lemma42: interval length must be positive");
    if (!(a_frac >= 0.0 && a_frac < 1.0 && b_frac >= 0.0 && b_frac < 1.0 &&
          a_frac + b_frac < 1.0))
        throw std::invalid_argument("lemma42: fractions must lie in [0,1) with a+b < 1");
    if (!(delta > 0.0 && delta < 0.5 * (V.hi - V.lo)))
        throw std::invalid_argument("lemma42: delta outside (0, (beta'-alpha')/2)");
    const double gap = V.hi - V.lo - 2.0 * delta;
    const double C_s = 2.0 / (2.0 * s * (2.0 * s - 1.0) * D_s);
    double bracket = 1.0 - std::pow(1.0 - a_frac, 1.0 - 2.0 * s) -
                     std::pow(1.0 - b_frac, 1.0 - 2.0 * s);
    if (four_term) bracket += std::pow(1.0 - a_frac - b_frac, 1.0 - 2.0 * s);
    const double md = plateau_min(V, delta);
    const double C_delta = std::pow(2.0, 1.0 / (2.0 * s)) *
                           std::pow(2.0 * s, (2.0 * s - 1.0) / (2.0 * s)) *
                           std::pow(gap, 1.0 / s) *
                           std::pow(md, (2.0 * s - 1.0) / (2.0 * s)) /
                           ((2.0 * s - 1.0) * std::pow(D_s, 1.0 / (2.0 * s)));
    return C_s * gap * gap / std::pow(J_len, 2.0 * s - 1.0) * bracket + C_delta;
}

/// Whole-line transition bound: G_1[v, R] >= (2s)^{(2s-1)/2s}/(2s-1)
///   * ((b'-a'-2d)^2 / D_s)^{1/2s} * m_delta^{(2s-1)/2s}.
inline double lemma45_lower_bound(double delta, double s, const double_well& V, double D_s) {
    if (!(delta > 0.0 && delta < 0.5 * (V.hi - V.lo)))
        throw std::invalid_argument("lemma45: delta outside (0, (beta'-alpha')/2)");
    const double gap = V.hi - V.lo - 2.0 * delta;
    const double md = plateau_min(V, delta);
    return std::pow(2.0 * s, (2.0 * s - 1.0) / (2.0 * s)) / (2.0 * s - 1.0) *
           std::pow(gap * gap / D_s, 1.0 / (2.0 * s)) *
           std::pow(md, (2.0 * s - 1.0) / (2.0 * s));
}

} // namespace fracphase
