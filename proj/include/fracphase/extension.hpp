#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracphase/fft.hpp"
#include "fracphase/grid.hpp"
#include "fracphase/nonlocal.hpp"
#include "fracphase/special.hpp"

namespace fracphase {

/// Poisson kernel of the degenerate extension problem, normalized to unit mass
/// in x for every y (the only normalization for which constant traces extend
/// to constants):
///   P(x, y) = c_s y^{2s} / (x^2 + y^2)^{s + 1/2},  c_s = Gamma(s+1/2)/(sqrt(pi) Gamma(s)).
inline double poisson_kernel(double x, double y, double s) {
    if (!(y > 0.0)) throw std::invalid_argument("poisson_kernel: y must be positive");
    const double cs = gamma_fn(s + 0.5) / (std::sqrt(3.14159265358979323846264338) * gamma_fn(s));
    return cs * std::pow(y, 2.0 * s) / std::pow(x * x + y * y, s + 0.5);
}

/// Cumulative distribution machinery for the unit kernel p(z) = c_s (1+z^2)^{-s-1/2}.
/// F is tabulated on [0, 3] in the variable w = atan z (the integrand
/// c_s cos^{2s-1} w is analytic there) and continued by the asymptotic series
/// for z > 3; G(z) = int_{-infty}^z t p(t) dt is elementary. The convolution
/// weights only ever need F2c(z) = z F(z) - G(z) - z, which decays at +infty,
/// so large-z cancellation never enters.
class poisson_kernel_cdf {
public:
    explicit poisson_kernel_cdf(double s) : s_(s) {
        if (!(s > 0.5 && s < 1.0)) throw std::invalid_argument("kernel_cdf: s outside (1/2,1)");
        cs_ = gamma_fn(s + 0.5) / (std::sqrt(3.14159265358979323846264338) * gamma_fn(s));
        build_table();
    }

    double order() const { return s_; }

    double cdf(double z) const {
        if (z < 0.0) return 1.0 - cdf(-z);
        if (z > z_max_) return 1.0 - tail(z);
        return 0.5 + cs_ * cumulative(std::atan(z));
    }

    // int_{-infty}^z t p(t) dt  (even in z, <= 0, -> 0 at both infinities)
    double moment(double z) const {
        return cs_ * std::pow(1.0 + z * z, 0.5 * (1.0 - 2.0 * s_)) / (1.0 - 2.0 * s_);
    }

    // F2(z) - z for z >= 0, where F2 is the second antiderivative of p
    double f2c(double z) const {
        if (!(z >= 0.0)) throw std::invalid_argument("kernel_cdf: f2c needs z >= 0");
        double one_minus_F = (z > z_max_) ? tail(z) : 1.0 - cdf(z);
        return -z * one_minus_F - moment(z);
    }

private:
    void build_table() {
        const double w_max = std::atan(z_max_);
        const std::size_t cells = 2048;
        tw_.assign(cells + 1, 0.0);
        slope_.assign(cells + 1, 0.0);
        const double h = w_max / static_cast<double>(cells);
        auto f = [&](double w) { return std::pow(std::cos(w), 2.0 * s_ - 1.0); };
        for (std::size_t i = 0; i <= cells; ++i) slope_[i] = f(h * static_cast<double>(i));
        for (std::size_t i = 0; i < cells; ++i) {
            const double a = h * static_cast<double>(i);
            tw_[i + 1] = tw_[i] + detail::gauss8(f, a, a + h);
        }
        w_max_ = w_max;
    }

    // int_0^w cos^{2s-1}, cubic Hermite with exact slopes
    double cumulative(double w) const {
        const std::size_t cells = tw_.size() - 1;
        const double h = w_max_ / static_cast<double>(cells);
        double pos = w / h;
        if (pos <= 0.0) return 0.0;
        if (pos >= static_cast<double>(cells)) return tw_.back();
        std::size_t k = static_cast<std::size_t>(pos);
        const double u = pos - static_cast<double>(k);
        const double y0 = tw_[k], y1 = tw_[k + 1];
        const double m0 = slope_[k] * h, m1 = slope_[k + 1] * h;
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
               (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    }

    // 1 - F(z) = c_s sum_j C_j z^{-2s-2j} / (2s + 2j), C_j = binom(-(s+1/2), j)
    double tail(double z) const {
        double coef = 1.0;
        double acc = 0.0;
        const double zi = 1.0 / (z * z);
        double zp = std::pow(z, -2.0 * s_);
        for (int j = 0; j < 40; ++j) {
            const double term = coef * zp / (2.0 * s_ + 2.0 * static_cast<double>(j));
            acc += term;
            if (std::abs(term) < 1e-17 * std::abs(acc)) break;
            coef *= (-(s_ + 0.5) - static_cast<double>(j)) / (static_cast<double>(j) + 1.0);
            zp *= zi;
        }
        return cs_ * acc;
    }

    double s_;
    double cs_ = 0.0;
    double z_max_ = 3.0;
    double w_max_ = 0.0;
    std::vector<double> tw_;
    std::vector<double> slope_;
};

enum class extension_method { poisson, spectral };

struct extension_result {
    field2d field;
    trace_fn trace;
    double energy = 0.0;
    extension_method method = extension_method::poisson;
};

/// Weighted Dirichlet energy  int |grad u|^2 y^a  with exact per-cell mass
/// int_{y_j}^{y_{j+1}} y^a dy = (y_{j+1}^{1+a} - y_j^{1+a})/(1+a); gradients are
/// cell-centered differences, so the first interior row differences one-sidedly
/// against the trace row (no ghost row below y = 0, where the weight is not
/// integrable against a derivative).
inline double weighted_dirichlet(const field2d& u, double a) {
    if (!(a > -1.0 && a < 0.0)) throw std::invalid_argument("weighted_dirichlet: a outside (-1,0)");
    if (u.nx() < 2 || u.ny() < 2) throw std::invalid_argument("weighted_dirichlet: degenerate grid");
    const double hx = u.hx();
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < u.ny(); ++j) {
        const double y0 = u.y_grid[j], y1 = u.y_grid[j + 1];
        const double mass =
            (std::pow(y1, 1.0 + a) - std::pow(y0, 1.0 + a)) / (1.0 + a) * hx;
        const double dy = y1 - y0;
        const double* r0 = u.row(j);
        const double* r1 = u.row(j + 1);
        double rowacc = 0.0;
        for (std::size_t i = 0; i + 1 < u.nx(); ++i) {
            const double ux = (r0[i + 1] + r1[i + 1] - r0[i] - r1[i]) / (2.0 * hx);
            const double uy = (r1[i + 1] + r1[i] - r0[i + 1] - r0[i]) / (2.0 * dy);
            rowacc += ux * ux + uy * uy;
        }
        total += mass * rowacc;
    }
    return total;
}

/// Harmonic extension of v (extended by its end values outside E) through the
/// Poisson kernel; exact for piecewise-linear traces. Row weights are second
/// differences of the kernel's double primitive ("hat-smoothed kernel"), which
/// are nonnegative and sum to one with the two analytic tail weights, so the
/// discrete maximum principle holds exactly. Rows are Toeplitz convolutions.
inline extension_result poisson_extend(const trace_fn& v, const std::vector<double>& y_grid,
                                       double s) {
    if (y_grid.size() < 2) throw std::invalid_argument("poisson_extend: empty y grid");
    if (y_grid.front() != 0.0)
        throw std::invalid_argument("poisson_extend: y grid must start at the trace row 0");
    poisson_kernel_cdf cdf(s);
    const std::size_t n = v.size();
    const double h = v.h();
    field2d u(v.x_lo, v.x_hi, y_grid, n);
    for (std::size_t i = 0; i < n; ++i) u.at(0, i) = v.v[i];

    for (std::size_t j = 1; j < y_grid.size(); ++j) {
        const double y = y_grid[j];
        // even node weights c[m] = (y/h) * d2 F2 at z = m h / y; assemble with
        // the cancellation-free decaying form F2c on z >= 0
        std::vector<double> f2cs(n + 1);
        for (std::size_t m = 0; m <= n; ++m)
            f2cs[m] = cdf.f2c(static_cast<double>(m) * h / y);
        std::vector<double> c(n, 0.0);
        c[0] = (y / h) * (2.0 * f2cs[1] - 2.0 * f2cs[0]) + 1.0; // z=-h,0,h; F2(-z)=F2c(z)
        for (std::size_t m = 1; m < n; ++m)
            c[m] = (y / h) * (f2cs[m + 1] - 2.0 * f2cs[m] + f2cs[m - 1]);
        // Toeplitz multiply via linear convolution
        std::vector<double> ker(2 * n - 1);
        for (std::size_t m = 0; m < n; ++m) {
            ker[n - 1 + m] = c[m];
            ker[n - 1 - m] = c[m];
        }
        std::vector<double> conv = convolve(ker, v.v); // length 3n-2
        double* row = u.row(j);
        for (std::size_t i = 0; i < n; ++i) {
            double ui = conv[n - 1 + i];
            // constant tails: W = -(y/h) * increment of F2c outward from the edge
            const double bl = static_cast<double>(i) * h / y;
            const double br = static_cast<double>(n - 1 - i) * h / y;
            ui += v.v.front() * (-(y / h) * (cdf.f2c(bl + h / y) - cdf.f2c(bl)));
            ui += v.v.back() * (-(y / h) * (cdf.f2c(br + h / y) - cdf.f2c(br)));
            row[i] = ui;
        }
    }
    extension_result out{std::move(u), v, 0.0, extension_method::poisson};
    out.energy = weighted_dirichlet(out.field, 1.0 - 2.0 * s);
    return out;
}

namespace detail {

// angular frequencies 2*pi*k/L for the periodic sample of size m
inline std::vector<double> dft_frequencies(std::size_t m, double L) {
    std::vector<double> om(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t kk = k <= m / 2 ? k : m - k;
        om[k] = 2.0 * 3.14159265358979323846264338 * static_cast<double>(kk) / L;
    }
    return om;
}

} // namespace detail

/// Extension of v treated as periodic on E: every discrete mode is damped by
/// phi0(|omega| y), the exact per-mode solution of div(y^a grad u) = 0. The
/// endpoint sample duplicates the first node and is dropped for the transform.
inline extension_result spectral_extend(const trace_fn& v, const std::vector<double>& y_grid,
                                        double s) {
    if (y_grid.size() < 2) throw std::invalid_argument("spectral_extend: empty y grid");
    if (y_grid.front() != 0.0)
        throw std::invalid_argument("spectral_extend: y grid must start at the trace row 0");
    const std::size_t m = v.size() - 1;
    if ((m & (m - 1)) != 0)
        throw std::invalid_argument("spectral_extend: needs 2^k + 1 nodes");
    std::vector<cplx> vh(m);
    for (std::size_t i = 0; i < m; ++i) vh[i] = v.v[i];
    fft_inplace(vh, -1);
    const std::vector<double> om = detail::dft_frequencies(m, v.length());

    field2d u(v.x_lo, v.x_hi, y_grid, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) u.at(0, i) = v.v[i];
    for (std::size_t j = 1; j < y_grid.size(); ++j) {
        std::vector<cplx> row = vh;
        for (std::size_t k = 0; k < m; ++k) row[k] *= phi0(s, om[k] * y_grid[j]);
        fft_inplace(row, +1);
        double* r = u.row(j);
        for (std::size_t i = 0; i < m; ++i) r[i] = row[i].real();
        r[m] = r[0];
    }
    extension_result out{std::move(u), v, 0.0, extension_method::spectral};
    out.energy = weighted_dirichlet(out.field, 1.0 - 2.0 * s);
    return out;
}

/// D_s * (weighted Dirichlet energy of u) - (Gagliardo energy of its trace).
/// Nonnegative up to discretization error, and near zero for Poisson
/// extensions, which saturate the trace inequality.
inline double trace_inequality_gap(const trace_fn& v, const field2d& u, double s, double D_s) {
    if (u.nx() != v.size()) throw std::invalid_argument("trace_inequality_gap: grid mismatch");
    for (std::size_t i = 0; i < v.size(); ++i)
        if (u.at(0, i) != v.v[i])
            throw std::invalid_argument("trace_inequality_gap: field trace differs from v");
    return D_s * weighted_dirichlet(u, 1.0 - 2.0 * s) - gagliardo(v, s);
}

/// Energy of the strip minimizer on R x (0, M) with periodic trace v: per mode,
/// the profile is y -> phi_{|omega| M}(|omega| y), so the energy is the
/// J-bar-weighted spectral sum  L sum_k |vhat_k|^2 |omega_k|^{1-a} Jbar(|omega_k| M).
inline double strip_minimizer_energy(const trace_fn& v, double M, double s) {
    if (!(M > 0.0)) throw std::invalid_argument("strip_minimizer_energy: M must be positive");
    const std::size_t m = v.size() - 1;
    if ((m & (m - 1)) != 0)
        throw std::invalid_argument("strip_minimizer_energy: needs 2^k + 1 nodes");
    std::vector<cplx> vh(m);
    for (std::size_t i = 0; i < m; ++i) vh[i] = v.v[i];
    fft_inplace(vh, -1);
    for (auto& c : vh) c /= static_cast<double>(m);
    const std::vector<double> om = detail::dft_frequencies(m, v.length());
    const double a = 1.0 - 2.0 * s;
    double acc = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        const double w = om[k];
        acc += std::norm(vh[k]) * std::pow(w, 1.0 - a) * jbar_strip(s, w * M);
    }
    return acc * v.length();
}

/// Half-plane analogue (M -> infinity): per-mode weight e_s.
inline double halfplane_minimizer_energy(const trace_fn& v, double s) {
    const std::size_t m = v.size() - 1;
    if ((m & (m - 1)) != 0)
        throw std::invalid_argument("halfplane_minimizer_energy: needs 2^k + 1 nodes");
    std::vector<cplx> vh(m);
    for (std::size_t i = 0; i < m; ++i) vh[i] = v.v[i];
    fft_inplace(vh, -1);
    for (auto& c : vh) c /= static_cast<double>(m);
    const std::vector<double> om = detail::dft_frequencies(m, v.length());
    const double es = e_s_constant(s);
    const double a = 1.0 - 2.0 * s;
    double acc = 0.0;
    for (std::size_t k = 1; k < m; ++k)
        acc += std::norm(vh[k]) * std::pow(om[k], 1.0 - a) * es;
    return acc * v.length();
}

} // namespace fracphase
