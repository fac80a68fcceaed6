#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracphase {

/// Fractional exponent a in (-1,0) and the derived order s = (1-a)/2 in (1/2,1).
struct frac_params {
    double a;
    double s;
};

inline frac_params make_params(double a) {
    if (!(a > -1.0 && a < 0.0))
        throw std::invalid_argument("make_params: a must lie strictly inside (-1, 0)");
    return {a, 0.5 * (1.0 - a)};
}

/// The eps-scalings: lambda_big = eps^{(1-a)/(-a)} (transition-layer width),
/// lambda_small = 1/lambda_big (boundary-potential strength).
struct scalings {
    double eps;
    double lambda_big;
    double lambda_small;
};

inline scalings make_scalings(const frac_params& p, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("make_scalings: eps must be positive");
    const double lb = std::pow(eps, (1.0 - p.a) / (-p.a));
    return {eps, lb, 1.0 / lb};
}

enum class well_kind { builtin_quartic, user_tabulated };

/// Two-well potential: W >= 0, vanishing exactly at lo < hi.
class double_well {
public:
    double lo = -1.0;
    double hi = 1.0;
    well_kind kind = well_kind::builtin_quartic;

    double operator()(double t) const { return w_(t); }
    double deriv(double t) const { return dw_(t); }

    /// W(t) = (1-t^2)^2 / 4 with wells at -1 and 1. Its transition ODE
    /// theta' = sqrt(W) has the closed solution tanh(t/2), which anchors
    /// several oracles.
    static double_well quartic() {
        double_well w;
        w.lo = -1.0;
        w.hi = 1.0;
        w.kind = well_kind::builtin_quartic;
        w.w_ = [](double t) { double q = 1.0 - t * t; return 0.25 * q * q; };
        w.dw_ = [](double t) { return -t * (1.0 - t * t); };
        w.check();
        return w;
    }

    /// Potential from samples (t_i, W_i), linear interpolation in between and
    /// constant beyond the sample range. Well positions are supplied, not
    /// root-found.
    static double_well tabulated(std::vector<double> t, std::vector<double> w,
                                 double lo, double hi) {
        if (t.size() != w.size() || t.size() < 4)
            throw std::invalid_argument("double_well: need matching sample arrays, >= 4 points");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i] > t[i - 1]))
                throw std::invalid_argument("double_well: sample abscissas must increase");
        for (double wi : w)
            if (!(wi >= 0.0) || !std::isfinite(wi))
                throw std::invalid_argument("double_well: W must be finite and nonnegative");
        if (!(lo < hi)) throw std::invalid_argument("double_well: need lo < hi");
        if (lo < t.front() || hi > t.back())
            throw std::invalid_argument("double_well: wells outside the sampled range");

        auto ts = std::make_shared<std::vector<double>>(std::move(t));
        auto ws = std::make_shared<std::vector<double>>(std::move(w));
        auto interp = [ts, ws](double x) {
            const auto& tt = *ts;
            const auto& ww = *ws;
            if (x <= tt.front()) return ww.front();
            if (x >= tt.back()) return ww.back();
            auto it = std::upper_bound(tt.begin(), tt.end(), x);
            std::size_t k = static_cast<std::size_t>(it - tt.begin()) - 1;
            const double f = (x - tt[k]) / (tt[k + 1] - tt[k]);
            return ww[k] + f * (ww[k + 1] - ww[k]);
        };
        double_well dw;
        dw.lo = lo;
        dw.hi = hi;
        dw.kind = well_kind::user_tabulated;
        dw.w_ = interp;
        dw.dw_ = [ts, ws, interp](double x) {
            const double eps = 1e-6 * ((*ts).back() - (*ts).front());
            return (interp(x + eps) - interp(x - eps)) / (2.0 * eps);
        };
        dw.check();
        return dw;
    }

private:
    std::function<double(double)> w_;
    std::function<double(double)> dw_;

    // sampled validation: W(lo) = W(hi) = 0, W > 0 strictly between
    void check() const {
        const double tol = 1e-9 * std::max(1.0, std::abs(w_(0.5 * (lo + hi))));
        if (!(std::abs(w_(lo)) <= tol && std::abs(w_(hi)) <= tol))
            throw std::invalid_argument("double_well: W must vanish at the wells");
        for (int i = 1; i < 64; ++i) {
            const double t = lo + (hi - lo) * static_cast<double>(i) / 64.0;
            if (!(w_(t) > 0.0))
                throw std::invalid_argument("double_well: W must be positive between the wells");
        }
    }
};

namespace detail {

// 8-point Gauss-Legendre on [-1,1]
inline constexpr double gl8_x[8] = {
    -0.9602898564975362316836, -0.7966664774136267395916,
    -0.5255324099163289858177, -0.1834346424956498049395,
    0.1834346424956498049395,  0.5255324099163289858177,
    0.7966664774136267395916,  0.9602898564975362316836};
inline constexpr double gl8_w[8] = {
    0.1012285362903762591525, 0.2223810344533744705444,
    0.3137066458778872873380, 0.3626837833783619829652,
    0.3626837833783619829652, 0.3137066458778872873380,
    0.2223810344533744705444, 0.1012285362903762591525};

template <class F>
double gauss8(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 8; ++k) acc += gl8_w[k] * f(c + hw * gl8_x[k]);
    return acc * hw;
}

} // namespace detail

/// Cumulative primitive of 2 sqrt(W) from the left well; precomputed on a
/// dense grid and evaluated by cubic Hermite interpolation with the exact
/// slope 2 sqrt(W). Monotone nondecreasing by construction.
class well_primitive {
public:
    explicit well_primitive(const double_well& w, std::size_t cells = 4096)
        : lo_(w.lo), hi_(w.hi), cum_(cells + 1, 0.0), slope_(cells + 1, 0.0) {
        const double h = (hi_ - lo_) / static_cast<double>(cells);
        auto f = [&w](double t) { return 2.0 * std::sqrt(std::max(0.0, w(t))); };
        for (std::size_t i = 0; i <= cells; ++i)
            slope_[i] = f(lo_ + h * static_cast<double>(i));
        for (std::size_t i = 0; i < cells; ++i) {
            const double a = lo_ + h * static_cast<double>(i);
            cum_[i + 1] = cum_[i] + detail::gauss8(f, a, a + h);
        }
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double operator()(double t) const {
        if (t <= lo_) return 0.0;
        if (t >= hi_) return cum_.back();
        const std::size_t cells = cum_.size() - 1;
        const double h = (hi_ - lo_) / static_cast<double>(cells);
        const double pos = (t - lo_) / h;
        std::size_t k = static_cast<std::size_t>(pos);
        if (k >= cells) k = cells - 1;
        const double u = pos - static_cast<double>(k);
        // Hermite basis with exact endpoint slopes (scaled by h)
        const double y0 = cum_[k], y1 = cum_[k + 1];
        const double m0 = slope_[k] * h, m1 = slope_[k + 1] * h;
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
               (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    }

    double total() const { return cum_.back(); }

private:
    double lo_, hi_;
    std::vector<double> cum_;
    std::vector<double> slope_;
};

/// primitive of 2 sqrt(W) evaluated at t (builds the dense table; reuse
/// well_primitive directly in loops)
inline double primitive_W(const double_well& w, double t) {
    if (t < w.lo || t > w.hi)
        throw std::invalid_argument("primitive_W: t outside the well interval");
    return well_primitive(w)(t);
}

/// sigma = primitive(hi) - primitive(lo) = 2 int_lo^hi sqrt(W)
inline double sigma_constant(const double_well& w) { return well_primitive(w).total(); }

} // namespace fracphase
