#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracphase {

/// A real function sampled on a uniform grid over [x_lo, x_hi], interpreted
/// as piecewise linear between nodes.
struct trace_fn {
    double x_lo = 0.0;
    double x_hi = 1.0;
    std::vector<double> v;

    trace_fn() = default;
    trace_fn(double lo, double hi, std::vector<double> vals)
        : x_lo(lo), x_hi(hi), v(std::move(vals)) {
        if (!(x_lo < x_hi)) throw std::invalid_argument("trace_fn: need x_lo < x_hi");
        if (v.size() < 2) throw std::invalid_argument("trace_fn: need at least 2 nodes");
        for (double t : v)
            if (!std::isfinite(t)) throw std::invalid_argument("trace_fn: non-finite value");
    }

    std::size_t size() const { return v.size(); }
    double h() const { return (x_hi - x_lo) / static_cast<double>(v.size() - 1); }
    double node(std::size_t i) const { return x_lo + h() * static_cast<double>(i); }
    double length() const { return x_hi - x_lo; }

    double operator()(double x) const {
        if (x <= x_lo) return v.front();
        if (x >= x_hi) return v.back();
        const double t = (x - x_lo) / h();
        const auto i = static_cast<std::size_t>(t);
        const std::size_t k = i >= v.size() - 1 ? v.size() - 2 : i;
        const double f = t - static_cast<double>(k);
        return v[k] + f * (v[k + 1] - v[k]);
    }
};

/// Build a trace by sampling a callable on n uniform nodes.
template <class F>
trace_fn sample_trace(double lo, double hi, std::size_t n, F&& f) {
    std::vector<double> vals(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) vals[i] = f(lo + h * static_cast<double>(i));
    return trace_fn(lo, hi, std::move(vals));
}

/// y-grid graded toward 0 as y_j = y_hi (j/n)^(2/(1+a)); row 0 is the trace row.
inline std::vector<double> graded_y_grid(double y_hi, std::size_t n, double a) {
    if (!(y_hi > 0) || n < 2) throw std::invalid_argument("graded_y_grid: bad arguments");
    if (!(a > -1.0 && a < 0.0)) throw std::invalid_argument("graded_y_grid: a outside (-1,0)");
    const double q = 2.0 / (1.0 + a);
    std::vector<double> y(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        y[j] = y_hi * std::pow(static_cast<double>(j) / static_cast<double>(n), q);
    return y;
}

/// A field sampled on the tensor grid (uniform x) x (strictly increasing y).
/// Row 0 of values is the trace row y = y_grid[0].
struct field2d {
    double x_lo = 0.0;
    double x_hi = 1.0;
    std::vector<double> y_grid;
    std::vector<double> values; // row-major, ny rows of nx

    field2d() = default;
    field2d(double lo, double hi, std::vector<double> yg, std::size_t nx)
        : x_lo(lo), x_hi(hi), y_grid(std::move(yg)), values(y_grid.size() * nx, 0.0), nx_(nx) {
        if (!(x_lo < x_hi) || nx < 2 || y_grid.size() < 2)
            throw std::invalid_argument("field2d: bad grid");
        for (std::size_t j = 1; j < y_grid.size(); ++j)
            if (!(y_grid[j] > y_grid[j - 1]))
                throw std::invalid_argument("field2d: y_grid must be strictly increasing");
        if (y_grid.front() < 0.0) throw std::invalid_argument("field2d: y_grid must start at >= 0");
    }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return y_grid.size(); }
    double hx() const { return (x_hi - x_lo) / static_cast<double>(nx_ - 1); }
    double xnode(std::size_t i) const { return x_lo + hx() * static_cast<double>(i); }
    double& at(std::size_t j, std::size_t i) { return values[j * nx_ + i]; }
    double at(std::size_t j, std::size_t i) const { return values[j * nx_ + i]; }
    double* row(std::size_t j) { return values.data() + j * nx_; }
    const double* row(std::size_t j) const { return values.data() + j * nx_; }

    trace_fn trace() const {
        return trace_fn(x_lo, x_hi, std::vector<double>(values.begin(), values.begin() + nx_));
    }

private:
    std::size_t nx_ = 0;
};

// ---- plain-text serialization ----------------------------------------------

inline void write_trace(const trace_fn& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace: cannot open " + path);
    out.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i)
        out << v.node(i) << ' ' << v.v[i] << '\n';
}

inline trace_fn read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trace: cannot open " + path);
    std::vector<double> xs, vs;
    double x, val;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (ls >> x >> val) {
            xs.push_back(x);
            vs.push_back(val);
        }
    }
    if (xs.size() < 2) throw std::runtime_error("read_trace: need at least 2 samples");
    return trace_fn(xs.front(), xs.back(), std::move(vs));
}

inline void write_field(const field2d& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_field: cannot open " + path);
    out.precision(17);
    out << "# fracphase field v1\n";
    out << u.x_lo << ' ' << u.x_hi << ' ' << u.nx() << '\n';
    out << u.ny();
    for (double y : u.y_grid) out << ' ' << y;
    out << '\n';
    for (std::size_t j = 0; j < u.ny(); ++j) {
        for (std::size_t i = 0; i < u.nx(); ++i)
            out << (i ? " " : "") << u.at(j, i);
        out << '\n';
    }
}

inline field2d read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_field: cannot open " + path);
    std::string header;
    std::getline(in, header);
    double lo, hi;
    std::size_t nx, ny;
    in >> lo >> hi >> nx >> ny;
    std::vector<double> yg(ny);
    for (auto& y : yg) in >> y;
    field2d u(lo, hi, std::move(yg), nx);
    for (std::size_t j = 0; j < u.ny(); ++j)
        for (std::size_t i = 0; i < nx; ++i)
            if (!(in >> u.at(j, i))) throw std::runtime_error("read_field: truncated file");
    return u;
}

} // namespace fracphase
