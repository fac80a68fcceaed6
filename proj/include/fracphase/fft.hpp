#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracphase {

using cplx = std::complex<double>;

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// in-place iterative radix-2 FFT, sign = -1 forward / +1 inverse (unscaled)
inline void fft_inplace(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * 3.14159265358979323846264338 / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (sign > 0) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

inline std::vector<cplx> fft(std::vector<cplx> a) { fft_inplace(a, -1); return a; }
inline std::vector<cplx> ifft(std::vector<cplx> a) { fft_inplace(a, +1); return a; }

// linear convolution of real sequences, exact length a.size()+b.size()-1
inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t out_n = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_n);
    std::vector<cplx> fa(n, cplx(0, 0)), fb(n, cplx(0, 0));
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    fft_inplace(fa, -1);
    fft_inplace(fb, -1);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft_inplace(fa, +1);
    std::vector<double> out(out_n);
    for (std::size_t i = 0; i < out_n; ++i) out[i] = fa[i].real();
    return out;
}

} // namespace fracphase
