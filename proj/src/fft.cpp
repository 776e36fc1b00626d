#include "linksim/fft.hpp"

#include <cmath>

namespace linksim {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_pow2(cvec& a, bool inverse) {
    const std::size_t n = a.size();
    if (n < 2) return;
    if ((n & (n - 1)) != 0) throw std::invalid_argument("fft_pow2: size not a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        cplx wl(std::cos(ang), std::sin(ang));
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

    if (inverse) {
        double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

namespace {

// Bluestein chirp-z: FFT of arbitrary length via one power-of-two convolution.
cvec bluestein(const cvec& in, bool inverse) {
    const std::size_t n = in.size();
    const double sign = inverse ? 1.0 : -1.0;

    cvec chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the argument small and exact
        std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }

    const std::size_t m = next_pow2(2 * n - 1);
    cvec a(m, cplx(0, 0)), b(m, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k) a[k] = in[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, true);

    cvec out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    if (inverse) {
        double invn = 1.0 / static_cast<double>(n);
        for (auto& x : out) x *= invn;
    }
    return out;
}

}  // namespace

cvec fft(const cvec& in, bool inverse) {
    const std::size_t n = in.size();
    if (n == 0) return {};
    if ((n & (n - 1)) == 0) {
        cvec out = in;
        fft_pow2(out, inverse);
        return out;
    }
    return bluestein(in, inverse);
}

dvec fft_freqs(std::size_t n, double fs) {
    dvec f(n);
    const double df = fs / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        double kk = static_cast<double>(k);
        if (k > n / 2) kk -= static_cast<double>(n);
        f[k] = kk * df;
    }
    return f;
}

cvec fft_convolve(const cvec& a, const cvec& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t n = a.size() + b.size() - 1;
    const std::size_t m = next_pow2(n);
    cvec fa(m, cplx(0, 0)), fb(m, cplx(0, 0));
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
    fft_pow2(fa, true);
    fa.resize(n);
    return fa;
}

}  // namespace linksim
