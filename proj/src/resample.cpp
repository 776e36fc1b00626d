#include "linksim/resample.hpp"

#include <cmath>
#include <numeric>

namespace linksim {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double bessel_i0(double x) {
    // power series; converges quickly for the window arguments used here
    double sum = 1.0, term = 1.0;
    const double x2 = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= x2 / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

// Kaiser-windowed sinc lowpass at the p-upsampled rate.
// cutoff 0.5/max(p,q) cycles/sample, passband gain p, K sinc lobes per side.
dvec design_kernel(int p, int q, int lobes, double beta) {
    const int half = lobes * std::max(p, q);
    const int n = 2 * half + 1;
    const double fc = 0.5 / static_cast<double>(std::max(p, q));
    const double i0b = bessel_i0(beta);
    dvec h(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - half);
        const double x = 2.0 * fc * t;
        const double sinc = (t == 0.0) ? 1.0 : std::sin(kPi * x) / (kPi * x);
        const double r = t / static_cast<double>(half);
        const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
        h[i] = 2.0 * fc * static_cast<double>(p) * sinc * win;
    }
    return h;
}

}  // namespace

std::pair<int, int> rational_ratio(double ratio, int max_term, double rel_tol) {
    if (!(ratio > 0.0)) throw SimError(SimError::Kind::parameter, "resample: ratio must be > 0");
    int best_p = 0, best_q = 0;
    double best_err = 1e300;
    for (int q = 1; q <= max_term; ++q) {
        int p = static_cast<int>(std::lround(ratio * q));
        if (p < 1 || p > max_term) continue;
        double err = std::abs(static_cast<double>(p) / q - ratio) / ratio;
        if (err < best_err) {
            best_err = err;
            best_p = p;
            best_q = q;
        }
    }
    if (best_p == 0 || best_err > rel_tol)
        throw SimError(SimError::Kind::parameter,
                       "resample: rate ratio not expressible as small rational");
    int g = std::gcd(best_p, best_q);
    return {best_p / g, best_q / g};
}

ComplexFrame resample(const ComplexFrame& frame, double target_rate) {
    if (frame.samples.empty()) throw std::invalid_argument("resample: empty frame");
    if (!(target_rate > 0.0)) throw SimError(SimError::Kind::parameter, "resample: target_rate must be > 0");

    auto [p, q] = rational_ratio(target_rate / frame.sample_rate);
    if (p == 1 && q == 1) return ComplexFrame(frame.samples, target_rate);

    const dvec h = design_kernel(p, q, 48, 14.0);
    const int nh = static_cast<int>(h.size());
    const int delay = (nh - 1) / 2;
    const int nx = static_cast<int>(frame.samples.size());
    const auto& x = frame.samples;

    const std::size_t ny = (static_cast<std::size_t>(nx) * p + q - 1) / q;
    cvec y(ny);
    for (std::size_t n = 0; n < ny; ++n) {
        // y[n] = sum_i x[i] h[n q - i p + delay]
        const long long j = static_cast<long long>(n) * q + delay;
        long long i_lo = (j - (nh - 1) + p - 1) / p;  // ceil((j-nh+1)/p)
        long long i_hi = j / p;                       // floor(j/p)
        if (i_lo < 0) i_lo = 0;
        if (i_hi > nx - 1) i_hi = nx - 1;
        cplx acc(0, 0);
        for (long long i = i_lo; i <= i_hi; ++i) acc += x[i] * h[j - i * p];
        y[n] = acc;
    }
    return ComplexFrame(std::move(y), frame.sample_rate * p / q);
}

}  // namespace linksim
