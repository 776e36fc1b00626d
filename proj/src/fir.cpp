#include "linksim/fir.hpp"

#include <cmath>

#include "linksim/fft.hpp"

namespace linksim {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

double rrc_impulse(double rolloff, double t) {
    const double b = rolloff;
    if (b == 0.0) {
        if (t == 0.0) return 1.0;
        return std::sin(kPi * t) / (kPi * t);
    }
    if (t == 0.0) return 1.0 - b + 4.0 * b / kPi;
    const double den = 1.0 - 16.0 * b * b * t * t;
    if (std::abs(den) < 1e-12) {
        // removable singularity at t = +/- 1/(4*rolloff)
        const double arg = kPi / (4.0 * b);
        return (b / std::sqrt(2.0)) *
               ((1.0 + 2.0 / kPi) * std::sin(arg) + (1.0 - 2.0 / kPi) * std::cos(arg));
    }
    const double num = std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b));
    return num / (kPi * t * den);
}

FirFilter design_rrc(double rolloff, int span, int sps, double bandwidth_scale) {
    if (rolloff < 0.0 || rolloff > 1.0)
        throw std::invalid_argument("design_rrc: rolloff must be in [0,1]");
    if (bandwidth_scale <= 0.0 || bandwidth_scale > 1.0)
        throw std::invalid_argument("design_rrc: bandwidth_scale must be in (0,1]");
    if (span < 2 || sps < 2) throw std::invalid_argument("design_rrc: span >= 2 and sps >= 2 required");
    if ((span * sps) % 2 != 0)
        throw std::invalid_argument("design_rrc: span*sps must be even for a centered tap");

    const int n = span * sps + 1;
    const int center = span * sps / 2;
    dvec taps(n);
    double energy = 0.0;
    for (int i = 0; i < n; ++i) {
        // compressed bandwidth = time-stretched pulse: evaluate at scale*t
        const double t = static_cast<double>(i - center) / static_cast<double>(sps);
        taps[i] = rrc_impulse(rolloff, bandwidth_scale * t);
        energy += taps[i] * taps[i];
    }
    const double g = 1.0 / std::sqrt(energy);
    for (auto& v : taps) v *= g;
    return FirFilter(taps, center);
}

cvec fir_apply(const cvec& x, const FirFilter& filter) {
    filter.validate();
    const auto& h = filter.taps;
    const int nh = static_cast<int>(h.size());
    const int nx = static_cast<int>(x.size());
    const int d = filter.reference_delay;

    cvec y(x.size(), cplx(0, 0));
    if (nh >= 64 && nx >= 256) {
        cvec full = fft_convolve(x, h);
        for (int k = 0; k < nx; ++k) {
            const int idx = k + d;
            if (idx >= 0 && idx < static_cast<int>(full.size())) y[k] = full[idx];
        }
        return y;
    }
    for (int k = 0; k < nx; ++k) {
        cplx acc(0, 0);
        const int j = k + d;  // index into the full convolution
        const int m_lo = std::max(0, j - nx + 1);
        const int m_hi = std::min(nh - 1, j);
        for (int m = m_lo; m <= m_hi; ++m) acc += h[m] * x[j - m];
        y[k] = acc;
    }
    return y;
}

ComplexFrame fir_filter(const ComplexFrame& frame, const FirFilter& filter) {
    if (frame.samples.empty()) throw std::invalid_argument("fir_filter: empty frame");
    return ComplexFrame(fir_apply(frame.samples, filter), frame.sample_rate);
}

}  // namespace linksim
