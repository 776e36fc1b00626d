#include "linksim/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "linksim/fft.hpp"

namespace linksim {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

PowerSpectrum welch_psd(const ComplexFrame& frame, std::size_t segment) {
    const std::size_t n = frame.samples.size();
    if (n < 1024) throw SimError(SimError::Kind::parameter, "welch_psd: frame shorter than 1024 samples");

    std::size_t seg = segment;
    while (seg > n) seg /= 2;
    seg = next_pow2(seg) == seg ? seg : next_pow2(seg) / 2;

    dvec window(seg);
    for (std::size_t i = 0; i < seg; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(seg));

    dvec acc(seg, 0.0);
    const std::size_t hop = seg / 2;
    std::size_t count = 0;
    cvec buf(seg);
    for (std::size_t start = 0; start + seg <= n; start += hop) {
        for (std::size_t i = 0; i < seg; ++i) buf[i] = frame.samples[start + i] * window[i];
        fft_pow2(buf, false);
        for (std::size_t i = 0; i < seg; ++i) acc[i] += std::norm(buf[i]);
        ++count;
    }
    if (count == 0) throw SimError(SimError::Kind::parameter, "welch_psd: no full segment fits");

    PowerSpectrum out;
    out.bin_hz = frame.sample_rate / static_cast<double>(seg);
    out.freq_hz.resize(seg);
    out.psd.resize(seg);
    // fftshift: bins seg/2..seg-1 are negative frequencies
    for (std::size_t i = 0; i < seg; ++i) {
        const std::size_t src = (i + seg / 2) % seg;
        double f = (static_cast<double>(i) - static_cast<double>(seg / 2)) * out.bin_hz;
        out.freq_hz[i] = f;
        out.psd[i] = acc[src] / static_cast<double>(count);
    }
    return out;
}

double occupied_bandwidth(const PowerSpectrum& spec, double power_fraction) {
    if (!(power_fraction > 0.0 && power_fraction < 1.0))
        throw SimError(SimError::Kind::parameter, "occupied_bandwidth: fraction must be in (0,1)");
    const std::size_t n = spec.psd.size();
    double total = 0.0, centroid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += spec.psd[i];
        centroid += spec.psd[i] * spec.freq_hz[i];
    }
    if (total <= 0.0) return 0.0;
    centroid /= total;

    // start from the bin nearest the centroid, grow symmetrically
    std::size_t c = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::abs(spec.freq_hz[i] - centroid);
        if (d < best) {
            best = d;
            c = i;
        }
    }
    long lo = static_cast<long>(c), hi = static_cast<long>(c);
    double cum = spec.psd[c];
    const double target = power_fraction * total;
    while (cum < target && (lo > 0 || hi + 1 < static_cast<long>(n))) {
        const double dl = lo > 0 ? std::abs(spec.freq_hz[lo - 1] - centroid) : 1e300;
        const double dr = hi + 1 < static_cast<long>(n) ? std::abs(spec.freq_hz[hi + 1] - centroid) : 1e300;
        if (dl <= dr) {
            --lo;
            cum += spec.psd[lo];
        } else {
            ++hi;
            cum += spec.psd[hi];
        }
    }
    return static_cast<double>(hi - lo) * spec.bin_hz;
}

double occupied_bandwidth(const ComplexFrame& frame, double power_fraction) {
    return occupied_bandwidth(welch_psd(frame), power_fraction);
}

}  // namespace linksim
