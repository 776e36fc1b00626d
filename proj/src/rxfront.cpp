#include "linksim/rxfront.hpp"

#include <algorithm>
#include <cmath>

#include "linksim/fft.hpp"

namespace linksim {

double estimate_fo_pilot(const ComplexFrame& frame, const FrameLayout& layout,
                         double search_window_hz, std::size_t min_fft) {
    if (frame.samples.empty()) throw std::invalid_argument("estimate_fo_pilot: empty frame");
    const double fs = frame.sample_rate;
    const std::size_t n = std::max(next_pow2(frame.samples.size()), next_pow2(min_fft));

    cvec buf(n, cplx(0, 0));
    std::copy(frame.samples.begin(), frame.samples.end(), buf.begin());
    fft_pow2(buf, false);

    dvec mag2(n);
    for (std::size_t i = 0; i < n; ++i) mag2[i] = std::norm(buf[i]);

    auto bin_of = [&](double f) {
        double b = f / fs * static_cast<double>(n);
        long k = static_cast<long>(std::llround(b));
        long m = static_cast<long>(n);
        return ((k % m) + m) % m;
    };

    const double f0 = layout.pilot_tone_freq;
    const long lo = bin_of(f0 - search_window_hz);
    const long span = static_cast<long>(std::ceil(2.0 * search_window_hz / fs * n)) + 1;

    // peak and median over the (wrapped) window
    dvec window_vals;
    window_vals.reserve(span);
    long best = lo;
    double best_val = -1.0;
    for (long i = 0; i < span; ++i) {
        long k = (lo + i) % static_cast<long>(n);
        window_vals.push_back(mag2[k]);
        if (mag2[k] > best_val) {
            best_val = mag2[k];
            best = k;
        }
    }
    std::nth_element(window_vals.begin(), window_vals.begin() + window_vals.size() / 2,
                     window_vals.end());
    const double median = window_vals[window_vals.size() / 2];
    if (!(best_val > 3.981 * median))  // 6 dB
        throw SimError(SimError::Kind::estimation_failed, "estimate_fo_pilot: no pilot peak found");

    // a pilot is a line: the peak must stand 6 dB above everything in the
    // window outside its own spectral-leakage lobes
    const long lobe = static_cast<long>(n / frame.samples.size()) + 1;
    const long excl = 8 * lobe;
    double runner_up = 0.0;
    for (long i = 0; i < span; ++i) {
        long k = (lo + i) % static_cast<long>(n);
        long dist = std::abs(((k - best) % static_cast<long>(n)));
        dist = std::min<long>(dist, static_cast<long>(n) - dist);
        if (dist <= excl) continue;
        runner_up = std::max(runner_up, mag2[k]);
    }
    if (!(best_val > 3.981 * runner_up))
        throw SimError(SimError::Kind::estimation_failed, "estimate_fo_pilot: peak not prominent");

    // quadratic refinement on log magnitude over three bins
    const long m = static_cast<long>(n);
    const double ym = std::log(std::max(mag2[(best - 1 + m) % m], 1e-300));
    const double y0 = std::log(std::max(mag2[best], 1e-300));
    const double yp = std::log(std::max(mag2[(best + 1) % m], 1e-300));
    double delta = 0.0;
    const double den = ym - 2.0 * y0 + yp;
    if (std::abs(den) > 1e-12) delta = 0.5 * (ym - yp) / den;
    if (delta > 0.5) delta = 0.5;
    if (delta < -0.5) delta = -0.5;

    double kf = static_cast<double>(best) + delta;
    if (kf > static_cast<double>(n) / 2.0) kf -= static_cast<double>(n);
    const double peak_freq = kf * fs / static_cast<double>(n);
    return peak_freq - f0;
}

ComplexFrame compensate_cd(const ComplexFrame& frame, const ChannelConfig& cfg) {
    ChannelConfig inv = cfg;
    inv.dispersion_ps_nm_km = -cfg.dispersion_ps_nm_km;  // conjugate transfer
    return apply_cd(frame, inv);
}

namespace {

cplx tone_correlation(const cvec& x, double f_norm) {
    // (1/N) sum x[n] exp(-j 2 pi f n), f in cycles/sample
    cplx acc(0, 0);
    const double w = 2.0 * 3.14159265358979323846 * f_norm;
    const cplx step = std::polar(1.0, -w);
    cplx rot(1.0, 0.0);
    for (const auto& v : x) {
        acc += v * rot;
        rot *= step;
    }
    return acc / static_cast<double>(x.size());
}

}  // namespace

ComplexFrame remove_pilot_tone(const ComplexFrame& frame, double pilot_freq, double half_width_hz) {
    if (frame.samples.empty()) return frame;
    const double fs = frame.sample_rate;

    // refine the tone frequency by shrinking-step parabolic search, then
    // subtract the coherently estimated tone (a spectral notch would leave
    // the finite-frame leakage skirts in band)
    double f = pilot_freq / fs;
    double step = half_width_hz / fs;
    for (int round = 0; round < 24 && step > 1e-4 / static_cast<double>(frame.samples.size());
         ++round) {
        const double pm = std::norm(tone_correlation(frame.samples, f - step));
        const double p0 = std::norm(tone_correlation(frame.samples, f));
        const double pp = std::norm(tone_correlation(frame.samples, f + step));
        if (pm > p0 && pm >= pp) {
            f -= step;
        } else if (pp > p0) {
            f += step;
        } else {
            const double den = pm - 2 * p0 + pp;
            if (std::abs(den) > 0) f += step * 0.5 * (pm - pp) / den;
            step *= 0.25;
        }
    }

    const cplx amp = tone_correlation(frame.samples, f);
    ComplexFrame out = frame;
    const double w = 2.0 * 3.14159265358979323846 * f;
    const cplx stepr = std::polar(1.0, w);
    cplx rot(1.0, 0.0);
    for (auto& v : out.samples) {
        v -= amp * rot;
        rot *= stepr;
    }

    // laser phase noise rides on the pilot too; the mean-tone subtraction
    // leaves that narrow modulated residue, which a notch around the line
    // removes without touching the (out-of-band) neighbourhood
    const double notch_hz = std::min(half_width_hz, 6e6);
    auto spec = fft(out.samples, false);
    const double fs_bin = out.sample_rate / static_cast<double>(spec.size());
    const double f_hz = f * out.sample_rate;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        double fk = static_cast<double>(k) * fs_bin;
        if (fk > out.sample_rate / 2.0) fk -= out.sample_rate;
        if (std::abs(fk - f_hz) <= notch_hz) spec[k] = cplx(0, 0);
    }
    return ComplexFrame(ifft(spec), out.sample_rate);
}

SyncResult synchronize(const ComplexFrame& frame, const cvec& preamble_reference, int sps) {
    const std::size_t np = preamble_reference.size();
    const std::size_t nx = frame.samples.size();
    if (np == 0 || sps < 1) throw std::invalid_argument("synchronize: bad arguments");
    const std::size_t tmpl_len = (np - 1) * static_cast<std::size_t>(sps) + 1;
    if (tmpl_len > nx) throw SimError(SimError::Kind::sync_failed, "synchronize: frame shorter than preamble");

    // c[lag] = sum_n x[lag + n*sps] conj(p_n), via FFT cross-correlation
    const std::size_t m = next_pow2(nx + tmpl_len);
    cvec fx(m, cplx(0, 0)), ft(m, cplx(0, 0));
    std::copy(frame.samples.begin(), frame.samples.end(), fx.begin());
    for (std::size_t k = 0; k < np; ++k) ft[k * sps] = preamble_reference[k];
    fft_pow2(fx, false);
    fft_pow2(ft, false);
    for (std::size_t i = 0; i < m; ++i) fx[i] *= std::conj(ft[i]);
    fft_pow2(fx, true);

    const std::size_t nlags = nx - tmpl_len + 1;
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t lag = 0; lag < nlags; ++lag) {
        double v = std::abs(fx[lag]);
        if (v > best_val) {
            best_val = v;
            best = lag;
        }
    }

    // sidelobe RMS away from the peak
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t lag = 0; lag < nlags; ++lag) {
        if (lag + 2ul * sps >= best && lag <= best + 2ul * sps) continue;
        acc += std::norm(fx[lag]);
        ++cnt;
    }
    const double rms = cnt ? std::sqrt(acc / static_cast<double>(cnt)) : 0.0;
    if (!(best_val > 3.0 * rms))
        throw SimError(SimError::Kind::sync_failed, "synchronize: correlation peak below threshold");

    // parabolic fractional refinement
    double frac = 0.0;
    if (best > 0 && best + 1 < nlags) {
        const double ym = std::abs(fx[best - 1]);
        const double y0 = best_val;
        const double yp = std::abs(fx[best + 1]);
        const double den = ym - 2.0 * y0 + yp;
        if (std::abs(den) > 1e-12) frac = 0.5 * (ym - yp) / den;
        if (frac > 0.5) frac = 0.5;
        if (frac < -0.5) frac = -0.5;
    }

    SyncResult r;
    r.sample_offset = static_cast<long>(best);
    r.symbol_offset = static_cast<long>(best) / sps;
    r.timing_phase = static_cast<double>(static_cast<long>(best) % sps) + frac;
    r.peak = fx[best];
    return r;
}

}  // namespace linksim
