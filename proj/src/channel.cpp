#include "linksim/channel.hpp"

#include <cmath>
#include <limits>

#include "linksim/fft.hpp"
#include "linksim/rng.hpp"

namespace linksim {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kC = 299792458.0;  // m/s
}  // namespace

double beta2_times_length(const ChannelConfig& cfg) {
    const double d_si = cfg.dispersion_ps_nm_km * 1e-6;          // s/m^2
    const double lambda = cfg.center_wavelength_nm * 1e-9;       // m
    const double beta2 = -d_si * lambda * lambda / (2.0 * kPi * kC);
    return beta2 * cfg.fiber_len_km * 1e3;
}

namespace {

ComplexFrame dispersion_allpass(const ComplexFrame& frame, const ChannelConfig& cfg, double sign) {
    cfg.validate();
    if (cfg.fiber_len_km == 0.0) return frame;
    const double b2l = beta2_times_length(cfg);
    auto spec = fft(frame.samples, false);
    const auto freqs = fft_freqs(spec.size(), frame.sample_rate);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double w = 2.0 * kPi * freqs[k];
        const double phase = sign * (-0.5) * b2l * w * w;
        spec[k] *= cplx(std::cos(phase), std::sin(phase));
    }
    return ComplexFrame(ifft(spec), frame.sample_rate);
}

}  // namespace

ComplexFrame apply_cd(const ComplexFrame& frame, const ChannelConfig& cfg) {
    return dispersion_allpass(frame, cfg, +1.0);
}

ComplexFrame apply_phase_noise(const ComplexFrame& frame, const ChannelConfig& cfg,
                               dvec* phase_out) {
    cfg.validate();
    if (cfg.linewidth_hz == 0.0) {
        if (phase_out) phase_out->assign(frame.samples.size(), 0.0);
        return frame;
    }
    const double sigma = std::sqrt(2.0 * kPi * cfg.linewidth_hz / frame.sample_rate);
    Rng rng(derive_seed(cfg.seed, 2));
    ComplexFrame out = frame;
    if (phase_out) phase_out->resize(frame.samples.size());
    double theta = 0.0;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        theta += sigma * rng.next_gaussian();
        out.samples[i] *= cplx(std::cos(theta), std::sin(theta));
        if (phase_out) (*phase_out)[i] = theta;
    }
    return out;
}

ComplexFrame apply_phase_noise(const ComplexFrame& frame, const ChannelConfig& cfg) {
    return apply_phase_noise(frame, cfg, nullptr);
}

ComplexFrame apply_cfo(const ComplexFrame& frame, const ChannelConfig& cfg) {
    if (std::abs(cfg.cfo_hz) >= frame.sample_rate / 2.0)
        throw SimError(SimError::Kind::parameter, "apply_cfo: offset beyond Nyquist");
    if (cfg.cfo_hz == 0.0) return frame;
    ComplexFrame out = frame;
    const double w = 2.0 * kPi * cfg.cfo_hz / frame.sample_rate;
    // recurrence would drift over long frames; evaluate directly
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double ph = w * static_cast<double>(i);
        out.samples[i] *= cplx(std::cos(ph), std::sin(ph));
    }
    return out;
}

double awgn_noise_variance(const ComplexFrame& frame, const ChannelConfig& cfg) {
    if (cfg.baud_hz <= 0.0)
        throw std::invalid_argument("awgn: baud_hz must be set for SNR referencing");
    const double snr_db = cfg.snr_db_at_zero_margin + cfg.power_margin_db;
    const double psig = mean_power(frame);
    // symbol-rate-referred SNR: Es/N0 with Es = P/baud, N0 = var/fs
    return psig * (frame.sample_rate / cfg.baud_hz) * std::pow(10.0, -snr_db / 10.0);
}

ComplexFrame apply_awgn(const ComplexFrame& frame, const ChannelConfig& cfg) {
    if (cfg.noise_free || cfg.power_margin_db == -std::numeric_limits<double>::infinity())
        return frame;
    const double var = awgn_noise_variance(frame, cfg);
    const double s = std::sqrt(var / 2.0);
    Rng rng(derive_seed(cfg.seed, 3));
    ComplexFrame out = frame;
    for (auto& v : out.samples)
        v += cplx(s * rng.next_gaussian(), s * rng.next_gaussian());
    return out;
}

}  // namespace linksim
