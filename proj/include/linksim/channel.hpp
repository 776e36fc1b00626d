#pragma once

#include <cstdint>

#include "linksim/complex_frame.hpp"

namespace linksim {

/// Impairment parameters for one trial. Power margin maps linearly to the
/// symbol-rate-referred electrical SNR: snr_db = snr_db_at_zero_margin +
/// power_margin_db.
struct ChannelConfig {
    double snr_db_at_zero_margin = 15.0;
    double power_margin_db = 0.0;
    double linewidth_hz = 200e3;       // combined Tx + LO
    double cfo_hz = 0.0;
    double fiber_len_km = 0.0;
    double dispersion_ps_nm_km = 17.0;
    double center_wavelength_nm = 1550.0;
    double baud_hz = 0.0;              // SNR reference bandwidth
    bool noise_free = false;
    std::uint64_t seed = 1;

    void validate() const {
        if (fiber_len_km < 0.0) throw std::invalid_argument("ChannelConfig: negative fiber length");
        if (linewidth_hz < 0.0) throw std::invalid_argument("ChannelConfig: negative linewidth");
    }
};

/// Group-velocity dispersion coefficient beta2*L in s^2 for the config.
double beta2_times_length(const ChannelConfig& cfg);

/// Chromatic dispersion: all-pass H(w) = exp(-j (beta2/2) w^2 L).
ComplexFrame apply_cd(const ComplexFrame& frame, const ChannelConfig& cfg);

/// Laser phase noise: Wiener process, increment variance 2 pi dv / fs.
ComplexFrame apply_phase_noise(const ComplexFrame& frame, const ChannelConfig& cfg);

/// Same, also returning the phase trajectory (for tracking-error tests).
ComplexFrame apply_phase_noise(const ComplexFrame& frame, const ChannelConfig& cfg,
                               dvec* phase_out);

/// Carrier frequency offset rotation.
ComplexFrame apply_cfo(const ComplexFrame& frame, const ChannelConfig& cfg);

/// Circular complex AWGN at the margin-mapped SNR; identity in noise-free
/// mode or at a -inf margin.
ComplexFrame apply_awgn(const ComplexFrame& frame, const ChannelConfig& cfg);

/// Per-sample complex noise variance the AWGN stage will add.
double awgn_noise_variance(const ComplexFrame& frame, const ChannelConfig& cfg);

}  // namespace linksim
