#pragma once

#include "linksim/channel.hpp"
#include "linksim/complex_frame.hpp"
#include "linksim/txchain.hpp"

namespace linksim {

/// Pilot-tone frequency offset estimate: periodogram peak within
/// [pilot - window, pilot + window], refined by quadratic interpolation.
/// Returns (peak frequency - pilot frequency) in Hz.
double estimate_fo_pilot(const ComplexFrame& frame, const FrameLayout& layout,
                         double search_window_hz, std::size_t min_fft = 1u << 18);

/// Inverse of apply_cd (data-aided; fiber parameters known to the receiver).
ComplexFrame compensate_cd(const ComplexFrame& frame, const ChannelConfig& cfg);

/// Frequency-domain notch over pilot_freq +/- half_width (removes the pilot
/// after the offset has been corrected).
ComplexFrame remove_pilot_tone(const ComplexFrame& frame, double pilot_freq, double half_width_hz);

struct SyncResult {
    long symbol_offset = 0;     // whole symbols into the frame
    double timing_phase = 0.0;  // fractional samples within the symbol
    long sample_offset = 0;     // preamble start, integer samples
    cplx peak = {0.0, 0.0};     // correlation peak (coarse phase reference)
};

/// Preamble cross-correlation over all integer sample lags.
SyncResult synchronize(const ComplexFrame& frame, const cvec& preamble_reference, int sps);

}  // namespace linksim
