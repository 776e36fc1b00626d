#pragma once

#include <cstdint>

#include "linksim/complex_frame.hpp"
#include "linksim/constellation.hpp"

namespace linksim {

/// Frame structure: training preamble ahead of the payload plus the
/// out-of-band frequency pilot used for offset estimation.
struct FrameLayout {
    int preamble_len = 512;    // symbols
    int payload_len = 0;       // symbols
    double pilot_tone_freq = 0.0;        // Hz, baseband offset
    double pilot_tone_power_ratio_db = -12.0;  // relative to signal; -inf disables

    void validate() const {
        if (preamble_len < 64) throw std::invalid_argument("FrameLayout: preamble_len < 64");
        if (payload_len < 0) throw std::invalid_argument("FrameLayout: negative payload_len");
    }
};

/// Default pulse-shaping span (symbols) used by the transmit chains.
inline constexpr int kPulseSpan = 96;

/// Upsample and root-raised-cosine shape; alpha < 1 compresses the pulse
/// bandwidth below the symbol rate (faster-than-Nyquist operation).
/// Output rate is baud*sps, mean power normalized to 1.
ComplexFrame ftn_shape(const cvec& symbols, double alpha, double rolloff, int sps, double baud);

/// Add the frequency pilot. Tone power = frame power * ratio; a pilot that
/// falls inside the 99% signal bandwidth is a configuration error.
ComplexFrame insert_pilot_tone(const ComplexFrame& frame, const FrameLayout& layout);

/// Seeded constant-amplitude QPSK preamble prepended to the payload.
struct BuiltFrame {
    cvec symbols;    // preamble + payload
    cvec preamble;   // reference copy for the receiver
};
BuiltFrame build_frame(const cvec& payload_symbols, const FrameLayout& layout, std::uint64_t seed);

}  // namespace linksim
