#pragma once

#include "linksim/complex_frame.hpp"

namespace linksim {

/// One-sided-ordered (fftshifted) Welch periodogram.
struct PowerSpectrum {
    dvec freq_hz;   // ascending, -fs/2 .. fs/2
    dvec psd;       // linear power per bin
    double bin_hz = 0.0;
};

/// Welch-averaged periodogram: Hann window, 50% overlap, 4096-point
/// segments (shorter power of two for short frames).
PowerSpectrum welch_psd(const ComplexFrame& frame, std::size_t segment = 4096);

/// Smallest spectral width, symmetric about the PSD centroid, containing
/// `power_fraction` of total power. Width counts bin intervals (hi-lo)*bin_hz.
double occupied_bandwidth(const ComplexFrame& frame, double power_fraction);

double occupied_bandwidth(const PowerSpectrum& spec, double power_fraction);

}  // namespace linksim
