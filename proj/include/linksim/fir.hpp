#pragma once

#include "linksim/complex_frame.hpp"

namespace linksim {

/// FIR filter: taps plus the group-delay convention used when applying it.
/// Applying the filter aligns output so input index k maps to output index k
/// relative to reference_delay.
struct FirFilter {
    cvec taps;
    int reference_delay = 0;

    FirFilter() = default;
    FirFilter(cvec t, int delay) : taps(std::move(t)), reference_delay(delay) { validate(); }
    FirFilter(const dvec& t, int delay) : reference_delay(delay) {
        taps.reserve(t.size());
        for (double v : t) taps.emplace_back(v, 0.0);
        validate();
    }

    void validate() const {
        if (taps.empty()) throw std::invalid_argument("FirFilter: empty taps");
        if (reference_delay < 0 || reference_delay >= static_cast<int>(taps.size()))
            throw std::invalid_argument("FirFilter: reference_delay out of range");
    }

    dvec real_taps() const {
        dvec out(taps.size());
        for (std::size_t i = 0; i < taps.size(); ++i) out[i] = taps[i].real();
        return out;
    }
};

/// Root-raised-cosine design, unit tap energy, centered reference delay.
/// bandwidth_scale < 1 compresses the two-sided bandwidth to
/// scale*(1+rolloff)/T (the pulse used for faster-than-Nyquist shaping).
FirFilter design_rrc(double rolloff, int span, int sps, double bandwidth_scale = 1.0);

/// Closed-form RRC impulse response at time t (in symbol periods, T = 1).
double rrc_impulse(double rolloff, double t);

/// Linear convolution aligned by reference_delay; length and rate preserved.
ComplexFrame fir_filter(const ComplexFrame& frame, const FirFilter& filter);

cvec fir_apply(const cvec& x, const FirFilter& filter);

}  // namespace linksim
