#pragma once

#include <cstdint>
#include <vector>

#include "linksim/complex_frame.hpp"

namespace linksim {

/// One real dimension of a separable QAM format: amplitude levels in
/// ascending order, their probabilities and Gray bit labels.
struct PamAlphabet {
    dvec levels;                       // ascending, unnormalized (e.g. -3,-1,1,3)
    dvec probs;                        // per level, sums to 1
    std::vector<std::uint32_t> labels; // Gray label per level, `bits` wide
    int bits = 0;

    std::size_t size() const { return levels.size(); }

    /// Index of the level carrying the given label.
    std::size_t index_of_label(std::uint32_t label) const;

    /// Nearest-level index for a (scaled) observation.
    std::size_t slice(double y) const;
};

/// Product constellation of two independent PAM dimensions (I and Q).
/// Points are normalized to unit average energy under the probabilities.
struct Constellation {
    PamAlphabet pam;           // per-dimension alphabet (same for I and Q)
    double dim_scale = 1.0;    // scale applied to pam.levels
    cvec points;               // pam.size()^2 points, index = i_idx*pam.size()+q_idx
    dvec probabilities;
    std::vector<std::uint32_t> labels;  // per point, bits_per_symbol wide (I bits high)
    int bits_per_symbol = 0;

    cplx point(std::size_t i_idx, std::size_t q_idx) const {
        return {pam.levels[i_idx] * dim_scale, pam.levels[q_idx] * dim_scale};
    }

    /// Nearest point by independent per-dimension slicing.
    cplx slice(cplx y) const {
        return point(pam.slice(y.real() / dim_scale), pam.slice(y.imag() / dim_scale));
    }

    std::uint32_t slice_label(cplx y) const {
        std::size_t i = pam.slice(y.real() / dim_scale);
        std::size_t q = pam.slice(y.imag() / dim_scale);
        return (pam.labels[i] << pam.bits) | pam.labels[q];
    }
};

/// Gray PAM4: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
PamAlphabet pam4_gray();

/// Gray PAM2 (+/-1) for QPSK dimensions.
PamAlphabet pam2();

/// 8-level shaped PAM: signs x amplitudes with per-amplitude probabilities;
/// label = [sign][amplitude Gray], reflected-Gray overall.
PamAlphabet pam8_shaped(const dvec& amplitudes, const dvec& amp_probs);

Constellation product_constellation(const PamAlphabet& pam);

Constellation make_qpsk();
Constellation make_qam16();
Constellation make_pcs64(const dvec& amplitudes, const dvec& amp_probs);

/// Gray QAM mapping: independent Gray PAM per I and Q, I bits first.
cvec qam_map(const std::vector<std::uint8_t>& bits, const Constellation& c);

/// Hard-decision labels back to bits (inverse of qam_map up to decisions).
std::vector<std::uint8_t> qam_hard_bits(const cvec& symbols, const Constellation& c);

}  // namespace linksim
