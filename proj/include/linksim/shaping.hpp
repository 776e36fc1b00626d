#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksim/complex_frame.hpp"

namespace linksim {

/// Solved amplitude distribution plus its constant-composition quantization.
struct ShapingSpec {
    dvec amplitude_alphabet;   // sorted positive reals, e.g. {1,3,5,7}
    dvec probabilities;        // per amplitude, sums to 1
    double lambda = 0.0;       // exponent parameter
    bool inverted = false;     // false: p ~ exp(-lambda a^2); true: exp(+lambda a^2)
    double target_entropy_2d = 0.0;  // bits per 2-D symbol
    int block_len = 0;               // amplitudes per matcher block
    std::vector<int> composition;    // counts per amplitude, sums to block_len

    /// Per-dimension amplitude entropy in bits.
    double amplitude_entropy() const;

    /// E[a^2] under the solved probabilities (one dimension, unnormalized).
    double mean_amplitude_energy() const;

    std::string to_json() const;
    static ShapingSpec from_json(const std::string& text);
};

/// Maxwell-Boltzmann solve: p(a) ~ exp(-lambda a^2), lambda >= 0 found by
/// bisection so 2*(H_amp + 1) equals the 2-D entropy target within 1e-9 bit.
ShapingSpec solve_mb(const dvec& amplitude_alphabet, double target_entropy_2d);

/// Inverted Maxwell-Boltzmann: p(a) ~ exp(+lambda a^2), same entropy target.
ShapingSpec solve_ivmb(const dvec& amplitude_alphabet, double target_entropy_2d);

/// Largest-remainder quantization of the probabilities to integer counts,
/// ties broken toward the smaller amplitude.
std::vector<int> composition_for(const ShapingSpec& spec, int block_len);

/// Convenience: solve and attach a composition.
ShapingSpec with_composition(ShapingSpec spec, int block_len);

}  // namespace linksim
