#pragma once

#include <cstdint>
#include <vector>

#include "linksim/complex_frame.hpp"

namespace linksim {

/// Recursive systematic convolutional code, generators (1, g1/g0) with
/// (g0,g1) = (7,5) octal, memory 2, terminated with two tail steps.
/// Parity is punctured to one in three inputs (rate 3/4 before the tail);
/// the coded block is optionally passed through a seeded interleaver.
struct FecCodec {
    int info_len = 0;
    bool interleave = true;
    std::uint64_t interleaver_seed = 0x5eed;
    int parity_keep_period = 3;  // parity kept when t % period == 0; 1 = rate 1/2

    int kept_parity() const { return (info_len + parity_keep_period - 1) / parity_keep_period; }
    int coded_len() const { return info_len + kept_parity() + 4; }

    void validate() const {
        if (info_len <= 0) throw std::invalid_argument("FecCodec: info_len must be positive");
        if (parity_keep_period < 1) throw std::invalid_argument("FecCodec: bad puncture period");
    }
};

/// Seeded Fisher-Yates permutation (the codec interleaver).
std::vector<std::uint32_t> make_interleaver(std::size_t n, std::uint64_t seed);

/// RSC encode, terminate, puncture, interleave.
std::vector<std::uint8_t> fec_encode(const std::vector<std::uint8_t>& info_bits,
                                     const FecCodec& codec);

/// LLR magnitude clamp applied to every soft output in the project.
inline constexpr double kLlrClamp = 30.0;

struct FecDecodeResult {
    dvec extrinsic;                       // coded domain, same order as fec_encode output
    std::vector<std::uint8_t> info_bits;  // hard decisions
    dvec extrinsic_mother;                // unpunctured domain: sys[0..K+1], par[0..K+1]
};

/// Log-MAP BCJR over the RSC trellis. `channel_llrs` and optional `priors`
/// are in the coded (transmitted) domain and are summed; punctured parity
/// positions are handled internally as zero-LLR observations.
FecDecodeResult fec_bcjr_decode(const dvec& channel_llrs, const dvec& priors,
                                const FecCodec& codec);

/// max*(a,b) = log(exp(a)+exp(b)) computed exactly via log1p.
inline double maxstar(double a, double b) {
    if (a == -1e300 || a != a) return b;
    double m = a > b ? a : b;
    double d = a > b ? a - b : b - a;
    return m + std::log1p(std::exp(-d));
}

}  // namespace linksim
