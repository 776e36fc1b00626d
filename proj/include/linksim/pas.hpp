#pragma once

#include <cstdint>
#include <vector>

#include "linksim/constellation.hpp"
#include "linksim/fec.hpp"
#include "linksim/shaping.hpp"

namespace linksim {

/// Probabilistic amplitude shaping frame plan: matcher blocks feed the
/// amplitudes, systematic FEC over the amplitude labels plus leftover info
/// bits, parity and tail riding on the sign bits. Bit budget closes exactly:
/// sign_info + kept_parity + 4 == amplitudes per frame.
struct PasFraming {
    ShapingSpec spec;             // with block_len and composition
    int n_blocks = 0;
    int amps_per_frame = 0;       // = sign positions = 2 * symbols_2d
    int sign_info_bits = 0;
    std::size_t ccdm_bits_per_block = 0;
    std::size_t info_bits_per_frame = 0;
    FecCodec codec;               // interleave = false

    int symbols_2d() const { return amps_per_frame / 2; }
};

/// Solve the sign-bit budget for the given number of matcher blocks.
/// Throws SimError::configuration when no exact split exists.
PasFraming plan_pas_frame(const ShapingSpec& spec, int n_blocks);

struct PasEncodeResult {
    std::vector<std::uint16_t> symbol_indices;  // into make_pcs64(...).points
    std::vector<std::uint8_t> amp_indices;      // per dimension, matcher output
    std::vector<std::uint8_t> coded_bits;       // full codeword, natural order
};

PasEncodeResult pas_encode(const std::vector<std::uint8_t>& info_bits, const PasFraming& f);

struct PasDecodeResult {
    std::vector<std::uint8_t> info_bits;   // recovered; failed blocks zero-filled
    std::vector<std::uint8_t> fec_info;    // decoded FEC systematic bits
    int failed_blocks = 0;                 // composition violations after FEC
};

/// Decode from per-dimension bit LLRs (3 per dimension: sign, then the two
/// amplitude label bits; dimension order I0 Q0 I1 Q1 ...).
PasDecodeResult pas_decode(const dvec& dim_bit_llrs, const PasFraming& f);

/// The shaped constellation this framing addresses.
Constellation pas_constellation(const PasFraming& f);

}  // namespace linksim
