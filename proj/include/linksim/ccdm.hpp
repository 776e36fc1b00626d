#pragma once

#include <cstdint>
#include <vector>

#include "linksim/complex_frame.hpp"

namespace linksim {

/// Number of information bits a composition can carry:
/// floor(log2(multinomial(block_len; composition))).
std::size_t ccdm_bits(const std::vector<int>& composition);

/// Constant-composition distribution matching by exact integer interval
/// subdivision (arithmetic coding with multinomial counts). Bijective from
/// the 2^k bit inputs onto distinct fixed-composition index sequences.
std::vector<std::uint8_t> ccdm_match(const std::vector<std::uint8_t>& info_bits,
                                     const std::vector<int>& composition);

/// Exact inverse of ccdm_match. Throws SimError::decode_failed when the
/// sequence does not carry the stated composition.
std::vector<std::uint8_t> ccdm_dematch(const std::vector<std::uint8_t>& indices,
                                       const std::vector<int>& composition);

}  // namespace linksim
