#pragma once

#include "linksim/constellation.hpp"
#include "linksim/fec.hpp"
#include "linksim/trellis.hpp"

namespace linksim {

/// Iterative exchange between the per-dimension sequence detectors and the
/// FEC decoder. Coded (interleaved) bit 4k..4k+3 maps to symbol k: two I
/// bits then two Q bits.
struct TurboConfig {
    FecCodec codec;
    TrellisSpec trellis;       // shared by the I and Q branches
    PamAlphabet pam;           // original alphabet labels (Gray PAM4)
    double noise_var_dim = 1e-2;
    int n_iter = 4;
    int init_state_i = -1, final_state_i = -1;
    int init_state_q = -1, final_state_q = -1;
    // known symbols appended after the codeword (their bits are pinned);
    // level indices per tail symbol
    std::vector<int> tail_guard_i, tail_guard_q;
};

struct TurboResult {
    std::vector<std::uint8_t> info_bits;
    dvec per_iteration_ber;     // filled when a reference is registered
};

/// reference_info, when given, enables the per-iteration BER trace.
TurboResult turbo_equalize(const dvec& i_samples, const dvec& q_samples,
                           const TurboConfig& cfg,
                           const std::vector<std::uint8_t>* reference_info = nullptr);

}  // namespace linksim
