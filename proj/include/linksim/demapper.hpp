#pragma once

#include "linksim/complex_frame.hpp"
#include "linksim/constellation.hpp"

namespace linksim {

/// Memoryless MAP demapper for one PAM dimension: exact log-sum-exp bit
/// LLRs with the alphabet's (possibly shaped) priors included.
/// Output: pam.bits LLRs per sample, MSB first, clamped to +/-30.
dvec pam_map_llrs(const dvec& samples, const PamAlphabet& pam, double dim_scale,
                  double noise_var_dim);

/// Same, with externally supplied per-bit prior LLRs (bit order as output).
/// Priors replace the alphabet probabilities when given.
dvec pam_map_llrs(const dvec& samples, const PamAlphabet& pam, double dim_scale,
                  double noise_var_dim, const dvec& bit_prior_llrs, bool use_alphabet_priors);

}  // namespace linksim
