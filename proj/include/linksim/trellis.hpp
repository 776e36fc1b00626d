#pragma once

#include <cstdint>
#include <vector>

#include "linksim/complex_frame.hpp"
#include "linksim/constellation.hpp"
#include "linksim/fir.hpp"
#include "linksim/ptprdfe.hpp"

namespace linksim {

/// ISI trellis over one PAM dimension: states are the (len(taps)-1) most
/// recent symbols, branch outputs the noiseless filtered sample.
struct TrellisSpec {
    dvec levels;                 // input alphabet (in sample units)
    dvec taps;                   // effective detector filter
    int n_states = 1;
    std::vector<double> branch_out;  // [state * levels + input]
    std::vector<int> next_state;     // [state * levels + input]

    int n_levels() const { return static_cast<int>(levels.size()); }
    int n_branches() const { return n_states * n_levels(); }

    /// State index holding the given most-recent-first symbol history.
    int state_of(const std::vector<int>& recent_first) const;
};

/// Full state/branch enumeration; throws SimError::complexity above the cap
/// (detector complexity grows exponentially with alphabet and memory).
TrellisSpec build_trellis(const dvec& pam_levels, const dvec& h_sd, int state_cap = 4096);

/// One-tap linear-prediction whitener for the equalizer residual:
/// h_pf = [1, eta], eta = -R(1)/R(0) clipped to [-0.9, 0.9].
struct PostFilterEstimate {
    FirFilter filter;          // [1, eta], reference_delay 0
    double eta = 0.0;
    double lag1_before = 0.0;  // normalized |R(1)/R(0)| before whitening
    double lag1_after = 0.0;   // same, measured on the filtered residual
    double residual_var = 0.0; // complex variance after whitening
};

PostFilterEstimate estimate_post_filter(const cvec& pr_symbols, const cvec& pr_reference,
                                        std::size_t min_symbols = 10000);

/// h_sd = h_pr * h_pf (linear convolution of tap sequences).
dvec effective_filter(const PrTarget& pr, const FirFilter& pf);

/// Log-MAP forward-backward over the ISI trellis for one dimension.
/// Priors are per Gray-label bit (pam.bits per symbol, MSB first, LLR > 0
/// favoring bit 0); returns extrinsic LLRs in the same layout, clamped.
/// init/final state -1 means an unknown (uniform) boundary.
dvec bcjr_detect(const dvec& samples, const TrellisSpec& trellis, const dvec& prior_llrs,
                 double noise_var, const PamAlphabet& pam, int init_state = -1,
                 int final_state = -1);

}  // namespace linksim
