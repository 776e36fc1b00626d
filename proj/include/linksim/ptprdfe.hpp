#pragma once

#include "linksim/complex_frame.hpp"
#include "linksim/constellation.hpp"

namespace linksim {

/// Monic partial-response target the equalizer converges to, per I/Q
/// dimension. taps[0] == 1; [1] is full-response operation.
struct PrTarget {
    dvec taps{1.0, 1.0};

    void validate() const {
        if (taps.empty() || taps[0] != 1.0)
            throw std::invalid_argument("PrTarget: taps must start with 1");
    }
    std::size_t memory() const { return taps.size() - 1; }
};

/// Enumerate the constellation seen after the target: per-dimension level
/// sums over all symbol tuples with their exact occurrence probabilities
/// (16QAM through [1,1] gives the nonuniform 49-point constellation).
Constellation pr_expand(const Constellation& c, const PrTarget& target);

struct EqualizerConfig {
    int n_ff = 31;             // feedforward taps, 2 samples/symbol, odd
    int n_fb = 4;              // adaptive residual feedback taps
    double mu_ff_train = 1e-3;
    double mu_ff_track = 1e-4;
    double mu_fb = 2e-5;
    double mu_phase = 2e-2;
    int train_passes = 24;
    double error_gate = 4.0;   // hold tap updates when |e|^2 exceeds this
                               // multiple of its running mean; 0 disables
};

struct EqualizerState {
    EqualizerConfig cfg;
    cvec ff;
    cvec fb;
    double phase = 0.0;
    bool trained = false;
    double train_mse = 0.0;
};

EqualizerState make_equalizer(const EqualizerConfig& cfg);

/// Data-aided LMS startup on a preamble. rx2 holds 2 samples/symbol with
/// symbol k of the frame at rx2[2k]; known_symbols sit at positions
/// start..start+n-1 of that grid. Runs cfg.train_passes passes.
/// Throws SimError::training_failed on divergence.
EqualizerState train(EqualizerState state, const cvec& rx2, const cvec& known_symbols,
                     const PrTarget& target, std::size_t start = 0);

struct EqualizeResult {
    cvec pr_symbols;    // phase-corrected partial-response output y_k
    cvec decisions;     // hard decisions on the original constellation
    cvec pr_reference;  // d_k = decision + PR feedback (post-filter input)
    dvec phase_trace;   // phase used at each symbol
};

/// Decision-directed equalization with joint carrier-phase tracking over
/// symbols [start, start+count) of the rx2 grid. `history` holds the
/// transmitted symbols immediately before `start` (most recent last) and
/// seeds the feedback for the first target-memory symbols.
EqualizeResult equalize(EqualizerState& state, const cvec& rx2, std::size_t start,
                        std::size_t count, const PrTarget& target, const Constellation& c,
                        const cvec& history);

}  // namespace linksim
