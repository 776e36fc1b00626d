#include "linksim/turbo.hpp"

namespace linksim {

TurboResult turbo_equalize(const dvec& i_samples, const dvec& q_samples, const TurboConfig& cfg,
                           const std::vector<std::uint8_t>* reference_info) {
    if (cfg.n_iter < 1) throw std::invalid_argument("turbo_equalize: n_iter >= 1 required");
    if (i_samples.size() != q_samples.size())
        throw std::invalid_argument("turbo_equalize: I/Q length mismatch");
    if (cfg.tail_guard_i.size() != cfg.tail_guard_q.size())
        throw std::invalid_argument("turbo_equalize: guard length mismatch");

    const std::size_t n_guard = cfg.tail_guard_i.size();
    const std::size_t n_sym = i_samples.size();
    if (n_sym < n_guard) throw std::invalid_argument("turbo_equalize: fewer samples than guards");
    const std::size_t n_coded_sym = n_sym - n_guard;
    const int nb = cfg.pam.bits;
    const std::size_t bits_per_sym = static_cast<std::size_t>(2 * nb);
    if (n_coded_sym * bits_per_sym != static_cast<std::size_t>(cfg.codec.coded_len()))
        throw SimError(SimError::Kind::configuration,
                       "turbo_equalize: codeword does not fill the symbol grid");

    const std::size_t half = n_sym * static_cast<std::size_t>(nb);
    dvec prior_i(half, 0.0), prior_q(half, 0.0);

    // pin the known tail symbols' bits
    auto pin_guards = [&](dvec& prior, const std::vector<int>& levels) {
        for (std::size_t g = 0; g < n_guard; ++g) {
            const std::uint32_t label = cfg.pam.labels[levels[g]];
            for (int b = 0; b < nb; ++b) {
                const int bit = (label >> (nb - 1 - b)) & 1;
                prior[(n_coded_sym + g) * nb + b] = bit ? -kLlrClamp : kLlrClamp;
            }
        }
    };
    pin_guards(prior_i, cfg.tail_guard_i);
    pin_guards(prior_q, cfg.tail_guard_q);

    TurboResult res;
    for (int it = 0; it < cfg.n_iter; ++it) {
        dvec ext_i = bcjr_detect(i_samples, cfg.trellis, prior_i, cfg.noise_var_dim, cfg.pam,
                                 cfg.init_state_i, cfg.final_state_i);
        dvec ext_q = bcjr_detect(q_samples, cfg.trellis, prior_q, cfg.noise_var_dim, cfg.pam,
                                 cfg.init_state_q, cfg.final_state_q);

        // detector extrinsic -> coded-domain LLRs (interleaved order)
        dvec det(n_coded_sym * bits_per_sym);
        for (std::size_t k = 0; k < n_coded_sym; ++k)
            for (int b = 0; b < nb; ++b) {
                det[k * bits_per_sym + b] = ext_i[k * nb + b];
                det[k * bits_per_sym + nb + b] = ext_q[k * nb + b];
            }

        auto dec = fec_bcjr_decode(det, {}, cfg.codec);
        res.info_bits = dec.info_bits;

        if (reference_info) {
            std::size_t errs = 0;
            const std::size_t n = std::min(reference_info->size(), dec.info_bits.size());
            for (std::size_t i = 0; i < n; ++i)
                if ((*reference_info)[i] != dec.info_bits[i]) ++errs;
            res.per_iteration_ber.push_back(static_cast<double>(errs) / static_cast<double>(n));
        }

        if (it + 1 < cfg.n_iter) {
            for (std::size_t k = 0; k < n_coded_sym; ++k)
                for (int b = 0; b < nb; ++b) {
                    prior_i[k * nb + b] = dec.extrinsic[k * bits_per_sym + b];
                    prior_q[k * nb + b] = dec.extrinsic[k * bits_per_sym + nb + b];
                }
        }
    }
    return res;
}

}  // namespace linksim
