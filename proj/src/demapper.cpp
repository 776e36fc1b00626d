#include "linksim/demapper.hpp"

#include <cmath>

#include "linksim/fec.hpp"

namespace linksim {

dvec pam_map_llrs(const dvec& samples, const PamAlphabet& pam, double dim_scale,
                  double noise_var_dim, const dvec& bit_prior_llrs, bool use_alphabet_priors) {
    if (noise_var_dim <= 0.0)
        throw SimError(SimError::Kind::parameter, "pam_map_llrs: noise_var must be positive");
    const std::size_t nl = pam.size();
    const int nb = pam.bits;
    const bool have_priors = !bit_prior_llrs.empty();
    if (have_priors && bit_prior_llrs.size() != samples.size() * static_cast<std::size_t>(nb))
        throw SimError(SimError::Kind::parameter, "pam_map_llrs: prior length mismatch");

    dvec log_p(nl, 0.0);
    if (use_alphabet_priors)
        for (std::size_t l = 0; l < nl; ++l)
            log_p[l] = pam.probs[l] > 0.0 ? std::log(pam.probs[l]) : -1e300;

    dvec out(samples.size() * static_cast<std::size_t>(nb));
    const double inv2v = 1.0 / (2.0 * noise_var_dim);
    dvec metric(nl);

    for (std::size_t k = 0; k < samples.size(); ++k) {
        for (std::size_t l = 0; l < nl; ++l) {
            double d = samples[k] - pam.levels[l] * dim_scale;
            double m = -d * d * inv2v + log_p[l];
            if (have_priors) {
                // add per-bit prior terms for this level's label
                for (int b = 0; b < nb; ++b) {
                    double lp = bit_prior_llrs[k * nb + b];
                    int bit = (pam.labels[l] >> (nb - 1 - b)) & 1;
                    // log P(b) = -log(1+exp(-+L)) up to a bitwise-common constant
                    m += (bit == 0 ? 0.5 * lp : -0.5 * lp);
                }
            }
            metric[l] = m;
        }
        for (int b = 0; b < nb; ++b) {
            double m0 = -1e300, m1 = -1e300;
            for (std::size_t l = 0; l < nl; ++l) {
                if (((pam.labels[l] >> (nb - 1 - b)) & 1) == 0)
                    m0 = maxstar(m0, metric[l]);
                else
                    m1 = maxstar(m1, metric[l]);
            }
            double llr = m0 - m1;
            if (have_priors) llr -= bit_prior_llrs[k * nb + b];  // extrinsic
            if (llr > kLlrClamp) llr = kLlrClamp;
            if (llr < -kLlrClamp) llr = -kLlrClamp;
            out[k * nb + b] = llr;
        }
    }
    return out;
}

dvec pam_map_llrs(const dvec& samples, const PamAlphabet& pam, double dim_scale,
                  double noise_var_dim) {
    return pam_map_llrs(samples, pam, dim_scale, noise_var_dim, {}, true);
}

}  // namespace linksim
