#include "linksim/trellis.hpp"

#include <cmath>

#include "linksim/fec.hpp"

namespace linksim {

int TrellisSpec::state_of(const std::vector<int>& recent_first) const {
    const int nl = n_levels();
    const std::size_t mem = taps.size() - 1;
    if (recent_first.size() < mem)
        throw std::invalid_argument("TrellisSpec::state_of: not enough history");
    int s = 0;
    for (std::size_t m = mem; m-- > 0;) s = s * nl + recent_first[m];
    return s;
}

TrellisSpec build_trellis(const dvec& pam_levels, const dvec& h_sd, int state_cap) {
    if (h_sd.empty()) throw std::invalid_argument("build_trellis: empty filter");
    if (pam_levels.size() < 2) throw std::invalid_argument("build_trellis: need >= 2 levels");

    const int nl = static_cast<int>(pam_levels.size());
    const std::size_t mem = h_sd.size() - 1;
    double states_f = 1;
    for (std::size_t m = 0; m < mem; ++m) {
        states_f *= nl;
        if (states_f > static_cast<double>(state_cap))
            throw SimError(SimError::Kind::complexity, "build_trellis: state count above cap");
    }

    TrellisSpec t;
    t.levels = pam_levels;
    t.taps = h_sd;
    t.n_states = static_cast<int>(states_f);
    t.branch_out.resize(static_cast<std::size_t>(t.n_states) * nl);
    t.next_state.resize(static_cast<std::size_t>(t.n_states) * nl);

    const int wrap = mem >= 1 ? t.n_states / nl : 1;
    for (int s = 0; s < t.n_states; ++s) {
        for (int u = 0; u < nl; ++u) {
            double out = h_sd[0] * pam_levels[u];
            int digits = s;
            for (std::size_t m = 1; m <= mem; ++m) {
                out += h_sd[m] * pam_levels[digits % nl];
                digits /= nl;
            }
            t.branch_out[static_cast<std::size_t>(s) * nl + u] = out;
            t.next_state[static_cast<std::size_t>(s) * nl + u] =
                mem >= 1 ? (u + (s % wrap) * nl) : 0;
        }
    }
    return t;
}

PostFilterEstimate estimate_post_filter(const cvec& pr_symbols, const cvec& pr_reference,
                                        std::size_t min_symbols) {
    if (pr_symbols.size() != pr_reference.size())
        throw std::invalid_argument("estimate_post_filter: length mismatch");
    if (pr_symbols.size() < min_symbols)
        throw SimError(SimError::Kind::parameter, "estimate_post_filter: too few symbols");

    const std::size_t n = pr_symbols.size();
    cvec r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = pr_symbols[k] - pr_reference[k];

    double r0 = 0.0, r1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) r0 += std::norm(r[k]);
    for (std::size_t k = 1; k < n; ++k) r1 += (r[k] * std::conj(r[k - 1])).real();
    r0 /= static_cast<double>(n);
    r1 /= static_cast<double>(n - 1);

    PostFilterEstimate est;
    est.lag1_before = r0 > 0 ? std::abs(r1 / r0) : 0.0;
    double eta = r0 > 0 ? -r1 / r0 : 0.0;
    eta = std::min(0.9, std::max(-0.9, eta));
    est.eta = eta;
    est.filter = FirFilter(dvec{1.0, eta}, 0);

    // measure the filtered residual
    double f0 = 0.0, f1 = 0.0;
    cplx prev_r(0, 0), prev_w(0, 0);
    bool have_prev = false;
    for (std::size_t k = 1; k < n; ++k) {
        cplx w = r[k] + eta * r[k - 1];
        f0 += std::norm(w);
        if (have_prev) f1 += (w * std::conj(prev_w)).real();
        prev_w = w;
        have_prev = true;
    }
    f0 /= static_cast<double>(n - 1);
    f1 /= static_cast<double>(n - 2);
    est.lag1_after = f0 > 0 ? std::abs(f1 / f0) : 0.0;
    est.residual_var = f0;
    (void)prev_r;
    return est;
}

dvec effective_filter(const PrTarget& pr, const FirFilter& pf) {
    pr.validate();
    const auto pf_taps = pf.real_taps();
    dvec out(pr.taps.size() + pf_taps.size() - 1, 0.0);
    for (std::size_t i = 0; i < pr.taps.size(); ++i)
        for (std::size_t j = 0; j < pf_taps.size(); ++j) out[i + j] += pr.taps[i] * pf_taps[j];
    return out;
}

dvec bcjr_detect(const dvec& samples, const TrellisSpec& t, const dvec& prior_llrs,
                 double noise_var, const PamAlphabet& pam, int init_state, int final_state) {
    if (noise_var <= 0.0)
        throw SimError(SimError::Kind::parameter, "bcjr_detect: noise_var must be positive");
    const int nl = t.n_levels();
    const int nb = pam.bits;
    if (static_cast<int>(pam.size()) != nl)
        throw std::invalid_argument("bcjr_detect: alphabet size mismatch");
    const std::size_t n = samples.size();
    const bool have_priors = !prior_llrs.empty();
    if (have_priors && prior_llrs.size() != n * static_cast<std::size_t>(nb))
        throw SimError(SimError::Kind::parameter, "bcjr_detect: prior length mismatch");

    constexpr double kNegInf = -1e300;
    const double inv2v = 1.0 / (2.0 * noise_var);

    // symbol log-priors from per-bit LLRs
    dvec sym_prior(n * nl, 0.0);
    if (have_priors) {
        for (std::size_t k = 0; k < n; ++k)
            for (int u = 0; u < nl; ++u) {
                double lp = 0.0;
                for (int b = 0; b < nb; ++b) {
                    double L = prior_llrs[k * nb + b];
                    int bit = (pam.labels[u] >> (nb - 1 - b)) & 1;
                    lp += (bit == 0) ? 0.5 * L : -0.5 * L;
                }
                sym_prior[k * nl + u] = lp;
            }
    }

    const int ns = t.n_states;
    std::vector<dvec> alpha(n + 1, dvec(ns, kNegInf));
    std::vector<dvec> beta(n + 1, dvec(ns, kNegInf));
    if (init_state >= 0)
        alpha[0][init_state] = 0.0;
    else
        std::fill(alpha[0].begin(), alpha[0].end(), 0.0);
    if (final_state >= 0)
        beta[n][final_state] = 0.0;
    else
        std::fill(beta[n].begin(), beta[n].end(), 0.0);

    auto metric = [&](std::size_t k, int s, int u) {
        const double d = samples[k] - t.branch_out[static_cast<std::size_t>(s) * nl + u];
        return -d * d * inv2v + sym_prior[k * nl + u];
    };

    for (std::size_t k = 0; k < n; ++k) {
        auto& a0 = alpha[k];
        auto& a1 = alpha[k + 1];
        double mx = kNegInf;
        for (int s = 0; s < ns; ++s) {
            if (a0[s] == kNegInf) continue;
            for (int u = 0; u < nl; ++u) {
                const int ns2 = t.next_state[static_cast<std::size_t>(s) * nl + u];
                const double v = a0[s] + metric(k, s, u);
                a1[ns2] = maxstar(a1[ns2], v);
            }
        }
        for (double v : a1) mx = std::max(mx, v);
        for (double& v : a1)
            if (v != kNegInf) v -= mx;
    }
    for (std::size_t k = n; k-- > 0;) {
        auto& b1 = beta[k + 1];
        auto& b0 = beta[k];
        double mx = kNegInf;
        for (int s = 0; s < ns; ++s) {
            for (int u = 0; u < nl; ++u) {
                const int ns2 = t.next_state[static_cast<std::size_t>(s) * nl + u];
                if (b1[ns2] == kNegInf) continue;
                b0[s] = maxstar(b0[s], b1[ns2] + metric(k, s, u));
            }
        }
        for (double v : b0) mx = std::max(mx, v);
        for (double& v : b0)
            if (v != kNegInf) v -= mx;
    }

    dvec out(n * static_cast<std::size_t>(nb));
    dvec bit0(nb), bit1(nb);
    for (std::size_t k = 0; k < n; ++k) {
        std::fill(bit0.begin(), bit0.end(), kNegInf);
        std::fill(bit1.begin(), bit1.end(), kNegInf);
        for (int s = 0; s < ns; ++s) {
            if (alpha[k][s] == kNegInf) continue;
            for (int u = 0; u < nl; ++u) {
                const int ns2 = t.next_state[static_cast<std::size_t>(s) * nl + u];
                if (beta[k + 1][ns2] == kNegInf) continue;
                const double m = alpha[k][s] + metric(k, s, u) + beta[k + 1][ns2];
                for (int b = 0; b < nb; ++b) {
                    if (((pam.labels[u] >> (nb - 1 - b)) & 1) == 0)
                        bit0[b] = maxstar(bit0[b], m);
                    else
                        bit1[b] = maxstar(bit1[b], m);
                }
            }
        }
        for (int b = 0; b < nb; ++b) {
            double post = bit0[b] - bit1[b];
            double ext = post - (have_priors ? prior_llrs[k * nb + b] : 0.0);
            if (ext > kLlrClamp) ext = kLlrClamp;
            if (ext < -kLlrClamp) ext = -kLlrClamp;
            out[k * nb + b] = ext;
        }
    }
    return out;
}

}  // namespace linksim
