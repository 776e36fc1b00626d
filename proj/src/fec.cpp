#include "linksim/fec.hpp"

#include <algorithm>
#include <cmath>

#include "linksim/rng.hpp"

namespace linksim {

namespace {

constexpr double kNegInf = -1e300;

// g0 = 7 (1+D+D^2) feedback, g1 = 5 (1+D^2) feedforward; state = s1*2 + s2
inline int rsc_internal(int state, int u) { return u ^ ((state >> 1) & 1) ^ (state & 1); }
inline int rsc_parity(int state, int u) { return rsc_internal(state, u) ^ (state & 1); }
inline int rsc_next(int state, int u) { return (rsc_internal(state, u) << 1) | ((state >> 1) & 1); }
inline int rsc_tail_input(int state) { return ((state >> 1) & 1) ^ (state & 1); }

struct CodedIndexMap {
    std::vector<int> sys;   // per trellis step: coded position of systematic bit
    std::vector<int> par;   // coded position of parity bit, -1 if punctured
    int total = 0;
};

CodedIndexMap coded_index_map(const FecCodec& codec) {
    CodedIndexMap m;
    const int k = codec.info_len;
    m.sys.resize(k + 2);
    m.par.resize(k + 2);
    int pos = 0;
    for (int t = 0; t < k; ++t) {
        m.sys[t] = pos++;
        m.par[t] = (t % codec.parity_keep_period == 0) ? pos++ : -1;
    }
    for (int t = k; t < k + 2; ++t) {  // tail, unpunctured
        m.sys[t] = pos++;
        m.par[t] = pos++;
    }
    m.total = pos;
    return m;
}

inline double clamp_llr(double v) {
    if (v > kLlrClamp) return kLlrClamp;
    if (v < -kLlrClamp) return -kLlrClamp;
    return v;
}

}  // namespace

std::vector<std::uint32_t> make_interleaver(std::size_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = static_cast<std::uint32_t>(i);
    Rng rng(derive_seed(seed, 0x17eaf));
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = rng.next_below(i);
        std::swap(pi[i - 1], pi[j]);
    }
    return pi;
}

std::vector<std::uint8_t> fec_encode(const std::vector<std::uint8_t>& info_bits,
                                     const FecCodec& codec) {
    codec.validate();
    if (static_cast<int>(info_bits.size()) != codec.info_len)
        throw SimError(SimError::Kind::parameter, "fec_encode: info length mismatch");

    const auto map = coded_index_map(codec);
    std::vector<std::uint8_t> coded(map.total, 0);
    int state = 0;
    for (int t = 0; t < codec.info_len + 2; ++t) {
        int u = t < codec.info_len ? info_bits[t] : rsc_tail_input(state);
        coded[map.sys[t]] = static_cast<std::uint8_t>(u);
        int p = rsc_parity(state, u);
        if (map.par[t] >= 0) coded[map.par[t]] = static_cast<std::uint8_t>(p);
        state = rsc_next(state, u);
    }
    // terminated at the zero state by construction

    if (!codec.interleave) return coded;
    auto pi = make_interleaver(coded.size(), codec.interleaver_seed);
    std::vector<std::uint8_t> out(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i) out[pi[i]] = coded[i];
    return out;
}

FecDecodeResult fec_bcjr_decode(const dvec& channel_llrs, const dvec& priors,
                                const FecCodec& codec) {
    codec.validate();
    const auto map = coded_index_map(codec);
    if (static_cast<int>(channel_llrs.size()) != map.total)
        throw SimError(SimError::Kind::parameter, "fec_bcjr_decode: LLR block length mismatch");
    if (!priors.empty() && priors.size() != channel_llrs.size())
        throw SimError(SimError::Kind::parameter, "fec_bcjr_decode: prior length mismatch");

    // total input LLR per coded position, deinterleaved to natural order
    dvec in(map.total);
    for (int i = 0; i < map.total; ++i)
        in[i] = channel_llrs[i] + (priors.empty() ? 0.0 : priors[i]);
    if (codec.interleave) {
        auto pi = make_interleaver(channel_llrs.size(), codec.interleaver_seed);
        dvec tmp(map.total);
        for (int i = 0; i < map.total; ++i) tmp[i] = in[pi[i]];
        in.swap(tmp);
    }

    const int steps = codec.info_len + 2;
    // per-step observation LLRs in the mother domain
    dvec ls(steps), lp(steps);
    for (int t = 0; t < steps; ++t) {
        ls[t] = in[map.sys[t]];
        lp[t] = map.par[t] >= 0 ? in[map.par[t]] : 0.0;
    }

    auto gamma = [&](int t, int state, int u) {
        const double xs = u ? -1.0 : 1.0;
        const double xp = rsc_parity(state, u) ? -1.0 : 1.0;
        return 0.5 * (xs * ls[t] + xp * lp[t]);
    };

    // forward
    std::vector<std::array<double, 4>> alpha(steps + 1);
    alpha[0] = {0.0, kNegInf, kNegInf, kNegInf};
    for (int t = 0; t < steps; ++t) {
        alpha[t + 1] = {kNegInf, kNegInf, kNegInf, kNegInf};
        for (int s = 0; s < 4; ++s) {
            if (alpha[t][s] == kNegInf) continue;
            const bool tail = t >= codec.info_len;
            for (int u = 0; u < 2; ++u) {
                if (tail && u != rsc_tail_input(s)) continue;
                int ns = rsc_next(s, u);
                alpha[t + 1][ns] = maxstar(alpha[t + 1][ns], alpha[t][s] + gamma(t, s, u));
            }
        }
        // normalize
        double m = std::max(std::max(alpha[t + 1][0], alpha[t + 1][1]),
                            std::max(alpha[t + 1][2], alpha[t + 1][3]));
        for (auto& v : alpha[t + 1])
            if (v != kNegInf) v -= m;
    }

    // backward
    std::vector<std::array<double, 4>> beta(steps + 1);
    beta[steps] = {0.0, kNegInf, kNegInf, kNegInf};  // terminated
    for (int t = steps - 1; t >= 0; --t) {
        beta[t] = {kNegInf, kNegInf, kNegInf, kNegInf};
        const bool tail = t >= codec.info_len;
        for (int s = 0; s < 4; ++s) {
            for (int u = 0; u < 2; ++u) {
                if (tail && u != rsc_tail_input(s)) continue;
                int ns = rsc_next(s, u);
                if (beta[t + 1][ns] == kNegInf) continue;
                beta[t][s] = maxstar(beta[t][s], beta[t + 1][ns] + gamma(t, s, u));
            }
        }
        double m = std::max(std::max(beta[t][0], beta[t][1]), std::max(beta[t][2], beta[t][3]));
        for (auto& v : beta[t])
            if (v != kNegInf) v -= m;
    }

    FecDecodeResult res;
    res.info_bits.resize(codec.info_len);
    res.extrinsic_mother.assign(2 * static_cast<std::size_t>(steps), 0.0);
    dvec ext_natural(map.total, 0.0);

    for (int t = 0; t < steps; ++t) {
        double s0 = kNegInf, s1 = kNegInf, p0 = kNegInf, p1 = kNegInf;
        const bool tail = t >= codec.info_len;
        for (int s = 0; s < 4; ++s) {
            if (alpha[t][s] == kNegInf) continue;
            for (int u = 0; u < 2; ++u) {
                if (tail && u != rsc_tail_input(s)) continue;
                int ns = rsc_next(s, u);
                if (beta[t + 1][ns] == kNegInf) continue;
                double m = alpha[t][s] + gamma(t, s, u) + beta[t + 1][ns];
                if (u == 0)
                    s0 = maxstar(s0, m);
                else
                    s1 = maxstar(s1, m);
                if (rsc_parity(s, u) == 0)
                    p0 = maxstar(p0, m);
                else
                    p1 = maxstar(p1, m);
            }
        }
        const double post_s = s0 - s1;
        const double post_p = p0 - p1;
        if (t < codec.info_len) res.info_bits[t] = post_s < 0.0 ? 1 : 0;

        const double ext_s = clamp_llr(post_s - ls[t]);
        const double ext_p = clamp_llr(post_p - lp[t]);
        res.extrinsic_mother[t] = ext_s;
        res.extrinsic_mother[steps + t] = ext_p;
        ext_natural[map.sys[t]] = ext_s;
        if (map.par[t] >= 0) ext_natural[map.par[t]] = ext_p;
    }

    if (codec.interleave) {
        auto pi = make_interleaver(channel_llrs.size(), codec.interleaver_seed);
        res.extrinsic.resize(map.total);
        for (int i = 0; i < map.total; ++i) res.extrinsic[pi[i]] = ext_natural[i];
    } else {
        res.extrinsic = std::move(ext_natural);
    }
    return res;
}

}  // namespace linksim
