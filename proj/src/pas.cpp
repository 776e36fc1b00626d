#include "linksim/pas.hpp"

#include <cmath>

#include "linksim/ccdm.hpp"

namespace linksim {

namespace {

// amplitude Gray labels: index 0..3 -> 00,01,11,10
constexpr std::uint8_t kAmpGray[4] = {0b00, 0b01, 0b11, 0b10};

int amp_index_of_gray(std::uint8_t g) {
    for (int i = 0; i < 4; ++i)
        if (kAmpGray[i] == g) return i;
    return 0;
}

// level index in pam8_shaped order: negatives descending amp, then positives
inline int level_index(int amp_idx, int sign_bit) {
    return sign_bit ? (3 - amp_idx) : (4 + amp_idx);
}

}  // namespace

PasFraming plan_pas_frame(const ShapingSpec& spec, int n_blocks) {
    if (spec.block_len <= 0 || spec.composition.empty())
        throw std::invalid_argument("plan_pas_frame: spec lacks a composition");
    if (spec.amplitude_alphabet.size() != 4)
        throw std::invalid_argument("plan_pas_frame: 4-amplitude alphabet expected");
    if (n_blocks < 1 || (n_blocks * spec.block_len) % 2 != 0)
        throw std::invalid_argument("plan_pas_frame: amplitudes per frame must be even");

    PasFraming f;
    f.spec = spec;
    f.n_blocks = n_blocks;
    f.amps_per_frame = n_blocks * spec.block_len;
    f.ccdm_bits_per_block = ccdm_bits(spec.composition);

    const int s = f.amps_per_frame;
    const int amp_label_bits = 2 * s;
    int found = -1;
    for (int si = 0; si <= s; ++si) {
        FecCodec c;
        c.info_len = amp_label_bits + si;
        c.interleave = false;
        if (si + c.kept_parity() + 4 == s) {
            found = si;
            f.codec = c;
            break;
        }
    }
    if (found < 0)
        throw SimError(SimError::Kind::configuration,
                       "plan_pas_frame: no exact sign-bit budget for this frame size");
    f.sign_info_bits = found;
    f.info_bits_per_frame = static_cast<std::size_t>(n_blocks) * f.ccdm_bits_per_block +
                            static_cast<std::size_t>(f.sign_info_bits);
    return f;
}

Constellation pas_constellation(const PasFraming& f) {
    return make_pcs64(f.spec.amplitude_alphabet, f.spec.probabilities);
}

PasEncodeResult pas_encode(const std::vector<std::uint8_t>& info_bits, const PasFraming& f) {
    if (info_bits.size() != f.info_bits_per_frame)
        throw SimError(SimError::Kind::parameter, "pas_encode: info bit count mismatch");

    PasEncodeResult res;
    res.amp_indices.reserve(f.amps_per_frame);

    // matcher blocks
    std::size_t off = 0;
    for (int b = 0; b < f.n_blocks; ++b) {
        std::vector<std::uint8_t> block(info_bits.begin() + off,
                                        info_bits.begin() + off + f.ccdm_bits_per_block);
        off += f.ccdm_bits_per_block;
        auto amps = ccdm_match(block, f.spec.composition);
        res.amp_indices.insert(res.amp_indices.end(), amps.begin(), amps.end());
    }

    // systematic stream: amplitude Gray labels then the leftover info bits
    std::vector<std::uint8_t> sys;
    sys.reserve(f.codec.info_len);
    for (auto a : res.amp_indices) {
        sys.push_back((kAmpGray[a] >> 1) & 1);
        sys.push_back(kAmpGray[a] & 1);
    }
    sys.insert(sys.end(), info_bits.begin() + off, info_bits.end());

    res.coded_bits = fec_encode(sys, f.codec);

    // sign stream: sign-info systematic bits, kept parity, tail (natural order)
    std::vector<std::uint8_t> signs;
    signs.reserve(f.amps_per_frame);
    {
        const int k = f.codec.info_len;
        const int amp_label_bits = 2 * f.amps_per_frame;
        int pos = 0;
        for (int t = 0; t < k; ++t) {
            std::uint8_t s_bit = res.coded_bits[pos++];
            if (t >= amp_label_bits) signs.push_back(s_bit);
            if (t % f.codec.parity_keep_period == 0) signs.push_back(res.coded_bits[pos++]);
        }
        for (int t = 0; t < 4; ++t) signs.push_back(res.coded_bits[pos++]);  // tail
    }
    if (static_cast<int>(signs.size()) != f.amps_per_frame)
        throw SimError(SimError::Kind::configuration, "pas_encode: sign budget mismatch");

    res.symbol_indices.reserve(f.symbols_2d());
    for (int s2 = 0; s2 < f.symbols_2d(); ++s2) {
        int li = level_index(res.amp_indices[2 * s2], signs[2 * s2]);
        int lq = level_index(res.amp_indices[2 * s2 + 1], signs[2 * s2 + 1]);
        res.symbol_indices.push_back(static_cast<std::uint16_t>(li * 8 + lq));
    }
    return res;
}

PasDecodeResult pas_decode(const dvec& dim_bit_llrs, const PasFraming& f) {
    const std::size_t dims = static_cast<std::size_t>(f.amps_per_frame);
    if (dim_bit_llrs.size() != dims * 3)
        throw SimError(SimError::Kind::parameter, "pas_decode: LLR count mismatch");

    // rebuild coded-domain channel LLRs (natural order)
    const int k = f.codec.info_len;
    const int amp_label_bits = 2 * f.amps_per_frame;
    dvec channel(static_cast<std::size_t>(f.codec.coded_len()), 0.0);
    std::size_t sign_dim = 0;
    int pos = 0;
    for (int t = 0; t < k; ++t) {
        if (t < amp_label_bits) {
            // amplitude label bit: dimension t/2, bit (a1 first)
            std::size_t dim = static_cast<std::size_t>(t) / 2;
            int which = t % 2;  // 0 -> a1, 1 -> a0
            channel[pos++] = dim_bit_llrs[dim * 3 + 1 + which];
        } else {
            channel[pos++] = dim_bit_llrs[sign_dim++ * 3 + 0];
        }
        if (t % f.codec.parity_keep_period == 0)
            channel[pos++] = dim_bit_llrs[sign_dim++ * 3 + 0];
    }
    for (int t = 0; t < 4; ++t) channel[pos++] = dim_bit_llrs[sign_dim++ * 3 + 0];
    if (sign_dim != dims)
        throw SimError(SimError::Kind::configuration, "pas_decode: sign budget mismatch");

    auto dec = fec_bcjr_decode(channel, {}, f.codec);

    PasDecodeResult res;
    res.fec_info = dec.info_bits;
    res.info_bits.assign(f.info_bits_per_frame, 0);

    // amplitudes from the decoded labels, dematch block by block
    std::vector<std::uint8_t> amp_idx(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        std::uint8_t g = static_cast<std::uint8_t>((dec.info_bits[2 * d] << 1) | dec.info_bits[2 * d + 1]);
        amp_idx[d] = static_cast<std::uint8_t>(amp_index_of_gray(g));
    }
    std::size_t off = 0;
    for (int b = 0; b < f.n_blocks; ++b) {
        std::vector<std::uint8_t> block(amp_idx.begin() + b * f.spec.block_len,
                                        amp_idx.begin() + (b + 1) * f.spec.block_len);
        try {
            auto bits = ccdm_dematch(block, f.spec.composition);
            std::copy(bits.begin(), bits.end(), res.info_bits.begin() + off);
        } catch (const SimError&) {
            res.failed_blocks++;  // block error; bits stay zero-filled
        }
        off += f.ccdm_bits_per_block;
    }
    // leftover info bits rode as systematic sign bits
    std::copy(dec.info_bits.begin() + amp_label_bits, dec.info_bits.end(),
              res.info_bits.begin() + off);
    return res;
}

}  // namespace linksim
