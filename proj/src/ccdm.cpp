#include "linksim/ccdm.hpp"

#include <numeric>

#include "linksim/bigint.hpp"

namespace linksim {

namespace {

// multinomial(n; counts) built from binomial factors with exact small-word
// multiply/divide steps (each partial quotient is an integer)
BigUint multinomial(const std::vector<int>& counts) {
    BigUint m(1);
    int placed = 0;
    for (int c : counts) {
        for (int i = 1; i <= c; ++i) {
            ++placed;
            m.mul_small(static_cast<std::uint64_t>(placed));
            m.div_small(static_cast<std::uint64_t>(i));
        }
    }
    return m;
}

void check_composition(const std::vector<int>& composition) {
    if (composition.empty()) throw std::invalid_argument("ccdm: empty composition");
    for (int c : composition)
        if (c < 0) throw std::invalid_argument("ccdm: negative count");
}

}  // namespace

std::size_t ccdm_bits(const std::vector<int>& composition) {
    check_composition(composition);
    BigUint m = multinomial(composition);
    std::size_t bl = m.bit_length();
    return bl == 0 ? 0 : bl - 1;  // floor(log2(m)); m >= 1
}

std::vector<std::uint8_t> ccdm_match(const std::vector<std::uint8_t>& info_bits,
                                     const std::vector<int>& composition) {
    check_composition(composition);
    const std::size_t k = ccdm_bits(composition);
    if (info_bits.size() != k)
        throw SimError(SimError::Kind::parameter, "ccdm_match: wrong input length");

    // index in [0, 2^k) from MSB-first bits
    BigUint index(0);
    for (std::size_t i = 0; i < k; ++i)
        if (info_bits[i]) index.set_bit(k - 1 - i);

    std::vector<int> remaining = composition;
    int total = std::accumulate(remaining.begin(), remaining.end(), 0);
    BigUint count = multinomial(remaining);  // sequences with the remaining composition

    const int block_len = total;
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(block_len));
    for (int pos = 0; pos < block_len; ++pos) {
        // interval subdivision: symbol a owns count * n_a / n_total sequences
        for (std::size_t a = 0; a < remaining.size(); ++a) {
            if (remaining[a] == 0) continue;
            BigUint sub = count;
            sub.mul_small(static_cast<std::uint64_t>(remaining[a]));
            sub.div_small(static_cast<std::uint64_t>(total));
            if (index < sub) {
                out.push_back(static_cast<std::uint8_t>(a));
                count = sub;
                remaining[a]--;
                total--;
                break;
            }
            index.sub(sub);
        }
    }
    return out;
}

std::vector<std::uint8_t> ccdm_dematch(const std::vector<std::uint8_t>& indices,
                                       const std::vector<int>& composition) {
    check_composition(composition);
    std::vector<int> observed(composition.size(), 0);
    for (auto idx : indices) {
        if (idx >= composition.size())
            throw SimError(SimError::Kind::decode_failed, "ccdm_dematch: symbol out of alphabet");
        observed[idx]++;
    }
    for (std::size_t a = 0; a < composition.size(); ++a)
        if (observed[a] != composition[a])
            throw SimError(SimError::Kind::decode_failed, "ccdm_dematch: composition mismatch");

    const std::size_t k = ccdm_bits(composition);
    std::vector<int> remaining = composition;
    int total = static_cast<int>(indices.size());
    BigUint count = multinomial(remaining);
    BigUint index(0);

    for (auto sym : indices) {
        for (std::size_t a = 0; a < static_cast<std::size_t>(sym); ++a) {
            if (remaining[a] == 0) continue;
            BigUint sub = count;
            sub.mul_small(static_cast<std::uint64_t>(remaining[a]));
            sub.div_small(static_cast<std::uint64_t>(total));
            index.add(sub);
        }
        BigUint own = count;
        own.mul_small(static_cast<std::uint64_t>(remaining[sym]));
        own.div_small(static_cast<std::uint64_t>(total));
        count = own;
        remaining[sym]--;
        total--;
    }

    std::vector<std::uint8_t> bits(k, 0);
    for (std::size_t i = 0; i < k; ++i) bits[i] = index.bit(k - 1 - i) ? 1 : 0;
    return bits;
}

}  // namespace linksim
