#include "linksim/constellation.hpp"

#include <cmath>

namespace linksim {

std::size_t PamAlphabet::index_of_label(std::uint32_t label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return i;
    throw std::invalid_argument("PamAlphabet: unknown label");
}

std::size_t PamAlphabet::slice(double y) const {
    // levels ascending: nearest by midpoint thresholds
    std::size_t lo = 0, hi = levels.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        double thr = 0.5 * (levels[mid] + levels[mid + 1]);
        if (y <= thr)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

PamAlphabet pam4_gray() {
    PamAlphabet p;
    p.levels = {-3.0, -1.0, 1.0, 3.0};
    p.probs = {0.25, 0.25, 0.25, 0.25};
    p.labels = {0b00, 0b01, 0b11, 0b10};
    p.bits = 2;
    return p;
}

PamAlphabet pam2() {
    PamAlphabet p;
    p.levels = {-1.0, 1.0};
    p.probs = {0.5, 0.5};
    p.labels = {0b1, 0b0};  // 0 -> +1
    p.bits = 1;
    return p;
}

PamAlphabet pam8_shaped(const dvec& amplitudes, const dvec& amp_probs) {
    if (amplitudes.size() != amp_probs.size() || amplitudes.empty())
        throw std::invalid_argument("pam8_shaped: size mismatch");
    const std::size_t na = amplitudes.size();
    // amplitude Gray labels for 4 amplitudes: 1,3,5,7 -> 00,01,11,10
    static const std::uint32_t amp_gray4[4] = {0b00, 0b01, 0b11, 0b10};
    if (na != 4) throw std::invalid_argument("pam8_shaped: 4 amplitudes expected");

    PamAlphabet p;
    p.bits = 3;
    // ascending: -a_max .. -a_min, +a_min .. +a_max; sign bit 1 = negative
    for (std::size_t i = 0; i < na; ++i) {
        std::size_t j = na - 1 - i;
        p.levels.push_back(-amplitudes[j]);
        p.probs.push_back(amp_probs[j] * 0.5);
        p.labels.push_back((1u << 2) | amp_gray4[j]);
    }
    for (std::size_t j = 0; j < na; ++j) {
        p.levels.push_back(amplitudes[j]);
        p.probs.push_back(amp_probs[j] * 0.5);
        p.labels.push_back(amp_gray4[j]);
    }
    return p;
}

Constellation product_constellation(const PamAlphabet& pam) {
    Constellation c;
    c.pam = pam;
    c.bits_per_symbol = 2 * pam.bits;

    double e1d = 0.0;
    for (std::size_t i = 0; i < pam.size(); ++i) e1d += pam.probs[i] * pam.levels[i] * pam.levels[i];
    c.dim_scale = 1.0 / std::sqrt(2.0 * e1d);  // unit mean 2-D energy

    const std::size_t n = pam.size();
    c.points.reserve(n * n);
    c.probabilities.reserve(n * n);
    c.labels.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t q = 0; q < n; ++q) {
            c.points.emplace_back(pam.levels[i] * c.dim_scale, pam.levels[q] * c.dim_scale);
            c.probabilities.push_back(pam.probs[i] * pam.probs[q]);
            c.labels.push_back((pam.labels[i] << pam.bits) | pam.labels[q]);
        }
    }
    return c;
}

Constellation make_qpsk() { return product_constellation(pam2()); }
Constellation make_qam16() { return product_constellation(pam4_gray()); }
Constellation make_pcs64(const dvec& amplitudes, const dvec& amp_probs) {
    return product_constellation(pam8_shaped(amplitudes, amp_probs));
}

cvec qam_map(const std::vector<std::uint8_t>& bits, const Constellation& c) {
    const int bps = c.bits_per_symbol;
    if (bits.size() % static_cast<std::size_t>(bps) != 0)
        throw std::invalid_argument("qam_map: bit count not divisible by bits per symbol");
    const int db = c.pam.bits;
    cvec out;
    out.reserve(bits.size() / bps);
    for (std::size_t k = 0; k + bps <= bits.size(); k += bps) {
        std::uint32_t li = 0, lq = 0;
        for (int b = 0; b < db; ++b) li = (li << 1) | bits[k + b];
        for (int b = 0; b < db; ++b) lq = (lq << 1) | bits[k + db + b];
        out.push_back(c.point(c.pam.index_of_label(li), c.pam.index_of_label(lq)));
    }
    return out;
}

std::vector<std::uint8_t> qam_hard_bits(const cvec& symbols, const Constellation& c) {
    const int db = c.pam.bits;
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * c.bits_per_symbol);
    for (const auto& s : symbols) {
        std::uint32_t li = c.pam.labels[c.pam.slice(s.real() / c.dim_scale)];
        std::uint32_t lq = c.pam.labels[c.pam.slice(s.imag() / c.dim_scale)];
        for (int b = db - 1; b >= 0; --b) bits.push_back((li >> b) & 1);
        for (int b = db - 1; b >= 0; --b) bits.push_back((lq >> b) & 1);
    }
    return bits;
}

}  // namespace linksim
