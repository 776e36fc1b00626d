#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/demapper.hpp"
#include "linksim/fec.hpp"
#include "linksim/pas.hpp"
#include "linksim/rng.hpp"
#include "linksim/shaping.hpp"

using namespace linksim;

namespace {

dvec bits_to_llrs(const std::vector<std::uint8_t>& bits, double mag) {
    dvec l(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) l[i] = bits[i] ? -mag : mag;
    return l;
}

}  // namespace

TEST_CASE("fec_encode: all-zero input gives the all-zero codeword") {
    FecCodec c;
    c.info_len = 99;
    std::vector<std::uint8_t> zeros(99, 0);
    auto coded = fec_encode(zeros, c);
    CHECK(static_cast<int>(coded.size()) == c.coded_len());
    for (auto b : coded) CHECK(b == 0);
}

TEST_CASE("fec_encode rate arithmetic") {
    for (int k : {3, 99, 100, 101, 131073}) {
        FecCodec c;
        c.info_len = k;
        CHECK(c.coded_len() == k + (k + 2) / 3 + 4);
    }
}

TEST_CASE("fec decode inverts encode over a noiseless channel") {
    FecCodec c;
    c.info_len = 600;
    Rng rng(5);
    auto info = rng.bits(c.info_len);
    auto coded = fec_encode(info, c);
    auto res = fec_bcjr_decode(bits_to_llrs(coded, 8.0), {}, c);
    CHECK(res.info_bits == info);
}

TEST_CASE("fec corrects a single flipped coded bit") {
    FecCodec c;
    c.info_len = 300;
    Rng rng(6);
    auto info = rng.bits(c.info_len);
    auto coded = fec_encode(info, c);
    for (std::size_t flip : {0ul, 57ul, 200ul, coded.size() - 1}) {
        auto llrs = bits_to_llrs(coded, 6.0);
        llrs[flip] = -llrs[flip];
        auto res = fec_bcjr_decode(llrs, {}, c);
        CHECK(res.info_bits == info);
    }
}

TEST_CASE("extrinsic of punctured parity positions is finite and code-driven") {
    FecCodec c;
    c.info_len = 90;
    Rng rng(7);
    auto info = rng.bits(c.info_len);
    auto coded = fec_encode(info, c);
    auto res = fec_bcjr_decode(bits_to_llrs(coded, 5.0), {}, c);
    // mother-domain parity entries at punctured steps (t % 3 != 0)
    int checked = 0;
    for (int t = 0; t < c.info_len; ++t) {
        if (t % 3 == 0) continue;
        double e = res.extrinsic_mother[c.info_len + 2 + t];
        CHECK(std::isfinite(e));
        CHECK(std::abs(e) <= kLlrClamp);
        if (std::abs(e) > 0.5) ++checked;
    }
    CHECK(checked > 0);  // constraints do produce information
}

TEST_CASE("extrinsic stays within the clamp under contradictory inputs") {
    FecCodec c;
    c.info_len = 60;
    Rng rng(8);
    auto info = rng.bits(c.info_len);
    auto coded = fec_encode(info, c);
    auto llrs = bits_to_llrs(coded, 40.0);  // over-confident
    for (std::size_t i = 0; i < llrs.size(); i += 7) llrs[i] = -llrs[i];
    auto res = fec_bcjr_decode(llrs, {}, c);
    for (double e : res.extrinsic) CHECK(std::abs(e) <= kLlrClamp + 1e-12);
}

TEST_CASE("interleaver is a bijection and decode sees through it") {
    auto pi = make_interleaver(977, 0x5eed);
    std::vector<bool> hit(977, false);
    for (auto v : pi) {
        CHECK(!hit[v]);
        hit[v] = true;
    }
}

TEST_CASE("pas framing closes the sign-bit budget exactly") {
    auto spec = with_composition(solve_mb({1, 3, 5, 7}, 5.0), 96);
    auto f = plan_pas_frame(spec, 10);
    CHECK(f.amps_per_frame == 960);
    CHECK(f.sign_info_bits + f.codec.kept_parity() + 4 == 960);
    CHECK(f.codec.info_len == 2 * 960 + f.sign_info_bits);
    // info rate per 2-D symbol approaches H - (1-R)*m = 5 - 0.25*6 = 3.5
    double rate = static_cast<double>(f.info_bits_per_frame) / f.symbols_2d();
    CHECK(rate > 3.2);
    CHECK(rate < 3.5);
}

TEST_CASE("pas_encode produces the exact per-dimension amplitude histogram") {
    auto spec = with_composition(solve_mb({1, 3, 5, 7}, 5.0), 96);
    auto f = plan_pas_frame(spec, 4);
    Rng rng(11);
    auto info = rng.bits(f.info_bits_per_frame);
    auto enc = pas_encode(info, f);
    std::vector<int> hist(4, 0);
    for (auto a : enc.amp_indices) hist[a]++;
    std::vector<int> expect = f.spec.composition;
    for (auto& v : expect) v *= f.n_blocks;
    CHECK(hist == expect);
    CHECK(enc.symbol_indices.size() == static_cast<std::size_t>(f.symbols_2d()));
}

TEST_CASE("pas zero-information frame is all minimum amplitude with zero signs") {
    ShapingSpec degenerate;
    degenerate.amplitude_alphabet = {1, 3, 5, 7};
    degenerate.probabilities = {1.0, 0.0, 0.0, 0.0};
    degenerate.lambda = 0.0;
    degenerate.target_entropy_2d = 2.0;
    degenerate = with_composition(degenerate, 96);
    auto f = plan_pas_frame(degenerate, 2);
    REQUIRE(f.ccdm_bits_per_block == 0);
    std::vector<std::uint8_t> info(f.info_bits_per_frame, 0);
    auto enc = pas_encode(info, f);
    for (auto a : enc.amp_indices) CHECK(a == 0);
    // all-zero systematic input to a linear code: every sign is zero (+)
    auto c = pas_constellation(f);
    for (auto idx : enc.symbol_indices) {
        CHECK(c.points[idx].real() > 0);
        CHECK(c.points[idx].imag() > 0);
    }
}

TEST_CASE("pas noiseless roundtrip and entropy accounting") {
    auto spec = with_composition(solve_mb({1, 3, 5, 7}, 5.0), 96);
    auto f = plan_pas_frame(spec, 6);
    auto c = pas_constellation(f);
    Rng rng(12);
    auto info = rng.bits(f.info_bits_per_frame);
    auto enc = pas_encode(info, f);

    // ideal demapper input: exact symbols at moderate noise variance
    dvec dim_llrs;
    dim_llrs.reserve(f.amps_per_frame * 3);
    dvec samples_i(f.symbols_2d()), samples_q(f.symbols_2d());
    for (int k = 0; k < f.symbols_2d(); ++k) {
        samples_i[k] = c.points[enc.symbol_indices[k]].real();
        samples_q[k] = c.points[enc.symbol_indices[k]].imag();
    }
    auto li = pam_map_llrs(samples_i, c.pam, c.dim_scale, 1e-3);
    auto lq = pam_map_llrs(samples_q, c.pam, c.dim_scale, 1e-3);
    for (int k = 0; k < f.symbols_2d(); ++k) {
        for (int b = 0; b < 3; ++b) dim_llrs.push_back(li[k * 3 + b]);
        for (int b = 0; b < 3; ++b) dim_llrs.push_back(lq[k * 3 + b]);
    }
    auto dec = pas_decode(dim_llrs, f);
    CHECK(dec.failed_blocks == 0);
    CHECK(dec.info_bits == info);

    // bookkeeping identity: frame info = matcher bits + leftover sign bits
    CHECK(f.info_bits_per_frame ==
          static_cast<std::size_t>(f.n_blocks) * f.ccdm_bits_per_block + f.sign_info_bits);
}

TEST_CASE("pas survives a single pre-decoder sign flip") {
    auto spec = with_composition(solve_mb({1, 3, 5, 7}, 5.0), 96);
    auto f = plan_pas_frame(spec, 4);
    auto c = pas_constellation(f);
    Rng rng(13);
    auto info = rng.bits(f.info_bits_per_frame);
    auto enc = pas_encode(info, f);
    dvec dim_llrs(f.amps_per_frame * 3);
    for (int k = 0; k < f.symbols_2d(); ++k) {
        cplx pt = c.points[enc.symbol_indices[k]];
        dvec si = pam_map_llrs({pt.real()}, c.pam, c.dim_scale, 2e-2);
        dvec sq = pam_map_llrs({pt.imag()}, c.pam, c.dim_scale, 2e-2);
        for (int b = 0; b < 3; ++b) {
            dim_llrs[(2 * k) * 3 + b] = si[b];
            dim_llrs[(2 * k + 1) * 3 + b] = sq[b];
        }
    }
    dim_llrs[37 * 3] = -dim_llrs[37 * 3];  // flip one sign-bit observation
    auto dec = pas_decode(dim_llrs, f);
    CHECK(dec.failed_blocks == 0);
    CHECK(dec.info_bits == info);
}
