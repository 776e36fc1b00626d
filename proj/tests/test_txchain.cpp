#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "linksim/constellation.hpp"
#include "linksim/fir.hpp"
#include "linksim/rng.hpp"
#include "linksim/spectrum.hpp"
#include "linksim/txchain.hpp"

using namespace linksim;

namespace {

std::vector<std::uint8_t> to_bits(std::uint32_t v, int n) {
    std::vector<std::uint8_t> b(n);
    for (int i = 0; i < n; ++i) b[i] = (v >> (n - 1 - i)) & 1;
    return b;
}

cvec random_qam16(std::uint64_t seed, int n) {
    Rng rng(seed);
    auto c = make_qam16();
    return qam_map(rng.bits(4 * n), c);
}

// matched filter + symbol-rate sampling, aligned by the filter delays
cvec receive_nyquist(const ComplexFrame& frame, double rolloff, int sps, double alpha, int nsym) {
    auto mf = design_rrc(rolloff, kPulseSpan, sps, alpha);
    auto filtered = fir_filter(frame, mf);
    cvec out;
    out.reserve(nsym);
    for (int k = 0; k < nsym; ++k) out.push_back(filtered.samples[static_cast<std::size_t>(k) * sps]);
    return out;
}

}  // namespace

TEST_CASE("qam_map corner labels and energy normalization") {
    auto c = make_qam16();
    auto s = qam_map(to_bits(0b0000, 4), c);
    CHECK(s[0].real() == doctest::Approx(-3.0 / std::sqrt(10.0)));
    CHECK(s[0].imag() == doctest::Approx(-3.0 / std::sqrt(10.0)));

    // all 16 labels: distinct points, unit mean energy
    std::vector<std::uint8_t> bits;
    for (std::uint32_t v = 0; v < 16; ++v) {
        auto b = to_bits(v, 4);
        bits.insert(bits.end(), b.begin(), b.end());
    }
    auto pts = qam_map(bits, c);
    std::set<std::pair<double, double>> uniq;
    double e = 0;
    for (auto p : pts) {
        uniq.insert({p.real(), p.imag()});
        e += std::norm(p);
    }
    CHECK(uniq.size() == 16);
    CHECK(e / 16.0 == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(qam_map(to_bits(0, 3), c), std::invalid_argument);
}

TEST_CASE("gray PAM4: adjacent levels differ in exactly one bit") {
    auto p = pam4_gray();
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        std::uint32_t x = p.labels[i] ^ p.labels[i + 1];
        CHECK(__builtin_popcount(x) == 1);
    }
    // pinned map: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    CHECK(p.levels[p.index_of_label(0b00)] == -3.0);
    CHECK(p.levels[p.index_of_label(0b01)] == -1.0);
    CHECK(p.levels[p.index_of_label(0b11)] == 1.0);
    CHECK(p.levels[p.index_of_label(0b10)] == 3.0);
}

TEST_CASE("hard bits invert qam_map") {
    Rng rng(20);
    auto c = make_qam16();
    auto bits = rng.bits(4 * 500);
    auto syms = qam_map(bits, c);
    CHECK(qam_hard_bits(syms, c) == bits);
}

TEST_CASE("ftn_shape at alpha=1 is an identity channel after matched filtering") {
    const int n = 4096, sps = 4;
    auto syms = random_qam16(21, n);
    auto frame = ftn_shape(syms, 1.0, 0.1, sps, 45e9);
    CHECK(frame.sample_rate == doctest::Approx(180e9));
    CHECK(mean_power(frame) == doctest::Approx(1.0).epsilon(1e-6));

    auto rx = receive_nyquist(frame, 0.1, sps, 1.0, n);
    // the cascade is unit-energy^2; rescale by the measured gain
    cplx g(0, 0);
    double e = 0;
    for (int k = 200; k < n - 200; ++k) {
        g += rx[k] * std::conj(syms[k]);
        e += std::norm(syms[k]);
    }
    g /= e;
    double err = 0;
    int m = 0;
    for (int k = 200; k < n - 200; ++k, ++m) err += std::norm(rx[k] / g - syms[k]);
    CHECK(std::sqrt(err / m) < 1e-3);
}

TEST_CASE("ftn_shape at alpha=0.8 has deliberate ISI") {
    const int n = 4096, sps = 4;
    auto syms = random_qam16(22, n);
    auto frame = ftn_shape(syms, 0.8, 0.1, sps, 45e9);
    auto rx = receive_nyquist(frame, 0.1, sps, 0.8, n);
    cplx g(0, 0);
    double e = 0;
    for (int k = 200; k < n - 200; ++k) {
        g += rx[k] * std::conj(syms[k]);
        e += std::norm(syms[k]);
    }
    g /= e;
    double err = 0, ref = 0;
    for (int k = 200; k < n - 200; ++k) {
        err += std::norm(rx[k] / g - syms[k]);
        ref += std::norm(syms[k]);
    }
    CHECK(std::sqrt(err / ref) > 0.05);
}

TEST_CASE("45 Gbaud alpha=0.8 occupies the band of 36 Gbaud Nyquist") {
    const int n = 16384;
    auto a = ftn_shape(random_qam16(23, n), 0.8, 0.1, 4, 45e9);
    auto b = ftn_shape(random_qam16(24, n), 1.0, 0.1, 4, 36e9);
    double bwa = occupied_bandwidth(a, 0.99);
    double bwb = occupied_bandwidth(b, 0.99);
    CHECK(bwa / bwb == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("insert_pilot_tone adds the requested tone power") {
    const int n = 8192;
    auto frame = ftn_shape(random_qam16(25, n), 0.8, 0.1, 4, 45e9);
    FrameLayout layout;
    layout.pilot_tone_freq = 0.55 * 45e9 * 1.1 * 0.8;  // outside the 99% band
    layout.pilot_tone_power_ratio_db = -10.0;
    auto with = insert_pilot_tone(frame, layout);
    CHECK(with.samples.size() == frame.samples.size());

    // correlate out the tone amplitude
    cplx acc(0, 0);
    for (std::size_t i = 0; i < with.samples.size(); ++i) {
        double ph = 2 * 3.14159265358979 * layout.pilot_tone_freq * i / with.sample_rate;
        acc += with.samples[i] * cplx(std::cos(ph), -std::sin(ph));
    }
    double tone_power = std::norm(acc / static_cast<double>(with.samples.size()));
    CHECK(tone_power == doctest::Approx(0.1 * mean_power(frame)).epsilon(0.02));
}

TEST_CASE("insert_pilot_tone sentinel and in-band rejection") {
    auto frame = ftn_shape(random_qam16(26, 4096), 0.8, 0.1, 4, 45e9);
    FrameLayout layout;
    layout.pilot_tone_freq = 20e9;
    layout.pilot_tone_power_ratio_db = -std::numeric_limits<double>::infinity();
    auto same = insert_pilot_tone(frame, layout);
    CHECK(same.samples == frame.samples);

    layout.pilot_tone_power_ratio_db = -12.0;
    layout.pilot_tone_freq = 5e9;  // well inside the signal band
    CHECK_THROWS_AS(insert_pilot_tone(frame, layout), SimError);
}

TEST_CASE("build_frame is deterministic with a clean autocorrelation") {
    FrameLayout layout;
    layout.preamble_len = 256;
    cvec payload(100, cplx(1, 0));
    layout.payload_len = 100;
    auto f1 = build_frame(payload, layout, 77);
    auto f2 = build_frame(payload, layout, 77);
    CHECK(f1.symbols == f2.symbols);
    CHECK(f1.symbols.size() == 356);

    auto f3 = build_frame(payload, layout, 78);
    CHECK(f3.preamble != f1.preamble);

    // aperiodic autocorrelation peak-to-sidelobe at length 256
    const auto& p = f1.preamble;
    double peak = 0;
    for (auto v : p) peak += std::norm(v);
    double worst = 0;
    for (int lag = 1; lag < 200; ++lag) {
        cplx acc(0, 0);
        for (std::size_t i = 0; i + lag < p.size(); ++i) acc += p[i + lag] * std::conj(p[i]);
        worst = std::max(worst, std::abs(acc));
    }
    CHECK(peak / worst >= 4.0);
}
