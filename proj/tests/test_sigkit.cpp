#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/fft.hpp"
#include "linksim/fir.hpp"
#include "linksim/resample.hpp"
#include "linksim/rng.hpp"
#include "linksim/spectrum.hpp"

using namespace linksim;

namespace {

// test-local closed-form RRC evaluator (independent of design_rrc internals)
double rrc_ref(double beta, double t) {
    const double pi = 3.14159265358979323846;
    if (t == 0.0) return 1.0 - beta + 4.0 * beta / pi;
    double den = 1.0 - 16.0 * beta * beta * t * t;
    if (std::abs(den) < 1e-12) {
        double a = pi / (4.0 * beta);
        return beta / std::sqrt(2.0) * ((1 + 2 / pi) * std::sin(a) + (1 - 2 / pi) * std::cos(a));
    }
    return (std::sin(pi * t * (1 - beta)) + 4 * beta * t * std::cos(pi * t * (1 + beta))) /
           (pi * t * den);
}

ComplexFrame shaped_qpsk(std::uint64_t seed, int nsym, int sps, double scale, double rate) {
    Rng rng(seed);
    cvec up(static_cast<std::size_t>(nsym) * sps, cplx(0, 0));
    for (int k = 0; k < nsym; ++k) {
        double re = rng.next_bit() ? 1.0 : -1.0;
        double im = rng.next_bit() ? 1.0 : -1.0;
        up[static_cast<std::size_t>(k) * sps] = cplx(re, im) / std::sqrt(2.0);
    }
    auto rrc = design_rrc(0.1, 32, sps, scale);
    return fir_filter(ComplexFrame(up, rate), rrc);
}

}  // namespace

TEST_CASE("design_rrc center tap is the peak and taps are even-symmetric") {
    auto f = design_rrc(0.1, 32, 4, 1.0);
    REQUIRE(f.taps.size() == 32 * 4 + 1);
    CHECK(f.reference_delay == 64);
    double peak = std::abs(f.taps[f.reference_delay]);
    for (const auto& t : f.taps) CHECK(std::abs(t) <= peak + 1e-15);
    const int n = static_cast<int>(f.taps.size());
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(f.taps[i].real() - f.taps[n - 1 - i].real()) < 1e-12);
}

TEST_CASE("design_rrc bandwidth_scale stretches the time axis") {
    const int span = 32, sps = 4;
    auto scaled = design_rrc(0.1, span, sps, 0.8);
    // oracle: closed form evaluated at 0.8*t, energy-normalized the same way
    const int n = span * sps + 1;
    dvec ref(n);
    double e = 0;
    for (int i = 0; i < n; ++i) {
        double t = (i - span * sps / 2) / static_cast<double>(sps);
        ref[i] = rrc_ref(0.1, 0.8 * t);
        e += ref[i] * ref[i];
    }
    for (int i = 0; i < n; ++i)
        CHECK(scaled.taps[i].real() == doctest::Approx(ref[i] / std::sqrt(e)).epsilon(1e-12));
}

TEST_CASE("design_rrc rejects bad parameters") {
    CHECK_THROWS_AS(design_rrc(1.5, 32, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(design_rrc(0.1, 32, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(design_rrc(0.1, 32, 4, 1.2), std::invalid_argument);
}

TEST_CASE("matched RRC cascade has no ISI at symbol-spaced instants") {
    const int sps = 4;
    auto f = design_rrc(0.1, 64, sps, 1.0);
    cvec h2 = fft_convolve(f.taps, f.taps);
    const int center = 2 * f.reference_delay;
    double peak = std::abs(h2[center]);
    for (int k = 1; k <= 20; ++k) {
        CHECK(std::abs(h2[center + k * sps]) < 1e-3 * peak);
        CHECK(std::abs(h2[center - k * sps]) < 1e-3 * peak);
    }
}

TEST_CASE("fir_filter identity, impulse response and hand convolution") {
    ComplexFrame x({cplx(1, 0), cplx(2, 0), cplx(3, 0)}, 1.0);
    auto y = fir_filter(x, FirFilter(dvec{1.0}, 0));
    CHECK(y.samples == x.samples);

    ComplexFrame imp(cvec(8, cplx(0, 0)), 1.0);
    imp.samples[0] = cplx(1, 0);
    FirFilter h(dvec{0.5, -0.25, 0.125}, 0);
    auto hy = fir_filter(imp, h);
    for (int i = 0; i < 3; ++i) CHECK(hy.samples[i] == h.taps[i]);

    auto z = fir_filter(x, FirFilter(dvec{1.0, 1.0}, 0));
    CHECK(z.samples[0].real() == doctest::Approx(1.0));
    CHECK(z.samples[1].real() == doctest::Approx(3.0));
    CHECK(z.samples[2].real() == doctest::Approx(5.0));
}

TEST_CASE("fir_filter is linear") {
    Rng rng(7);
    cvec x(200), y(200);
    for (auto& v : x) v = cplx(rng.next_gaussian(), rng.next_gaussian());
    for (auto& v : y) v = cplx(rng.next_gaussian(), rng.next_gaussian());
    FirFilter h(dvec{0.3, -0.7, 0.2, 0.05}, 1);
    const cplx a(1.3, -0.4), b(-0.2, 0.9);

    cvec mix(200);
    for (int i = 0; i < 200; ++i) mix[i] = a * x[i] + b * y[i];
    auto fm = fir_apply(mix, h);
    auto fx = fir_apply(x, h);
    auto fy = fir_apply(y, h);
    for (int i = 0; i < 200; ++i)
        CHECK(std::abs(fm[i] - (a * fx[i] + b * fy[i])) < 1e-12);
}

TEST_CASE("resample identity and rational guard") {
    auto f = shaped_qpsk(1, 256, 4, 1.0, 1e6);
    auto same = resample(f, 1e6);
    CHECK(rms_error(same.samples, f.samples) == 0.0);
    CHECK_THROWS_AS(resample(f, 1e6 * 1.0000013), SimError);
}

TEST_CASE("resample 2x up then down returns the original") {
    // exactly band-limited input: tones below 0.3 of the rate
    Rng rng(2);
    const int n = 8192;
    cvec x(n, cplx(0, 0));
    for (int t = 0; t < 8; ++t) {
        double f0 = -0.3 + 0.6 * rng.next_double();
        double ph0 = 6.283185307179586 * rng.next_double();
        for (int i = 0; i < n; ++i) {
            double ph = 6.283185307179586 * f0 * i + ph0;
            x[i] += cplx(std::cos(ph), std::sin(ph));
        }
    }
    ComplexFrame f(x, 1e9);
    auto up = resample(f, 2e9);
    auto back = resample(up, 1e9);
    REQUIRE(back.samples.size() >= f.samples.size());
    // interior: skip the filter edge transients
    const int skip = 600;
    double err = 0.0, ref = 0.0;
    int m = 0;
    for (int i = skip; i < n - skip; ++i) {
        err += std::norm(back.samples[i] - f.samples[i]);
        ref += std::norm(f.samples[i]);
        ++m;
    }
    CHECK(std::sqrt(err / m) / std::sqrt(ref / m) < 1e-6);
}

TEST_CASE("resample preserves a tone through 64 -> 80 GHz") {
    const double fs = 64e9, f0 = 0.1 * fs;
    const int n = 1 << 16;
    cvec x(n);
    for (int i = 0; i < n; ++i) {
        double ph = 2.0 * 3.14159265358979323846 * f0 * i / fs;
        x[i] = cplx(std::cos(ph), std::sin(ph));
    }
    auto y = resample(ComplexFrame(x, fs), 80e9);
    CHECK(y.sample_rate == doctest::Approx(80e9));

    // correlate against the expected tone over the interior
    const int skip = 4000;
    cplx acc(0, 0);
    int m = 0;
    for (int i = skip; i < static_cast<int>(y.samples.size()) - skip; ++i) {
        double ph = 2.0 * 3.14159265358979323846 * f0 * i / 80e9;
        acc += y.samples[i] * cplx(std::cos(ph), -std::sin(ph));
        ++m;
    }
    CHECK(std::abs(acc) / m == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("resample conserves in-band power") {
    auto f = shaped_qpsk(3, 4096, 4, 1.0, 1e9);
    auto up = resample(f, 1.25e9);
    const int skip_in = 400, skip_out = 500;
    double pin = 0, pout = 0;
    int ni = 0, no = 0;
    for (int i = skip_in; i < static_cast<int>(f.samples.size()) - skip_in; ++i, ++ni)
        pin += std::norm(f.samples[i]);
    for (int i = skip_out; i < static_cast<int>(up.samples.size()) - skip_out; ++i, ++no)
        pout += std::norm(up.samples[i]);
    CHECK(pout / no == doctest::Approx(pin / ni).epsilon(0.01));
}

TEST_CASE("occupied_bandwidth of a tone is at most two bins") {
    const double fs = 1e9;
    const int n = 1 << 14;
    cvec x(n);
    for (int i = 0; i < n; ++i) {
        double ph = 2.0 * 3.14159265358979323846 * 0.123 * i;
        x[i] = cplx(std::cos(ph), std::sin(ph));
    }
    auto spec = welch_psd(ComplexFrame(x, fs));
    CHECK(occupied_bandwidth(spec, 0.9) <= 2.0 * spec.bin_hz);
}

TEST_CASE("occupied_bandwidth of white noise approaches the full rate") {
    Rng rng(11);
    const double fs = 1e9;
    cvec x(1 << 16);
    for (auto& v : x) v = cplx(rng.next_gaussian(), rng.next_gaussian());
    double bw = occupied_bandwidth(ComplexFrame(x, fs), 0.99);
    CHECK(bw == doctest::Approx(0.99 * fs).epsilon(0.02));
}

TEST_CASE("occupied_bandwidth is monotonic in the power fraction") {
    auto f = shaped_qpsk(5, 8192, 4, 0.8, 1e9);
    auto spec = welch_psd(f);
    double prev = 0.0;
    for (double frac : {0.5, 0.8, 0.9, 0.95, 0.99}) {
        double bw = occupied_bandwidth(spec, frac);
        CHECK(bw >= prev);
        prev = bw;
    }
}

TEST_CASE("occupied_bandwidth ratio tracks the FTN compression factor") {
    auto a = shaped_qpsk(6, 16384, 4, 0.8, 1e9);
    auto b = shaped_qpsk(6, 16384, 4, 1.0, 1e9);
    double ratio = occupied_bandwidth(a, 0.99) / occupied_bandwidth(b, 0.99);
    CHECK(ratio == doctest::Approx(0.8).epsilon(0.04));
}

TEST_CASE("occupied_bandwidth rejects short frames") {
    cvec x(512, cplx(1, 0));
    CHECK_THROWS_AS(occupied_bandwidth(ComplexFrame(x, 1e6), 0.99), SimError);
}

TEST_CASE("fft round trip and known transform") {
    Rng rng(13);
    cvec x(1000);  // non power of two exercises bluestein
    for (auto& v : x) v = cplx(rng.next_gaussian(), rng.next_gaussian());
    auto X = fft(x);
    auto back = ifft(X);
    CHECK(rms_error(back, x) < 1e-10);

    // delta -> flat spectrum
    cvec d(64, cplx(0, 0));
    d[0] = cplx(1, 0);
    auto D = fft(d);
    for (const auto& v : D) CHECK(std::abs(v - cplx(1, 0)) < 1e-12);
}
