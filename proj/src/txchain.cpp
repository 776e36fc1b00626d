#include "linksim/txchain.hpp"

#include <cmath>

#include "linksim/fir.hpp"
#include "linksim/rng.hpp"
#include "linksim/spectrum.hpp"

namespace linksim {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

ComplexFrame ftn_shape(const cvec& symbols, double alpha, double rolloff, int sps, double baud) {
    if (symbols.empty()) throw std::invalid_argument("ftn_shape: no symbols");
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("ftn_shape: alpha in (0,1] required");
    if (alpha < 1.0 && sps < 4) throw std::invalid_argument("ftn_shape: sps >= 4 required for alpha < 1");

    cvec up(symbols.size() * static_cast<std::size_t>(sps), cplx(0, 0));
    for (std::size_t k = 0; k < symbols.size(); ++k) up[k * sps] = symbols[k];

    auto pulse = design_rrc(rolloff, kPulseSpan, sps, alpha);
    ComplexFrame out = fir_filter(ComplexFrame(std::move(up), baud * sps), pulse);
    normalize_power(out);
    return out;
}

ComplexFrame insert_pilot_tone(const ComplexFrame& frame, const FrameLayout& layout) {
    if (!std::isfinite(layout.pilot_tone_power_ratio_db) || layout.pilot_tone_power_ratio_db < -200.0)
        return frame;  // disabled

    const double fs = frame.sample_rate;
    const double fp = layout.pilot_tone_freq;
    if (std::abs(fp) >= fs / 2.0)
        throw SimError(SimError::Kind::configuration, "insert_pilot_tone: pilot outside first Nyquist zone");
    const double bw99 = occupied_bandwidth(frame, 0.99);
    if (std::abs(fp) <= bw99 / 2.0)
        throw SimError(SimError::Kind::configuration, "insert_pilot_tone: pilot inside signal band");

    const double psig = mean_power(frame);
    const double amp = std::sqrt(psig * std::pow(10.0, layout.pilot_tone_power_ratio_db / 10.0));

    ComplexFrame out = frame;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        double ph = 2.0 * kPi * fp * static_cast<double>(i) / fs;
        out.samples[i] += amp * cplx(std::cos(ph), std::sin(ph));
    }
    return out;
}

BuiltFrame build_frame(const cvec& payload_symbols, const FrameLayout& layout, std::uint64_t seed) {
    layout.validate();
    if (layout.payload_len != 0 &&
        layout.payload_len != static_cast<int>(payload_symbols.size()))
        throw std::invalid_argument("build_frame: payload length does not match layout");

    Rng rng(derive_seed(seed, 0xbeef));
    BuiltFrame out;
    out.preamble.reserve(layout.preamble_len);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < layout.preamble_len; ++i) {
        double re = rng.next_bit() ? inv_sqrt2 : -inv_sqrt2;
        double im = rng.next_bit() ? inv_sqrt2 : -inv_sqrt2;
        out.preamble.emplace_back(re, im);
    }
    out.symbols = out.preamble;
    out.symbols.insert(out.symbols.end(), payload_symbols.begin(), payload_symbols.end());
    return out;
}

}  // namespace linksim
