#include "linksim/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "linksim/ccdm.hpp"
#include "linksim/constellation.hpp"
#include "linksim/demapper.hpp"
#include "linksim/fec.hpp"
#include "linksim/fir.hpp"
#include "linksim/pas.hpp"
#include "linksim/resample.hpp"
#include "linksim/rng.hpp"
#include "linksim/rxfront.hpp"
#include "linksim/shaping.hpp"
#include "linksim/trellis.hpp"
#include "linksim/turbo.hpp"

namespace linksim {

std::string to_string(SignalFormat f) {
    switch (f) {
        case SignalFormat::FTN16QAM: return "FTN16QAM";
        case SignalFormat::PCS64QAM_MB: return "PCS64QAM_MB";
        case SignalFormat::PCS64QAM_IVMB: return "PCS64QAM_IVMB";
    }
    return "?";
}

std::string to_string(ReceiverMode m) {
    switch (m) {
        case ReceiverMode::hard: return "hard";
        case ReceiverMode::fec_oneshot: return "fec_oneshot";
        case ReceiverMode::turbo: return "turbo";
    }
    return "?";
}

SignalFormat format_from_string(const std::string& s) {
    if (s == "FTN16QAM") return SignalFormat::FTN16QAM;
    if (s == "PCS64QAM_MB") return SignalFormat::PCS64QAM_MB;
    if (s == "PCS64QAM_IVMB") return SignalFormat::PCS64QAM_IVMB;
    throw SimError(SimError::Kind::configuration, "unknown format: " + s);
}

ReceiverMode mode_from_string(const std::string& s) {
    if (s == "hard") return ReceiverMode::hard;
    if (s == "fec_oneshot") return ReceiverMode::fec_oneshot;
    if (s == "turbo") return ReceiverMode::turbo;
    throw SimError(SimError::Kind::configuration, "unknown receiver_mode: " + s);
}

void LinkConfig::validate() const {
    if (format == SignalFormat::FTN16QAM) {
        if (alpha >= 1.0) throw SimError(SimError::Kind::configuration, "FTN requires alpha < 1");
        if (entropy_2d != 4.0)
            throw SimError(SimError::Kind::configuration, "FTN16QAM carries 4 bits per 2-D symbol");
    } else {
        if (alpha != 1.0) throw SimError(SimError::Kind::configuration, "PCS runs at alpha = 1");
    }
    if (baud <= 0 || sps < 2) throw SimError(SimError::Kind::configuration, "bad baud/sps");
    if (info_bits < 1000) throw SimError(SimError::Kind::configuration, "info_bits too small");
    if (segments < 1) throw SimError(SimError::Kind::configuration, "segments must be >= 1");
    channel.validate();
}

namespace {

double default_pilot_freq(const LinkConfig& c) {
    return 0.55 * c.baud * (1.0 + c.rolloff) * c.alpha;
}

using nlohmann::json;

json layout_to_json(const FrameLayout& l) {
    return json{{"preamble_len", l.preamble_len},
                {"payload_len", l.payload_len},
                {"pilot_tone_freq", l.pilot_tone_freq},
                {"pilot_tone_power_ratio_db", l.pilot_tone_power_ratio_db}};
}

FrameLayout layout_from_json(const json& j) {
    FrameLayout l;
    l.preamble_len = j.value("preamble_len", 512);
    l.payload_len = j.value("payload_len", 0);
    l.pilot_tone_freq = j.value("pilot_tone_freq", 0.0);
    l.pilot_tone_power_ratio_db = j.value("pilot_tone_power_ratio_db", -12.0);
    return l;
}

json channel_to_json(const ChannelConfig& c) {
    return json{{"snr_db_at_zero_margin", c.snr_db_at_zero_margin},
                {"power_margin_db", c.power_margin_db},
                {"linewidth_hz", c.linewidth_hz},
                {"cfo_hz", c.cfo_hz},
                {"fiber_len_km", c.fiber_len_km},
                {"dispersion_ps_nm_km", c.dispersion_ps_nm_km},
                {"center_wavelength_nm", c.center_wavelength_nm},
                {"noise_free", c.noise_free},
                {"seed", c.seed}};
}

ChannelConfig channel_from_json(const json& j) {
    ChannelConfig c;
    c.snr_db_at_zero_margin = j.value("snr_db_at_zero_margin", 15.0);
    c.power_margin_db = j.value("power_margin_db", 0.0);
    c.linewidth_hz = j.value("linewidth_hz", 200e3);
    c.cfo_hz = j.value("cfo_hz", 0.0);
    c.fiber_len_km = j.value("fiber_len_km", 0.0);
    c.dispersion_ps_nm_km = j.value("dispersion_ps_nm_km", 17.0);
    c.center_wavelength_nm = j.value("center_wavelength_nm", 1550.0);
    c.noise_free = j.value("noise_free", false);
    c.seed = j.value("seed", std::uint64_t{1});
    return c;
}

}  // namespace

std::string LinkConfig::to_json() const {
    json j;
    j["format"] = to_string(format);
    j["baud"] = baud;
    j["alpha"] = alpha;
    j["entropy_2d"] = entropy_2d;
    j["rolloff"] = rolloff;
    j["sps"] = sps;
    j["frame_layout"] = layout_to_json(frame_layout);
    j["channel"] = channel_to_json(channel);
    j["receiver_mode"] = to_string(receiver_mode);
    j["turbo_iterations"] = turbo_iterations;
    j["info_bits"] = info_bits;
    j["segments"] = segments;
    j["awg_rate"] = awg_rate;
    j["adc_rate"] = adc_rate;
    j["foe_window_hz"] = foe_window_hz;
    j["amplitudes"] = amplitudes;
    j["ccdm_block_len"] = ccdm_block_len;
    j["pas_blocks_per_frame"] = pas_blocks_per_frame;
    if (shaping_spec) j["shaping_spec"] = json::parse(shaping_spec->to_json());
    j["equalizer"] = json{{"n_ff", equalizer.n_ff},
                          {"n_fb", equalizer.n_fb},
                          {"mu_ff_train", equalizer.mu_ff_train},
                          {"mu_ff_track", equalizer.mu_ff_track},
                          {"mu_fb", equalizer.mu_fb},
                          {"mu_phase", equalizer.mu_phase},
                          {"train_passes", equalizer.train_passes},
                          {"error_gate", equalizer.error_gate}};
    return j.dump(2);
}

LinkConfig LinkConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    LinkConfig c;
    c.format = format_from_string(j.at("format").get<std::string>());
    c.baud = j.value("baud", c.format == SignalFormat::FTN16QAM ? 45e9 : 36e9);
    c.alpha = j.value("alpha", c.format == SignalFormat::FTN16QAM ? 0.8 : 1.0);
    c.entropy_2d = j.value("entropy_2d", c.format == SignalFormat::FTN16QAM ? 4.0 : 5.0);
    c.rolloff = j.value("rolloff", 0.1);
    c.sps = j.value("sps", 4);
    if (j.contains("frame_layout")) c.frame_layout = layout_from_json(j["frame_layout"]);
    if (j.contains("channel")) c.channel = channel_from_json(j["channel"]);
    c.receiver_mode = mode_from_string(j.value("receiver_mode", std::string{"turbo"}));
    c.turbo_iterations = j.value("turbo_iterations", 4);
    c.info_bits = j.value("info_bits", std::size_t{1u << 17});
    c.segments = j.value("segments", 8);
    c.awg_rate = j.value("awg_rate", 64e9);
    c.adc_rate = j.value("adc_rate", 80e9);
    c.foe_window_hz = j.value("foe_window_hz", 2.5e9);
    c.amplitudes = j.value("amplitudes", dvec{1, 3, 5, 7});
    c.ccdm_block_len = j.value("ccdm_block_len", 96);
    c.pas_blocks_per_frame = j.value("pas_blocks_per_frame", 10);
    if (j.contains("shaping_spec"))
        c.shaping_spec = ShapingSpec::from_json(j["shaping_spec"].dump());
    if (j.contains("equalizer")) {
        const auto& e = j["equalizer"];
        c.equalizer.n_ff = e.value("n_ff", 31);
        c.equalizer.n_fb = e.value("n_fb", 4);
        c.equalizer.mu_ff_train = e.value("mu_ff_train", 1e-3);
        c.equalizer.mu_ff_track = e.value("mu_ff_track", 1e-4);
        c.equalizer.mu_fb = e.value("mu_fb", 2e-5);
        c.equalizer.mu_phase = e.value("mu_phase", 2e-2);
        c.equalizer.train_passes = e.value("train_passes", 24);
        c.equalizer.error_gate = e.value("error_gate", 4.0);
    }
    return c;
}

LinkConfig LinkConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError(SimError::Kind::configuration, "cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string LinkConfig::digest() const {
    // FNV-1a over the canonical JSON text
    std::uint64_t h = 1469598103934665603ULL;
    for (char ch : to_json()) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---- transmit-side planning ------------------------------------------------

namespace {

constexpr int kGuardSyms = 2;   // known symbols framing each FTN codeword
constexpr int kTailFiller = 96; // filler symbols behind the last payload:
                                // pulse tails and the circular CD wrap land here

struct PcsPlan {
    ShapingSpec spec;
    PasFraming framing;
};

PcsPlan plan_pcs(const LinkConfig& cfg) {
    PcsPlan p;
    if (cfg.shaping_spec) {
        p.spec = *cfg.shaping_spec;
        if (p.spec.composition.empty() || p.spec.block_len == 0)
            p.spec = with_composition(p.spec, cfg.ccdm_block_len);
    } else {
        auto solve = cfg.format == SignalFormat::PCS64QAM_IVMB ? solve_ivmb : solve_mb;
        p.spec = with_composition(solve(cfg.amplitudes, cfg.entropy_2d), cfg.ccdm_block_len);
    }
    p.framing = plan_pas_frame(p.spec, cfg.pas_blocks_per_frame);
    return p;
}

// one burst: preamble + [guards|codeword|guards] (FTN) or PAS frames (PCS)
struct Segment {
    std::size_t pre_start = 0;   // symbol index in the frame
    std::size_t pay_start = 0;
    std::size_t pay_len = 0;
    std::size_t info_off = 0;    // into the trial's info bit stream
    std::size_t info_len = 0;
    cvec preamble;
    FecCodec codec;              // FTN codeword of this segment
    int pas_frames = 0;          // PCS frames in this segment
};

struct TxAssembly {
    std::vector<Segment> segments;
    cvec all_symbols;                       // everything before pulse shaping
    cvec payload_symbols;                   // concatenated segment payloads
    std::vector<std::uint8_t> info_bits;
    std::vector<std::uint8_t> mapped_bits;  // label bits of the data symbols
    ComplexFrame waveform;                  // at awg_rate, pilot included
    FrameLayout layout;
    int guard_level = 3;                    // PAM4 level index for FTN guards
};

TxAssembly assemble_tx(const LinkConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    TxAssembly tx;
    tx.layout = cfg.frame_layout;
    if (tx.layout.pilot_tone_freq == 0.0) tx.layout.pilot_tone_freq = default_pilot_freq(cfg);

    Rng bitsrc(derive_seed(seed, 1));
    const bool ftn = cfg.format == SignalFormat::FTN16QAM;

    // per-segment capacity
    FecCodec seg_codec;
    PcsPlan pcs;
    int pas_frames_per_seg = 0, pas_frames_total = 0;
    if (ftn) {
        std::size_t k = (cfg.info_bits + cfg.segments - 1) / cfg.segments;
        while ((k + (k + 2) / 3 + 4) % 4 != 0) ++k;  // whole 16QAM symbols
        seg_codec.info_len = static_cast<int>(k);
        seg_codec.interleave = true;
    } else {
        pcs = plan_pcs(cfg);
        pas_frames_total = static_cast<int>((cfg.info_bits + pcs.framing.info_bits_per_frame - 1) /
                                            pcs.framing.info_bits_per_frame);
        pas_frames_per_seg = (pas_frames_total + cfg.segments - 1) / cfg.segments;
    }

    Constellation cons = ftn ? make_qam16() : pas_constellation(pcs.framing);
    const cplx guard_sym = ftn ? cons.point(tx.guard_level, tx.guard_level) : cplx(0, 0);

    int pas_frames_left = pas_frames_total;
    for (int s = 0; s < cfg.segments; ++s) {
        if (!ftn && pas_frames_left <= 0) break;
        Segment seg;
        seg.pre_start = tx.all_symbols.size();
        seg.info_off = tx.info_bits.size();

        cvec payload;
        if (ftn) {
            seg.codec = seg_codec;
            seg.info_len = seg_codec.info_len;
            auto info = bitsrc.bits(seg.info_len);
            auto coded = fec_encode(info, seg.codec);
            tx.info_bits.insert(tx.info_bits.end(), info.begin(), info.end());
            tx.mapped_bits.insert(tx.mapped_bits.end(), coded.begin(), coded.end());
            payload.reserve(coded.size() / 4 + 2 * kGuardSyms);
            for (int g = 0; g < kGuardSyms; ++g) payload.push_back(guard_sym);
            auto data = qam_map(coded, cons);
            payload.insert(payload.end(), data.begin(), data.end());
            for (int g = 0; g < kGuardSyms; ++g) payload.push_back(guard_sym);
        } else {
            seg.pas_frames = std::min(pas_frames_per_seg, pas_frames_left);
            pas_frames_left -= seg.pas_frames;
            seg.info_len = static_cast<std::size_t>(seg.pas_frames) *
                           pcs.framing.info_bits_per_frame;
            for (int f = 0; f < seg.pas_frames; ++f) {
                auto info = bitsrc.bits(pcs.framing.info_bits_per_frame);
                auto enc = pas_encode(info, pcs.framing);
                tx.info_bits.insert(tx.info_bits.end(), info.begin(), info.end());
                for (auto idx : enc.symbol_indices) {
                    payload.push_back(cons.points[idx]);
                    for (int b = 5; b >= 0; --b)
                        tx.mapped_bits.push_back(static_cast<std::uint8_t>((cons.labels[idx] >> b) & 1));
                }
            }
        }

        FrameLayout seg_layout = tx.layout;
        seg_layout.payload_len = static_cast<int>(payload.size());
        auto built = build_frame(payload, seg_layout, derive_seed(seed, 0x100 + s));
        seg.preamble = built.preamble;
        seg.pay_start = seg.pre_start + seg.preamble.size();
        seg.pay_len = payload.size();

        tx.all_symbols.insert(tx.all_symbols.end(), built.symbols.begin(), built.symbols.end());
        tx.payload_symbols.insert(tx.payload_symbols.end(), payload.begin(), payload.end());
        tx.segments.push_back(std::move(seg));
    }

    tx.layout.payload_len = static_cast<int>(tx.payload_symbols.size());

    // seeded QPSK filler keeps the spectrum shaped past the last payload
    Rng filler(derive_seed(seed, 5));
    cvec shaped_in = tx.all_symbols;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < kTailFiller; ++i)
        shaped_in.emplace_back(filler.next_bit() ? inv_sqrt2 : -inv_sqrt2,
                               filler.next_bit() ? inv_sqrt2 : -inv_sqrt2);

    auto shaped = ftn_shape(shaped_in, cfg.alpha, cfg.rolloff, cfg.sps, cfg.baud);
    auto with_pilot = insert_pilot_tone(shaped, tx.layout);
    tx.waveform = resample(with_pilot, cfg.awg_rate);
    normalize_power(tx.waveform);
    return tx;
}

// ---- receive side ----------------------------------------------------------

struct RxFrontOut {
    cvec rx2;             // 2 samples/symbol, aligned at the first preamble
    double foe_est = 0.0;
};

RxFrontOut rx_frontend(const LinkConfig& cfg, const TxAssembly& tx, const ComplexFrame& channel_out) {
    RxFrontOut out;
    auto adc = resample(channel_out, cfg.adc_rate);

    const bool pilot_on = std::isfinite(tx.layout.pilot_tone_power_ratio_db) &&
                          tx.layout.pilot_tone_power_ratio_db > -200.0;
    if (pilot_on) {
        out.foe_est = estimate_fo_pilot(adc, tx.layout, cfg.foe_window_hz);
        ChannelConfig foe_fix;
        foe_fix.cfo_hz = -out.foe_est;
        adc = apply_cfo(adc, foe_fix);
        adc = remove_pilot_tone(adc, tx.layout.pilot_tone_freq, 150e6);
    }

    ChannelConfig cd = cfg.channel;
    auto eq_in = compensate_cd(adc, cd);

    auto two_sps = resample(eq_in, 2.0 * cfg.baud);
    auto sync = synchronize(two_sps, tx.segments.front().preamble, 2);

    const std::size_t want = 2 * (tx.all_symbols.size() + 8);
    cvec rx2;
    rx2.reserve(want);
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t idx = static_cast<std::size_t>(sync.sample_offset) + i;
        rx2.push_back(idx < two_sps.samples.size() ? two_sps.samples[idx] : cplx(0, 0));
    }
    double g = 0;
    for (int k = 0; k < tx.layout.preamble_len; ++k) g += std::norm(rx2[2 * k]);
    g = std::sqrt(g / tx.layout.preamble_len);
    if (g > 0)
        for (auto& v : rx2) v /= g;
    out.rx2 = std::move(rx2);
    return out;
}

std::size_t count_bit_errors(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t e = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) ++e;
    return e;
}

}  // namespace

ComplexFrame build_tx_waveform(const LinkConfig& config, std::uint64_t seed) {
    return assemble_tx(config, seed).waveform;
}

ShapingSpec solved_shaping(const LinkConfig& config) {
    if (config.format == SignalFormat::FTN16QAM)
        throw SimError(SimError::Kind::configuration, "solved_shaping: FTN carries uniform 16QAM");
    return plan_pcs(config).spec;
}

MetricsRecord run_trial(const LinkConfig& config, double margin_db, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    MetricsRecord rec;
    rec.config_digest = config.digest();
    rec.format = to_string(config.format);
    rec.power_margin_db = margin_db;
    rec.seed = seed;

    try {
        auto tx = assemble_tx(config, seed);

        ChannelConfig ch = config.channel;
        ch.seed = derive_seed(seed, 42);
        ch.baud_hz = config.baud;
        ch.power_margin_db = margin_db;
        auto sig = apply_cd(tx.waveform, ch);
        sig = apply_cfo(sig, ch);
        sig = apply_phase_noise(sig, ch);
        sig = apply_awgn(sig, ch);

        auto front = rx_frontend(config, tx, sig);

        const bool ftn = config.format == SignalFormat::FTN16QAM;
        PrTarget target;
        target.taps = ftn ? dvec{1.0, 1.0} : dvec{1.0};
        PcsPlan pcs;
        if (!ftn) pcs = plan_pcs(config);
        Constellation cons = ftn ? make_qam16() : pas_constellation(pcs.framing);

        std::size_t serr = 0, sym_count = 0;
        double evm_num = 0, evm_den = 0;
        std::size_t pre_err = 0, pre_bits = 0;
        std::size_t post_err = 0, post_bits = 0;
        dvec iter_err;  // error accumulator per turbo iteration

        EqualizerState st = make_equalizer(config.equalizer);
        std::size_t pay_base = 0;    // this segment inside tx.payload_symbols
        std::size_t mapped_off = 0;  // and inside tx.mapped_bits
        const std::size_t bits_per_sym = static_cast<std::size_t>(cons.bits_per_symbol);

        for (const auto& seg : tx.segments) {
            // fresh data-aided anchor per burst, taps warm-started
            st = train(st, front.rx2, seg.preamble, target, seg.pre_start);
            cvec hist(seg.preamble.end() - 8, seg.preamble.end());
            auto eq = equalize(st, front.rx2, seg.pay_start, seg.pay_len, target, cons, hist);

            const std::size_t lo = ftn ? kGuardSyms : 0;
            const std::size_t hi = ftn ? seg.pay_len - kGuardSyms : seg.pay_len;
            const cvec& sent = tx.payload_symbols;

            for (std::size_t k = lo; k < hi; ++k) {
                const cplx want = sent[pay_base + k];
                if (std::abs(eq.decisions[k] - want) > 1e-9) ++serr;
                cplx ref(0, 0);
                for (std::size_t m = 0; m < target.taps.size(); ++m)
                    if (k >= m) ref += target.taps[m] * sent[pay_base + k - m];
                evm_num += std::norm(eq.pr_symbols[k] - ref);
                evm_den += std::norm(ref);
                ++sym_count;
            }

            cvec data_decisions(eq.decisions.begin() + lo, eq.decisions.begin() + hi);
            auto hard = qam_hard_bits(data_decisions, cons);
            const std::size_t n_mapped = (hi - lo) * bits_per_sym;
            for (std::size_t i = 0; i < n_mapped; ++i)
                if (hard[i] != tx.mapped_bits[mapped_off + i]) ++pre_err;
            pre_bits += n_mapped;
            pay_base += seg.pay_len;
            mapped_off += n_mapped;

            if (config.receiver_mode == ReceiverMode::hard) continue;

            std::vector<std::uint8_t> seg_info(tx.info_bits.begin() + seg.info_off,
                                               tx.info_bits.begin() + seg.info_off + seg.info_len);

            if (ftn) {
                cvec pr_body(eq.pr_symbols.begin() + kGuardSyms, eq.pr_symbols.end());
                cvec pr_ref(eq.pr_reference.begin() + kGuardSyms, eq.pr_reference.end());
                auto pf = estimate_post_filter(pr_body, pr_ref, 4000);
                auto h_sd = effective_filter(target, pf.filter);

                cvec filt = fir_apply(eq.pr_symbols, pf.filter);
                dvec si, sq;
                si.reserve(seg.pay_len - kGuardSyms);
                for (std::size_t k = kGuardSyms; k < seg.pay_len; ++k) {
                    si.push_back(filt[k].real());
                    sq.push_back(filt[k].imag());
                }

                dvec levels;
                for (double l : cons.pam.levels) levels.push_back(l * cons.dim_scale);
                TurboConfig tc;
                tc.codec = seg.codec;
                tc.trellis = build_trellis(levels, h_sd);
                tc.pam = cons.pam;
                tc.noise_var_dim = std::max(pf.residual_var / 2.0, 1e-7);
                tc.n_iter =
                    config.receiver_mode == ReceiverMode::turbo ? config.turbo_iterations : 1;
                tc.init_state_i = tc.trellis.state_of({tx.guard_level, tx.guard_level});
                tc.init_state_q = tc.init_state_i;
                tc.final_state_i = tc.init_state_i;
                tc.final_state_q = tc.init_state_i;
                tc.tail_guard_i.assign(kGuardSyms, tx.guard_level);
                tc.tail_guard_q.assign(kGuardSyms, tx.guard_level);

                auto turbo = turbo_equalize(si, sq, tc, &seg_info);
                if (iter_err.size() < turbo.per_iteration_ber.size())
                    iter_err.resize(turbo.per_iteration_ber.size(), 0.0);
                for (std::size_t it = 0; it < turbo.per_iteration_ber.size(); ++it)
                    iter_err[it] += turbo.per_iteration_ber[it] * static_cast<double>(seg.info_len);
                post_err += count_bit_errors(turbo.info_bits, seg_info);
                post_bits += seg.info_len;
            } else {
                const double nv_dim = std::max(st.train_mse / 2.0, 1e-7);
                const int n2d = pcs.framing.symbols_2d();
                std::vector<std::uint8_t> recovered;
                recovered.reserve(seg.info_len);
                for (int f = 0; f < seg.pas_frames; ++f) {
                    dvec samples_i(n2d), samples_q(n2d);
                    for (int k = 0; k < n2d; ++k) {
                        const auto& y = eq.pr_symbols[static_cast<std::size_t>(f) * n2d + k];
                        samples_i[k] = y.real();
                        samples_q[k] = y.imag();
                    }
                    auto li = pam_map_llrs(samples_i, cons.pam, cons.dim_scale, nv_dim);
                    auto lq = pam_map_llrs(samples_q, cons.pam, cons.dim_scale, nv_dim);
                    dvec dim_llrs(static_cast<std::size_t>(pcs.framing.amps_per_frame) * 3);
                    for (int k = 0; k < n2d; ++k)
                        for (int b = 0; b < 3; ++b) {
                            dim_llrs[(2 * k) * 3 + b] = li[k * 3 + b];
                            dim_llrs[(2 * k + 1) * 3 + b] = lq[k * 3 + b];
                        }
                    auto dec = pas_decode(dim_llrs, pcs.framing);
                    recovered.insert(recovered.end(), dec.info_bits.begin(), dec.info_bits.end());
                }
                post_err += count_bit_errors(recovered, seg_info);
                post_bits += seg.info_len;
            }
        }

        rec.ser = sym_count ? static_cast<double>(serr) / static_cast<double>(sym_count) : 0.0;
        rec.evm_percent = evm_den > 0 ? 100.0 * std::sqrt(evm_num / evm_den) : 0.0;
        rec.pre_fec_ber = pre_bits ? static_cast<double>(pre_err) / static_cast<double>(pre_bits) : 0.0;
        if (config.receiver_mode == ReceiverMode::hard) {
            rec.bit_count = pre_bits;
            rec.error_count = pre_err;
        } else {
            rec.bit_count = post_bits;
            rec.error_count = post_err;
            rec.post_fec_ber =
                post_bits ? static_cast<double>(post_err) / static_cast<double>(post_bits) : 0.0;
            for (double e : iter_err)
                rec.iter_ber.push_back(e / static_cast<double>(post_bits));
        }
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.fail_reason = e.what();
        rec.pre_fec_ber = rec.post_fec_ber = rec.ser = rec.evm_percent =
            std::numeric_limits<double>::quiet_NaN();
    }

    rec.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<MetricsRecord> sweep(const LinkConfig& config, const dvec& margins,
                                 const std::vector<std::uint64_t>& seeds, int threads) {
    if (margins.empty()) throw SimError(SimError::Kind::parameter, "sweep: no margins");
    if (seeds.empty()) throw SimError(SimError::Kind::parameter, "sweep: no seeds");

    struct Job {
        double margin;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (double m : margins)
        for (auto s : seeds) jobs.push_back({m, s});

    std::vector<MetricsRecord> out(jobs.size());
    std::atomic<std::size_t> next{0};
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min<int>(n_threads, static_cast<int>(jobs.size()));

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            out[i] = run_trial(config, jobs[i].margin, jobs[i].seed);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

MarginCurve aggregate(const std::vector<MetricsRecord>& records) {
    std::map<double, std::pair<double, std::size_t>> acc;
    for (const auto& r : records) {
        if (!r.ok) continue;
        acc[r.power_margin_db].first += static_cast<double>(r.error_count);
        acc[r.power_margin_db].second += r.bit_count;
    }
    MarginCurve c;
    for (const auto& [m, eb] : acc) {
        c.margins.push_back(m);
        c.ber.push_back(eb.second ? eb.first / static_cast<double>(eb.second) : 0.0);
        c.bits.push_back(eb.second);
    }
    return c;
}

std::optional<double> margin_at_ber(const MarginCurve& curve, double thr) {
    if (curve.margins.size() < 1) return std::nullopt;
    for (std::size_t i = 0; i < curve.margins.size(); ++i)
        if (curve.ber[i] == thr) return curve.margins[i];
    for (std::size_t i = 0; i + 1 < curve.margins.size(); ++i) {
        double b1 = curve.ber[i], b2 = curve.ber[i + 1];
        if ((b1 - thr) * (b2 - thr) < 0.0) {
            double f1 = b1 > 0 ? b1 : 0.5 / static_cast<double>(curve.bits[i]);
            double f2 = b2 > 0 ? b2 : 0.5 / static_cast<double>(curve.bits[i + 1]);
            double t = (std::log(thr) - std::log(f1)) / (std::log(f2) - std::log(f1));
            return curve.margins[i] + t * (curve.margins[i + 1] - curve.margins[i]);
        }
    }
    return std::nullopt;
}

std::string csv_header(int n_iters) {
    std::string h = "format,margin_db,seed,pre_fec_ber,post_fec_ber,ser,evm_percent";
    for (int i = 1; i <= n_iters; ++i) h += ",iter_ber_" + std::to_string(i);
    h += ",bit_count,error_count,elapsed_seconds";
    return h;
}

std::string csv_row(const MetricsRecord& r, int n_iters) {
    std::ostringstream os;
    os.precision(10);
    os << r.format << ',' << r.power_margin_db << ',' << r.seed << ',' << r.pre_fec_ber << ','
       << r.post_fec_ber << ',' << r.ser << ',' << r.evm_percent;
    for (int i = 0; i < n_iters; ++i)
        os << ',' << (i < static_cast<int>(r.iter_ber.size())
                          ? r.iter_ber[i]
                          : std::numeric_limits<double>::quiet_NaN());
    os << ',' << r.bit_count << ',' << r.error_count << ',' << r.elapsed_seconds;
    return os.str();
}

void write_csv(const std::string& path, const std::vector<MetricsRecord>& records, int n_iters) {
    std::ofstream out(path);
    if (!out) throw SimError(SimError::Kind::parameter, "cannot write: " + path);
    out << csv_header(n_iters) << '\n';
    for (const auto& r : records) out << csv_row(r, n_iters) << '\n';
}

std::vector<MetricsRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError(SimError::Kind::parameter, "cannot read: " + path);
    std::string line;
    if (!std::getline(in, line)) return {};
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != cols.size()) continue;
        MetricsRecord r;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const auto& k = cols[i];
            const auto& v = cells[i];
            if (k == "format") r.format = v;
            else if (k == "margin_db") r.power_margin_db = std::stod(v);
            else if (k == "seed") r.seed = std::stoull(v);
            else if (k == "pre_fec_ber") r.pre_fec_ber = std::stod(v);
            else if (k == "post_fec_ber") r.post_fec_ber = std::stod(v);
            else if (k == "ser") r.ser = std::stod(v);
            else if (k == "evm_percent") r.evm_percent = std::stod(v);
            else if (k == "bit_count") r.bit_count = std::stoull(v);
            else if (k == "error_count") r.error_count = std::stoull(v);
            else if (k == "elapsed_seconds") r.elapsed_seconds = std::stod(v);
            else if (k.rfind("iter_ber_", 0) == 0) r.iter_ber.push_back(std::stod(v));
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace linksim
