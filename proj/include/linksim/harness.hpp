#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linksim/channel.hpp"
#include "linksim/complex_frame.hpp"
#include "linksim/ptprdfe.hpp"
#include "linksim/shaping.hpp"
#include "linksim/txchain.hpp"

namespace linksim {

enum class SignalFormat { FTN16QAM, PCS64QAM_MB, PCS64QAM_IVMB };
enum class ReceiverMode { hard, fec_oneshot, turbo };

std::string to_string(SignalFormat f);
std::string to_string(ReceiverMode m);
SignalFormat format_from_string(const std::string& s);
ReceiverMode mode_from_string(const std::string& s);

/// One trial's full parameterization. JSON keys mirror the field names.
struct LinkConfig {
    SignalFormat format = SignalFormat::FTN16QAM;
    double baud = 45e9;
    double alpha = 0.8;            // FTN compression; 1.0 for Nyquist
    double entropy_2d = 4.0;       // bits per 2-D symbol (5.0 for PCS)
    double rolloff = 0.1;
    int sps = 4;
    FrameLayout frame_layout;      // payload_len derived at plan time
    ChannelConfig channel;
    ReceiverMode receiver_mode = ReceiverMode::turbo;
    int turbo_iterations = 4;
    std::size_t info_bits = 1u << 17;
    int segments = 8;              // bursts per trial, each with its own preamble
    double awg_rate = 64e9;
    double adc_rate = 80e9;
    double foe_window_hz = 2.5e9;
    EqualizerConfig equalizer;
    dvec amplitudes{1, 3, 5, 7};   // PCS amplitude alphabet
    int ccdm_block_len = 96;
    int pas_blocks_per_frame = 10;
    std::optional<ShapingSpec> shaping_spec;  // overrides the solver when set

    void validate() const;
    std::string to_json() const;
    static LinkConfig from_json(const std::string& text);
    static LinkConfig load(const std::string& path);
    std::string digest() const;  // stable hash of the canonical JSON
};

/// Measured outcomes of one trial.
struct MetricsRecord {
    std::string config_digest;
    std::string format;
    double power_margin_db = 0.0;
    double pre_fec_ber = 0.0;
    double post_fec_ber = std::numeric_limits<double>::quiet_NaN();
    double ser = 0.0;
    double evm_percent = 0.0;
    dvec iter_ber;
    std::size_t bit_count = 0;    // info bits judged by post_fec_ber (coded bits in hard mode)
    std::size_t error_count = 0;
    double elapsed_seconds = 0.0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string fail_reason;
};

/// Full pipeline for the configured format and receiver mode; component
/// failures are recorded in the MetricsRecord, not thrown.
MetricsRecord run_trial(const LinkConfig& config, double margin_db, std::uint64_t seed);

/// Cartesian product margins x seeds, executed on a small work pool.
std::vector<MetricsRecord> sweep(const LinkConfig& config, const dvec& margins,
                                 const std::vector<std::uint64_t>& seeds, int threads = 0);

/// Mean BER per margin from a sweep (post-FEC when available, else pre-FEC).
struct MarginCurve {
    dvec margins;
    dvec ber;
    std::vector<std::size_t> bits;
};
MarginCurve aggregate(const std::vector<MetricsRecord>& records);

/// Log-linear interpolation of the margin reaching ber_threshold.
/// nullopt when the sweep does not bracket the threshold.
std::optional<double> margin_at_ber(const MarginCurve& curve, double ber_threshold);

std::string csv_header(int n_iters);
std::string csv_row(const MetricsRecord& r, int n_iters);
void write_csv(const std::string& path, const std::vector<MetricsRecord>& records, int n_iters);
std::vector<MetricsRecord> read_csv(const std::string& path);

/// Transmit-side waveform for spectrum inspection (pilot included).
ComplexFrame build_tx_waveform(const LinkConfig& config, std::uint64_t seed);

/// Shaping distribution a PCS configuration will transmit with (the
/// embedded spec when present, otherwise solved from the entropy target).
ShapingSpec solved_shaping(const LinkConfig& config);

}  // namespace linksim
