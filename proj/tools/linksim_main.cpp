// Command-line front end: margin sweeps, format comparison, spectrum export.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "linksim/harness.hpp"
#include "linksim/spectrum.hpp"

using namespace linksim;

namespace {

dvec parse_sweep(const std::string& spec) {
    // "start:stop:step" in dB
    double start, stop, step;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0)
        throw CLI::ValidationError("--sweep expects start:stop:step");
    dvec out;
    for (double m = start; m <= stop + 1e-9; m += step) out.push_back(m);
    return out;
}

std::vector<std::uint64_t> seed_list(int n) {
    std::vector<std::uint64_t> s(n);
    for (int i = 0; i < n; ++i) s[i] = 1000 + i;
    return s;
}

int run_simulate(const std::string& config_path, const std::string& sweep_spec, int n_seeds,
                 const std::string& out_path, bool noise_free, int threads) {
    auto cfg = LinkConfig::load(config_path);
    if (noise_free) cfg.channel.noise_free = true;
    if (cfg.format != SignalFormat::FTN16QAM)
        std::printf("shaping: %s\n", solved_shaping(cfg).to_json().c_str());
    auto margins = parse_sweep(sweep_spec);
    auto records = sweep(cfg, margins, seed_list(n_seeds), threads);

    const int n_iters = cfg.receiver_mode == ReceiverMode::turbo ? cfg.turbo_iterations : 0;
    write_csv(out_path, records, n_iters);

    auto curve = aggregate(records);
    std::printf("%-14s %12s %12s\n", "margin_db", "mean_ber", "bits");
    for (std::size_t i = 0; i < curve.margins.size(); ++i)
        std::printf("%-14.2f %12.3e %12zu\n", curve.margins[i], curve.ber[i], curve.bits[i]);
    int failed = 0;
    for (const auto& r : records)
        if (!r.ok) ++failed;
    if (failed) std::printf("%d/%zu trials failed (see csv)\n", failed, records.size());
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

int run_compare(const std::vector<std::string>& config_paths, double ber, const std::string& sweep_spec,
                int n_seeds, const std::string& out_path, int threads) {
    auto margins = parse_sweep(sweep_spec);
    struct Entry {
        std::string name;
        std::optional<double> margin;
        MarginCurve curve;
    };
    std::vector<Entry> entries;
    for (const auto& path : config_paths) {
        auto cfg = LinkConfig::load(path);
        auto records = sweep(cfg, margins, seed_list(n_seeds), threads);
        auto curve = aggregate(records);
        entries.push_back({to_string(cfg.format) + " (" + to_string(cfg.receiver_mode) + ")",
                           margin_at_ber(curve, ber), curve});
    }
    std::printf("margin at BER %.3g:\n", ber);
    for (const auto& e : entries) {
        if (e.margin)
            std::printf("  %-28s %8.3f dB\n", e.name.c_str(), *e.margin);
        else
            std::printf("  %-28s %8s\n", e.name.c_str(), "n/a");
    }
    for (std::size_t i = 0; i + 1 < entries.size(); ++i)
        for (std::size_t j = i + 1; j < entries.size(); ++j)
            if (entries[i].margin && entries[j].margin)
                std::printf("  delta %s - %s = %.3f dB\n", entries[i].name.c_str(),
                            entries[j].name.c_str(), *entries[i].margin - *entries[j].margin);

    if (!out_path.empty()) {
        // aggregated curves: one row per (format, margin)
        std::ofstream out(out_path);
        out << "format,margin_db,mean_ber,bits\n";
        for (const auto& e : entries)
            for (std::size_t i = 0; i < e.curve.margins.size(); ++i)
                out << e.name << ',' << e.curve.margins[i] << ',' << e.curve.ber[i] << ','
                    << e.curve.bits[i] << '\n';
        std::printf("wrote %s\n", out_path.c_str());
    }
    return 0;
}

int run_spectrum(const std::string& config_path, const std::string& out_path) {
    auto cfg = LinkConfig::load(config_path);
    auto wave = build_tx_waveform(cfg, 1);
    auto spec = welch_psd(wave);
    std::ofstream out(out_path);
    if (!out) throw CLI::ValidationError("cannot write " + out_path);
    out << "freq_hz,psd_db\n";
    for (std::size_t i = 0; i < spec.freq_hz.size(); ++i)
        out << spec.freq_hz[i] << ',' << 10.0 * std::log10(spec.psd[i] + 1e-300) << '\n';
    std::printf("occupied bandwidth (99%%): %.4g GHz\n",
                occupied_bandwidth(spec, 0.99) / 1e9);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"amplifier-less coherent link simulator: FTN-16QAM vs PCS-64QAM"};
    app.require_subcommand(1);

    std::string config_path, out_path, sweep_spec = "0:6:1";
    std::vector<std::string> config_paths;
    int n_seeds = 20, threads = 0;
    bool noise_free = false;
    double ber = 1e-3;

    auto* sim = app.add_subcommand("simulate", "sweep power margin for one configuration");
    sim->add_option("--config", config_path, "link configuration JSON")->required();
    sim->add_option("--sweep", sweep_spec, "margin sweep start:stop:step in dB");
    sim->add_option("--seeds", n_seeds, "number of seeds per margin");
    sim->add_option("--out", out_path, "output CSV path")->required();
    sim->add_flag("--noise-free", noise_free, "disable AWGN (pipeline self-test)");
    sim->add_option("--threads", threads, "worker threads (default: hardware)");

    auto* cmp = app.add_subcommand("compare", "compare margins at a target BER");
    cmp->add_option("--configs", config_paths, "configuration JSON files")->required()->expected(-1);
    cmp->add_option("--ber", ber, "BER threshold for the margin readout");
    cmp->add_option("--sweep", sweep_spec, "margin sweep start:stop:step in dB");
    cmp->add_option("--seeds", n_seeds, "number of seeds per margin");
    cmp->add_option("--out", out_path, "optional CSV with every trial");
    cmp->add_option("--threads", threads, "worker threads");

    auto* spc = app.add_subcommand("spectrum", "export the transmit PSD");
    spc->add_option("--config", config_path, "link configuration JSON")->required();
    spc->add_option("--out", out_path, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(config_path, sweep_spec, n_seeds, out_path, noise_free, threads);
        if (cmp->parsed()) return run_compare(config_paths, ber, sweep_spec, n_seeds, out_path, threads);
        if (spc->parsed()) return run_spectrum(config_path, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
