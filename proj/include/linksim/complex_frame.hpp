#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace linksim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using dvec = std::vector<double>;

/// Uniformly sampled complex baseband waveform and its sample rate.
struct ComplexFrame {
    cvec samples;
    double sample_rate = 0.0;  // Hz

    ComplexFrame() = default;
    ComplexFrame(cvec s, double rate) : samples(std::move(s)), sample_rate(rate) {}

    std::size_t size() const { return samples.size(); }
};

/// Recoverable pipeline failures (sync lost, estimator failed, ...).
/// Contract violations use std::invalid_argument instead.
class SimError : public std::runtime_error {
  public:
    enum class Kind {
        parameter,
        configuration,
        estimation_failed,
        sync_failed,
        training_failed,
        decode_failed,
        complexity,
    };

    SimError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

inline double mean_power(const cvec& x) {
    if (x.empty()) return 0.0;
    double p = 0.0;
    for (const auto& v : x) p += std::norm(v);
    return p / static_cast<double>(x.size());
}

inline double mean_power(const ComplexFrame& f) { return mean_power(f.samples); }

/// Scale the frame so mean sample power is exactly `target`.
inline void normalize_power(ComplexFrame& f, double target = 1.0) {
    double p = mean_power(f);
    if (p <= 0.0) return;
    double g = std::sqrt(target / p);
    for (auto& v : f.samples) v *= g;
}

inline double rms_error(const cvec& a, const cvec& b) {
    std::size_t n = std::min(a.size(), b.size());
    if (n == 0) return 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += std::norm(a[i] - b[i]);
    return std::sqrt(e / static_cast<double>(n));
}

}  // namespace linksim
