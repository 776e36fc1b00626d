#include "linksim/ptprdfe.hpp"

#include <algorithm>
#include <cmath>

namespace linksim {

Constellation pr_expand(const Constellation& c, const PrTarget& target) {
    target.validate();
    const auto& pam = c.pam;
    const std::size_t nl = pam.size();
    const std::size_t mem = target.taps.size();

    // enumerate every length-mem tuple of per-dimension levels
    std::size_t tuples = 1;
    for (std::size_t m = 0; m < mem; ++m) tuples *= nl;
    std::vector<std::pair<double, double>> sums;  // (value, probability)
    sums.reserve(tuples);
    for (std::size_t t = 0; t < tuples; ++t) {
        std::size_t idx = t;
        double v = 0.0, p = 1.0;
        for (std::size_t m = 0; m < mem; ++m) {
            std::size_t li = idx % nl;
            idx /= nl;
            v += target.taps[m] * pam.levels[li];
            p *= pam.probs[li];
        }
        sums.emplace_back(v, p);
    }
    std::sort(sums.begin(), sums.end());

    // merge numerically equal level sums
    double scale = 0.0;
    for (double l : pam.levels) scale = std::max(scale, std::abs(l));
    const double tol = 1e-9 * std::max(1.0, scale);
    PamAlphabet out;
    out.bits = 0;
    for (const auto& [v, p] : sums) {
        if (!out.levels.empty() && v - out.levels.back() < tol) {
            out.probs.back() += p;
        } else {
            out.levels.push_back(v);
            out.probs.push_back(p);
        }
    }
    out.labels.assign(out.levels.size(), 0);

    Constellation pr;
    pr.pam = out;
    pr.dim_scale = c.dim_scale;  // keep the input's physical scale
    pr.bits_per_symbol = 0;
    const std::size_t n = out.size();
    pr.points.reserve(n * n);
    pr.probabilities.reserve(n * n);
    pr.labels.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t q = 0; q < n; ++q) {
            pr.points.emplace_back(out.levels[i] * c.dim_scale, out.levels[q] * c.dim_scale);
            pr.probabilities.push_back(out.probs[i] * out.probs[q]);
        }
    return pr;
}

EqualizerState make_equalizer(const EqualizerConfig& cfg) {
    if (cfg.n_ff < 1 || cfg.n_ff % 2 == 0)
        throw std::invalid_argument("EqualizerConfig: n_ff must be odd and positive");
    if (cfg.n_fb < 0) throw std::invalid_argument("EqualizerConfig: negative n_fb");
    EqualizerState st;
    st.cfg = cfg;
    st.ff.assign(cfg.n_ff, cplx(0, 0));
    st.ff[cfg.n_ff / 2] = cplx(1, 0);
    st.fb.assign(cfg.n_fb, cplx(0, 0));
    return st;
}

namespace {

inline cplx ff_output(const cvec& ff, const cvec& rx2, long k2, int center) {
    cplx acc(0, 0);
    const long n = static_cast<long>(rx2.size());
    for (std::size_t i = 0; i < ff.size(); ++i) {
        long idx = k2 + static_cast<long>(i) - center;
        if (idx >= 0 && idx < n) acc += ff[i] * rx2[idx];
    }
    return acc;
}

inline cplx past(const cvec& hist, std::size_t back) {
    // hist holds symbols oldest..newest; back = 1 is the most recent
    if (back > hist.size()) return cplx(0, 0);
    return hist[hist.size() - back];
}

}  // namespace

EqualizerState train(EqualizerState st, const cvec& rx2, const cvec& known_symbols,
                     const PrTarget& target, std::size_t start) {
    target.validate();
    const int center = st.cfg.n_ff / 2;
    const std::size_t n = known_symbols.size();
    if (2 * (start + n) > rx2.size() + 1)
        throw std::invalid_argument("train: rx2 shorter than the training grid");

    // fold any tracked phase into the taps so training runs in a zero-phase frame
    if (st.phase != 0.0) {
        const cplx rot = std::polar(1.0, -st.phase);
        for (auto& w : st.ff) w *= rot;
        st.phase = 0.0;
    }

    dvec err_trace;
    err_trace.reserve(static_cast<std::size_t>(st.cfg.train_passes) * n);

    // data-aided startup is pure LMS: the taps absorb any static rotation;
    // running the phase loop here couples two adaptations of similar
    // bandwidth on one error and ramps the phase away (frequency pulling)
    for (int pass = 0; pass < st.cfg.train_passes; ++pass) {
        for (std::size_t k = target.memory(); k < n; ++k) {
            const long k2 = 2 * static_cast<long>(start + k);
            const cplx u = ff_output(st.ff, rx2, k2, center);
            cplx v_res(0, 0);
            for (std::size_t j = 0; j < st.fb.size(); ++j)
                if (k >= j + 1) v_res += st.fb[j] * known_symbols[k - 1 - j];
            const cplx y = u - v_res;

            cplx d(0, 0);
            for (std::size_t m = 0; m < target.taps.size(); ++m)
                d += target.taps[m] * known_symbols[k - m];

            const cplx e = d - y;
            err_trace.push_back(std::norm(e));

            const cplx g = st.cfg.mu_ff_train * e;
            const long n2 = static_cast<long>(rx2.size());
            for (std::size_t i = 0; i < st.ff.size(); ++i) {
                long idx = k2 + static_cast<long>(i) - center;
                if (idx >= 0 && idx < n2) st.ff[i] += g * std::conj(rx2[idx]);
            }
            for (std::size_t j = 0; j < st.fb.size(); ++j)
                if (k >= j + 1) st.fb[j] -= st.cfg.mu_fb * e * std::conj(known_symbols[k - 1 - j]);
        }
    }

    // convergence accounting over ~64-sample windows
    const std::size_t win = 64;
    dvec means;
    for (std::size_t s = 0; s + win <= err_trace.size(); s += win) {
        double m = 0;
        for (std::size_t i = s; i < s + win; ++i) m += err_trace[i];
        means.push_back(m / win);
    }
    if (means.empty()) means.push_back(0.0);
    for (double m : means)
        if (!std::isfinite(m))
            throw SimError(SimError::Kind::training_failed, "train: diverged (non-finite error)");
    const double mmin = *std::min_element(means.begin(), means.end());
    const std::size_t third = means.size() / 3;
    if (third > 0) {
        double mid = 0, last = 0;
        for (std::size_t i = third; i < 2 * third; ++i) mid += means[i];
        for (std::size_t i = means.size() - third; i < means.size(); ++i) last += means[i];
        mid /= third;
        last /= third;
        if (last > 2.0 * mid && last > 8.0 * mmin)
            throw SimError(SimError::Kind::training_failed, "train: error growing over final third");
    }
    double tail = 0;
    std::size_t ntail = std::max<std::size_t>(1, means.size() / 5);
    for (std::size_t i = means.size() - ntail; i < means.size(); ++i) tail += means[i];
    st.train_mse = tail / ntail;
    st.trained = true;
    return st;
}

EqualizeResult equalize(EqualizerState& st, const cvec& rx2, std::size_t start,
                        std::size_t count, const PrTarget& target, const Constellation& c,
                        const cvec& history) {
    target.validate();
    const int center = st.cfg.n_ff / 2;
    EqualizeResult res;
    res.pr_symbols.reserve(count);
    res.decisions.reserve(count);
    res.pr_reference.reserve(count);
    res.phase_trace.reserve(count);

    cvec hist = history;
    const long n2 = static_cast<long>(rx2.size());

    // two gates with different jobs: tap adaptation holds while the error is
    // far above its running level (noise bursts would corrupt the taps), and
    // the phase loop holds only on errors at decision-feedback scale
    // (half the reference power) -- a genuine phase excursion must keep the
    // loop running or it snowballs. A persistently held loop (beyond a burst
    // length) reacquires so that a static step is still pulled in.
    double err_level = st.train_mse > 0 ? st.train_mse : 0.1;
    double ref_power = 1.0;
    int held = 0;

    for (std::size_t k = 0; k < count; ++k) {
        const long k2 = 2 * static_cast<long>(start + k);
        const cplx u = ff_output(st.ff, rx2, k2, center);
        const cplx rot = std::polar(1.0, -st.phase);
        cplx v_res(0, 0);
        for (std::size_t j = 0; j < st.fb.size(); ++j) v_res += st.fb[j] * past(hist, j + 1);
        const cplx y = u * rot - v_res;

        cplx v_pr(0, 0);
        for (std::size_t m = 1; m < target.taps.size(); ++m) v_pr += target.taps[m] * past(hist, m);

        const cplx z = y - v_pr;
        const cplx decision = c.slice(z);
        const cplx d = decision + v_pr;
        const cplx e = d - y;

        res.phase_trace.push_back(st.phase);
        res.pr_symbols.push_back(y);
        res.decisions.push_back(decision);
        res.pr_reference.push_back(d);

        const double e2 = std::norm(e);
        ref_power += 0.01 * (std::norm(d) - ref_power);
        const bool taps_ok = st.cfg.error_gate <= 0.0 || e2 < st.cfg.error_gate * err_level;
        const bool phase_ok = st.cfg.error_gate <= 0.0 || e2 < 0.5 * ref_power;
        const bool reacquire = held > 64;
        if (taps_ok) {
            // tap gradient in the frame the output used
            const cplx g = st.cfg.mu_ff_track * e * std::polar(1.0, st.phase);
            for (std::size_t i = 0; i < st.ff.size(); ++i) {
                long idx = k2 + static_cast<long>(i) - center;
                if (idx >= 0 && idx < n2) st.ff[i] += g * std::conj(rx2[idx]);
            }
            err_level += 0.01 * (e2 - err_level);
        }
        if (phase_ok) {
            held = 0;
        } else {
            ++held;
        }
        // phase detected on the feedback-subtracted pair: the dense
        // partial-response cloud has no usable restoring slope; the
        // self-sliced read stays bounded through decision bursts
        if (phase_ok || reacquire)
            st.phase += st.cfg.mu_phase * std::arg(z * std::conj(decision));
        hist.push_back(decision);
        if (hist.size() > 64) hist.erase(hist.begin(), hist.begin() + 32);
    }
    return res;
}

}  // namespace linksim
