#include "linksim/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace linksim {

namespace {

dvec boltzmann_probs(const dvec& alphabet, double lambda, bool inverted) {
    const double sign = inverted ? 1.0 : -1.0;
    // subtract the max exponent for stability at large lambda
    dvec ex(alphabet.size());
    double emax = -1e300;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        ex[i] = sign * lambda * alphabet[i] * alphabet[i];
        emax = std::max(emax, ex[i]);
    }
    double z = 0.0;
    for (auto& e : ex) {
        e = std::exp(e - emax);
        z += e;
    }
    for (auto& e : ex) e /= z;
    return ex;
}

double entropy_bits(const dvec& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

ShapingSpec solve_boltzmann(const dvec& alphabet, double target_entropy_2d, bool inverted) {
    if (alphabet.size() < 2) throw std::invalid_argument("shaping: need at least 2 amplitudes");
    if (!std::is_sorted(alphabet.begin(), alphabet.end()))
        throw std::invalid_argument("shaping: alphabet must be ascending");
    for (double a : alphabet)
        if (a <= 0.0) throw std::invalid_argument("shaping: amplitudes must be positive");

    const double h_max_2d = 2.0 + 2.0 * std::log2(static_cast<double>(alphabet.size()));
    if (target_entropy_2d > h_max_2d + 1e-12 || target_entropy_2d < 2.0)
        throw SimError(SimError::Kind::parameter, "shaping: target entropy outside achievable range");

    // per-dimension amplitude entropy target; signs contribute 1 bit/dim
    const double h_target = target_entropy_2d / 2.0 - 1.0;

    ShapingSpec spec;
    spec.amplitude_alphabet = alphabet;
    spec.inverted = inverted;
    spec.target_entropy_2d = target_entropy_2d;

    // entropy decreases monotonically in lambda from log2(M) at lambda = 0
    double lo = 0.0, hi = 1.0;
    while (entropy_bits(boltzmann_probs(alphabet, hi, inverted)) > h_target && hi < 1e9) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double h = entropy_bits(boltzmann_probs(alphabet, mid, inverted));
        if (h > h_target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16 * (1.0 + hi)) break;
    }
    spec.lambda = 0.5 * (lo + hi);
    spec.probabilities = boltzmann_probs(alphabet, spec.lambda, inverted);
    if (std::abs(entropy_bits(spec.probabilities) - h_target) > 1e-9)
        throw SimError(SimError::Kind::parameter, "shaping: bisection failed to reach entropy target");
    // exact endpoint: lambda=0 means uniform
    if (spec.lambda < 1e-14) {
        spec.lambda = 0.0;
        std::fill(spec.probabilities.begin(), spec.probabilities.end(),
                  1.0 / static_cast<double>(alphabet.size()));
    }
    return spec;
}

}  // namespace

double ShapingSpec::amplitude_entropy() const { return entropy_bits(probabilities); }

double ShapingSpec::mean_amplitude_energy() const {
    double e = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i)
        e += probabilities[i] * amplitude_alphabet[i] * amplitude_alphabet[i];
    return e;
}

ShapingSpec solve_mb(const dvec& alphabet, double target_entropy_2d) {
    return solve_boltzmann(alphabet, target_entropy_2d, false);
}

ShapingSpec solve_ivmb(const dvec& alphabet, double target_entropy_2d) {
    return solve_boltzmann(alphabet, target_entropy_2d, true);
}

std::vector<int> composition_for(const ShapingSpec& spec, int block_len) {
    const std::size_t n = spec.probabilities.size();
    if (block_len < static_cast<int>(n))
        throw std::invalid_argument("composition_for: block_len smaller than alphabet");

    std::vector<int> counts(n);
    std::vector<std::pair<double, std::size_t>> rema(n);
    int assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double exact = spec.probabilities[i] * block_len;
        counts[i] = static_cast<int>(std::floor(exact));
        assigned += counts[i];
        rema[i] = {exact - std::floor(exact), i};
    }
    // largest remainder first; ties toward the smaller amplitude (lower index)
    std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int k = 0; k < block_len - assigned; ++k) counts[rema[k % n].second]++;
    return counts;
}

ShapingSpec with_composition(ShapingSpec spec, int block_len) {
    spec.block_len = block_len;
    spec.composition = composition_for(spec, block_len);
    return spec;
}

std::string ShapingSpec::to_json() const {
    nlohmann::json j;
    j["amplitude_alphabet"] = amplitude_alphabet;
    j["probabilities"] = probabilities;
    j["lambda"] = lambda;
    j["inverted"] = inverted;
    j["target_entropy_2d"] = target_entropy_2d;
    j["block_len"] = block_len;
    j["composition"] = composition;
    return j.dump(2);
}

ShapingSpec ShapingSpec::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ShapingSpec s;
    s.amplitude_alphabet = j.at("amplitude_alphabet").get<dvec>();
    s.probabilities = j.at("probabilities").get<dvec>();
    s.lambda = j.at("lambda").get<double>();
    s.inverted = j.value("inverted", false);
    s.target_entropy_2d = j.at("target_entropy_2d").get<double>();
    s.block_len = j.value("block_len", 0);
    s.composition = j.value("composition", std::vector<int>{});
    return s;
}

}  // namespace linksim
