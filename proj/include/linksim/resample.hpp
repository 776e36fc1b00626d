#pragma once

#include "linksim/complex_frame.hpp"

namespace linksim {

/// Best rational approximation p/q to `ratio` with p, q <= max_term.
/// Throws SimError::parameter when no approximation is close enough.
std::pair<int, int> rational_ratio(double ratio, int max_term = 64, double rel_tol = 1e-9);

/// Band-limited rational-rate conversion (polyphase windowed-sinc).
/// Output sample n sits at input time n*q/p; content below the narrower
/// Nyquist band is preserved.
ComplexFrame resample(const ComplexFrame& frame, double target_rate);

}  // namespace linksim
