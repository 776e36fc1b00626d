#pragma once

#include "linksim/complex_frame.hpp"

namespace linksim {

/// In-place radix-2 FFT; n must be a power of two.
void fft_pow2(cvec& data, bool inverse);

/// FFT of arbitrary length (Bluestein for non-power-of-two sizes).
cvec fft(const cvec& in, bool inverse = false);

inline cvec ifft(const cvec& in) { return fft(in, true); }

std::size_t next_pow2(std::size_t n);

/// Bin centre frequencies for an n-point FFT at rate fs, in natural
/// (non-shifted) order: 0, fs/n, ..., -fs/n.
dvec fft_freqs(std::size_t n, double fs);

/// Linear convolution via zero-padded power-of-two FFT.
cvec fft_convolve(const cvec& a, const cvec& b);

}  // namespace linksim
