#pragma once

// Per-frame and per-line kernels shared by the parallel and the serial
// reference implementations in core_dsp.cpp / core_dsp_reference.cpp.

#include <span>
#include <string>

#include "nmstretch/core_dsp.hpp"
#include "nmstretch/fft.hpp"

namespace nmstretch::detail {

// Window sums at or below this value are treated as zero by istft.
inline constexpr double kWindowSumFloor = 1e-10;

void analyze_frame(std::span<const double> signal, std::size_t start,
                   std::span<const double> window, const RealFft& fft,
                   std::span<double> frame, std::span<Complex> out);

// out = window * inverse_fft(bins)
void synthesize_frame(std::span<const Complex> bins, std::span<const double> window,
                      const RealFft& fft, std::span<double> out);

Framing framing_for(const StftParams& params, int sample_rate);
void check_framing(const ComplexSpectrogram& spec, const StftParams& params);
void check_median_length(std::size_t length);

std::size_t istft_length(std::size_t frames, const StftParams& params);

}  // namespace nmstretch::detail
