#pragma once

// STFT analysis/synthesis, analysis windows and spectrogram median filtering.
//
// Framing convention: frame m covers input samples [m*hop, m*hop + window).
// The final partial frame is zero-padded, so a signal of length N yields
// 1 + ceil(max(0, N - window) / hop) frames. Spectra are one-sided
// (window/2 + 1 bins). All kernels are OpenMP-parallel over frames or bins
// and produce bit-identical results for any thread count; the serial
// versions in core_dsp_reference.hpp are kept for testing.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nmstretch/audio_buffer.hpp"
#include "nmstretch/grid.hpp"

namespace nmstretch {

using Complex = std::complex<double>;

enum class WindowKind { hann, rectangular };

struct StftParams {
  std::size_t window_size = 2048;
  std::size_t hop_size = 1024;
  WindowKind window_kind = WindowKind::hann;

  std::size_t bins() const noexcept { return window_size / 2 + 1; }
  friend bool operator==(const StftParams&, const StftParams&) = default;
};

/// Throws ConfigError unless the window is even-sized and the hop divides it
/// (at least twice for Hann), which gives constant overlap-add.
void validate(const StftParams& params);

/// Framing metadata carried by every spectrogram.
struct Framing {
  std::size_t window_size = 0;
  std::size_t hop_size = 0;
  int sample_rate = 0;
  friend bool operator==(const Framing&, const Framing&) = default;
};

struct ComplexSpectrogram {
  Framing framing;
  Grid<Complex> bins;  // frames x (window/2 + 1)

  std::size_t frames() const noexcept { return bins.rows(); }
  std::size_t bin_count() const noexcept { return bins.cols(); }
};

struct MagnitudeSpectrogram {
  Framing framing;
  Grid<double> values;

  std::size_t frames() const noexcept { return values.rows(); }
  std::size_t bin_count() const noexcept { return values.cols(); }
};

/// Periodic window of `size` coefficients (Hann: 0.5 - 0.5 cos(2 pi n / size)).
std::vector<double> make_window(WindowKind kind, std::size_t size);

/// Number of frames produced by stft() for a signal of `length` samples.
std::size_t frame_count(std::size_t length, const StftParams& params);

ComplexSpectrogram stft(const AudioBuffer& signal, const StftParams& params);

/// Weighted overlap-add: every inverse-transformed frame is multiplied by the
/// synthesis window (equal to the analysis window) and the sum is divided by
/// the overlapped squared-window sum. Samples whose window sum is numerically
/// zero are set to 0. `target_length` defaults to (M - 1) * hop + window.
AudioBuffer istft(const ComplexSpectrogram& spec, const StftParams& params,
                  std::optional<std::size_t> target_length = std::nullopt);

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec);

enum class Axis { time, frequency };

/// Sliding median of odd `length` along frames (time) or bins (frequency).
/// Near the edges the median is taken over the available neighbours only;
/// an even count of values yields the mean of the two middle values.
MagnitudeSpectrogram median_filter_axis(const MagnitudeSpectrogram& mag, Axis axis,
                                        std::size_t length);

/// sqrt(sum of squared window coefficients). Dividing the STFT of unit-variance
/// white noise by this constant gives an expected per-bin power of one.
double window_energy(const StftParams& params);
double window_energy(std::span<const double> window);

/// Zero padding of window/2 samples on both sides of a signal so that every
/// original sample lies under a fully overlapped region and frame m of the
/// padded signal is centred on original sample m * hop.
struct CenteredSignal {
  AudioBuffer padded;
  std::size_t offset = 0;  // index of original sample 0 inside `padded`
};
CenteredSignal center_pad(const AudioBuffer& signal, const StftParams& params);

/// Extracts `length` samples starting at `offset`, zero-filling past the end.
AudioBuffer uncenter(const AudioBuffer& padded, std::size_t offset, std::size_t length);

}  // namespace nmstretch
