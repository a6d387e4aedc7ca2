#include "nmstretch/core_dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "dsp_kernels.hpp"
#include "nmstretch/error.hpp"

namespace nmstretch {
namespace detail {

void analyze_frame(std::span<const double> signal, std::size_t start,
                   std::span<const double> window, const RealFft& fft,
                   std::span<double> frame, std::span<Complex> out) {
  const std::size_t length = window.size();
  for (std::size_t n = 0; n < length; ++n) {
    const std::size_t idx = start + n;
    frame[n] = idx < signal.size() ? signal[idx] * window[n] : 0.0;
  }
  fft.forward(frame, out);
}

void synthesize_frame(std::span<const Complex> bins, std::span<const double> window,
                      const RealFft& fft, std::span<double> out) {
  fft.inverse(bins, out);
  for (std::size_t n = 0; n < window.size(); ++n) out[n] *= window[n];
}

Framing framing_for(const StftParams& params, int sample_rate) {
  return {params.window_size, params.hop_size, sample_rate};
}

void check_framing(const ComplexSpectrogram& spec, const StftParams& params) {
  validate(params);
  if (spec.framing.window_size != params.window_size || spec.framing.hop_size != params.hop_size) {
    throw ConfigError("spectrogram framing (window " + std::to_string(spec.framing.window_size) +
                      ", hop " + std::to_string(spec.framing.hop_size) +
                      ") does not match STFT parameters (window " +
                      std::to_string(params.window_size) + ", hop " +
                      std::to_string(params.hop_size) + ")");
  }
  if (spec.frames() > 0 && spec.bin_count() != params.bins()) {
    throw ConfigError("spectrogram has " + std::to_string(spec.bin_count()) + " bins, expected " +
                      std::to_string(params.bins()));
  }
}

void check_median_length(std::size_t length) {
  if (length == 0 || length % 2 == 0) {
    throw ConfigError("median filter length must be odd and positive, got " +
                      std::to_string(length));
  }
}

std::size_t istft_length(std::size_t frames, const StftParams& params) {
  return frames == 0 ? 0 : (frames - 1) * params.hop_size + params.window_size;
}

}  // namespace detail

void validate(const StftParams& params) {
  const auto w = params.window_size;
  const auto h = params.hop_size;
  if (w < 2 || w % 2 != 0) throw ConfigError("window size must be even and >= 2");
  if (h == 0 || h > w) throw ConfigError("hop size must be in [1, window size]");
  if (w % h != 0) throw ConfigError("hop size must divide the window size");
  if (params.window_kind == WindowKind::hann && w / h < 2) {
    throw ConfigError("Hann window needs hop <= window / 2 for constant overlap-add");
  }
}

std::vector<double> make_window(WindowKind kind, std::size_t size) {
  std::vector<double> w(size, 1.0);
  if (kind == WindowKind::hann) {
    for (std::size_t n = 0; n < size; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(size));
    }
  }
  return w;
}

std::size_t frame_count(std::size_t length, const StftParams& params) {
  if (length == 0) return 0;
  if (length <= params.window_size) return 1;
  const std::size_t excess = length - params.window_size;
  return 1 + (excess + params.hop_size - 1) / params.hop_size;
}

ComplexSpectrogram stft(const AudioBuffer& signal, const StftParams& params) {
  validate(params);
  const std::size_t frames = frame_count(signal.size(), params);
  ComplexSpectrogram out{detail::framing_for(params, signal.sample_rate),
                         Grid<Complex>(frames, params.bins())};
  if (frames == 0) return out;

  const auto window = make_window(params.window_kind, params.window_size);
  const RealFft fft(params.window_size);
  const auto count = static_cast<std::ptrdiff_t>(frames);

#pragma omp parallel
  {
    std::vector<double> frame(params.window_size);
#pragma omp for schedule(static)
    for (std::ptrdiff_t m = 0; m < count; ++m) {
      const auto idx = static_cast<std::size_t>(m);
      detail::analyze_frame(signal.samples, idx * params.hop_size, window, fft, frame,
                            out.bins.row(idx));
    }
  }
  return out;
}

AudioBuffer istft(const ComplexSpectrogram& spec, const StftParams& params,
                  std::optional<std::size_t> target_length) {
  detail::check_framing(spec, params);
  const std::size_t frames = spec.frames();
  const std::size_t length = target_length.value_or(detail::istft_length(frames, params));
  AudioBuffer out(length, spec.framing.sample_rate);
  if (frames == 0 || length == 0) return out;

  const std::size_t win = params.window_size;
  const std::size_t hop = params.hop_size;
  const auto window = make_window(params.window_kind, win);
  const RealFft fft(win);

  Grid<double> synthesized(frames, win);
  const auto count = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < count; ++m) {
    const auto idx = static_cast<std::size_t>(m);
    detail::synthesize_frame(spec.bins.row(idx), window, fft, synthesized.row(idx));
  }

  // Gather per output sample, adding frames in ascending order so the result
  // is independent of the thread count and equal to the serial scatter.
  const std::size_t covered = std::min(length, detail::istft_length(frames, params));
  const auto samples = static_cast<std::ptrdiff_t>(covered);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < samples; ++s) {
    const auto n = static_cast<std::size_t>(s);
    const std::size_t first = n >= win ? (n - win) / hop + 1 : 0;
    const std::size_t last = std::min(n / hop, frames - 1);
    double acc = 0.0;
    double wsum = 0.0;
    for (std::size_t m = first; m <= last; ++m) {
      const std::size_t offset = n - m * hop;
      acc += synthesized(m, offset);
      wsum += window[offset] * window[offset];
    }
    out.samples[n] = wsum > detail::kWindowSumFloor ? acc / wsum : 0.0;
  }
  return out;
}

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec) {
  MagnitudeSpectrogram out{spec.framing, Grid<double>(spec.frames(), spec.bin_count())};
  const auto src = spec.bins.flat();
  auto dst = out.values.flat();
  const auto count = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) dst[i] = std::abs(src[i]);
  return out;
}

namespace {

// Median of values[lo, hi) from `line`, using `work` as scratch.
double window_median(std::span<const double> line, std::size_t lo, std::size_t hi,
                     std::vector<double>& work) {
  work.assign(line.begin() + lo, line.begin() + hi);
  const std::size_t mid = work.size() / 2;
  std::nth_element(work.begin(), work.begin() + mid, work.end());
  const double upper = work[mid];
  if (work.size() % 2 == 1) return upper;
  const double lower = *std::max_element(work.begin(), work.begin() + mid);
  return (lower + upper) * 0.5;
}

void median_line(std::span<const double> line, std::size_t half, std::span<double> out,
                 std::vector<double>& work) {
  const std::size_t n = line.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    out[i] = window_median(line, lo, hi, work);
  }
}

}  // namespace

MagnitudeSpectrogram median_filter_axis(const MagnitudeSpectrogram& mag, Axis axis,
                                        std::size_t length) {
  detail::check_median_length(length);
  MagnitudeSpectrogram out{mag.framing, Grid<double>(mag.frames(), mag.bin_count())};
  const std::size_t half = length / 2;
  const std::size_t frames = mag.frames();
  const std::size_t bins = mag.bin_count();
  if (length == 1) return mag;

  if (axis == Axis::frequency) {
    const auto count = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel
    {
      std::vector<double> work;
#pragma omp for schedule(static)
      for (std::ptrdiff_t m = 0; m < count; ++m) {
        const auto idx = static_cast<std::size_t>(m);
        median_line(mag.values.row(idx), half, out.values.row(idx), work);
      }
    }
  } else {
    const auto count = static_cast<std::ptrdiff_t>(bins);
#pragma omp parallel
    {
      std::vector<double> work;
      std::vector<double> line(frames);
      std::vector<double> filtered(frames);
#pragma omp for schedule(static)
      for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto bin = static_cast<std::size_t>(k);
        for (std::size_t m = 0; m < frames; ++m) line[m] = mag.values(m, bin);
        median_line(line, half, filtered, work);
        for (std::size_t m = 0; m < frames; ++m) out.values(m, bin) = filtered[m];
      }
    }
  }
  return out;
}

double window_energy(std::span<const double> window) {
  double sum = 0.0;
  for (double w : window) sum += w * w;
  return std::sqrt(sum);
}

double window_energy(const StftParams& params) {
  validate(params);
  return window_energy(make_window(params.window_kind, params.window_size));
}

CenteredSignal center_pad(const AudioBuffer& signal, const StftParams& params) {
  const std::size_t pad = params.window_size / 2;
  CenteredSignal out{AudioBuffer(signal.size() + 2 * pad, signal.sample_rate), pad};
  std::copy(signal.samples.begin(), signal.samples.end(), out.padded.samples.begin() + pad);
  return out;
}

AudioBuffer uncenter(const AudioBuffer& padded, std::size_t offset, std::size_t length) {
  AudioBuffer out(length, padded.sample_rate);
  if (offset < padded.size()) {
    const std::size_t available = std::min(length, padded.size() - offset);
    std::copy_n(padded.samples.begin() + offset, available, out.samples.begin());
  }
  return out;
}

}  // namespace nmstretch
