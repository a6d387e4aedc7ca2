#include "nmstretch/core_dsp_reference.hpp"

#include <algorithm>

#include "dsp_kernels.hpp"

namespace nmstretch::reference {

ComplexSpectrogram stft(const AudioBuffer& signal, const StftParams& params) {
  validate(params);
  const std::size_t frames = frame_count(signal.size(), params);
  ComplexSpectrogram out{detail::framing_for(params, signal.sample_rate),
                         Grid<Complex>(frames, params.bins())};
  if (frames == 0) return out;
  const auto window = make_window(params.window_kind, params.window_size);
  const RealFft fft(params.window_size);
  std::vector<double> frame(params.window_size);
  for (std::size_t m = 0; m < frames; ++m) {
    detail::analyze_frame(signal.samples, m * params.hop_size, window, fft, frame,
                          out.bins.row(m));
  }
  return out;
}

AudioBuffer istft(const ComplexSpectrogram& spec, const StftParams& params,
                  std::optional<std::size_t> target_length) {
  detail::check_framing(spec, params);
  const std::size_t frames = spec.frames();
  const std::size_t full = detail::istft_length(frames, params);
  const std::size_t length = target_length.value_or(full);
  AudioBuffer out(length, spec.framing.sample_rate);
  if (frames == 0 || length == 0) return out;

  const auto window = make_window(params.window_kind, params.window_size);
  const RealFft fft(params.window_size);
  std::vector<double> acc(full, 0.0);
  std::vector<double> wsum(full, 0.0);
  std::vector<double> frame(params.window_size);
  for (std::size_t m = 0; m < frames; ++m) {
    detail::synthesize_frame(spec.bins.row(m), window, fft, frame);
    const std::size_t start = m * params.hop_size;
    for (std::size_t n = 0; n < params.window_size; ++n) {
      acc[start + n] += frame[n];
      wsum[start + n] += window[n] * window[n];
    }
  }
  for (std::size_t n = 0; n < std::min(length, full); ++n) {
    out.samples[n] = wsum[n] > detail::kWindowSumFloor ? acc[n] / wsum[n] : 0.0;
  }
  return out;
}

namespace {

double sorted_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) * 0.5;
}

}  // namespace

MagnitudeSpectrogram median_filter_axis(const MagnitudeSpectrogram& mag, Axis axis,
                                        std::size_t length) {
  detail::check_median_length(length);
  MagnitudeSpectrogram out{mag.framing, Grid<double>(mag.frames(), mag.bin_count())};
  const auto half = static_cast<std::ptrdiff_t>(length / 2);
  const auto frames = static_cast<std::ptrdiff_t>(mag.frames());
  const auto bins = static_cast<std::ptrdiff_t>(mag.bin_count());
  for (std::ptrdiff_t m = 0; m < frames; ++m) {
    for (std::ptrdiff_t k = 0; k < bins; ++k) {
      std::vector<double> values;
      for (std::ptrdiff_t d = -half; d <= half; ++d) {
        const std::ptrdiff_t mm = axis == Axis::time ? m + d : m;
        const std::ptrdiff_t kk = axis == Axis::frequency ? k + d : k;
        if (mm < 0 || mm >= frames || kk < 0 || kk >= bins) continue;
        values.push_back(mag.values(static_cast<std::size_t>(mm), static_cast<std::size_t>(kk)));
      }
      out.values(static_cast<std::size_t>(m), static_cast<std::size_t>(k)) =
          sorted_median(std::move(values));
    }
  }
  return out;
}

}  // namespace nmstretch::reference
