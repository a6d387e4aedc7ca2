#include "nmstretch/sines_pv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dsp_kernels.hpp"
#include "nmstretch/error.hpp"

namespace nmstretch {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double principal_value(double phase) {
  return phase - kTwoPi * std::floor((phase + std::numbers::pi) / kTwoPi);
}

StftParams stft_params(const PvParams& params) {
  return {params.window_size, params.synthesis_hop, WindowKind::hann};
}

}  // namespace

PvParams PvParams::for_sample_rate(int sample_rate, double alpha) {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  PvParams params;
  const double scaled = 4096.0 * sample_rate / 44100.0;
  const auto quarters = std::max<long long>(1, std::llround(scaled / 4.0));
  params.window_size = static_cast<std::size_t>(quarters) * 4;
  params.synthesis_hop = params.window_size / 4;
  params.alpha = alpha;
  return params;
}

void validate(const PvParams& params) {
  if (!std::isfinite(params.alpha) || params.alpha <= 0.0) {
    throw ConfigError("stretch factor must be finite and positive, got " +
                      std::to_string(params.alpha));
  }
  if (params.synthesis_hop == 0 || params.synthesis_hop > params.window_size / 2) {
    throw ConfigError("phase vocoder synthesis hop must be in [1, window / 2]");
  }
  validate(stft_params(params));
}

std::vector<SpectralPeak> find_peaks(std::span<const double> magnitude) {
  std::vector<SpectralPeak> peaks;
  const std::size_t bins = magnitude.size();
  if (bins < 5) return peaks;

  for (std::size_t k = 0; k < bins; ++k) {
    bool peak = true;
    for (std::size_t d = 1; d <= 2 && peak; ++d) {
      if (k >= d && !(magnitude[k] > magnitude[k - d])) peak = false;
      if (k + d < bins && !(magnitude[k] > magnitude[k + d])) peak = false;
    }
    if (peak) peaks.push_back({k, 0, bins});
  }

  for (std::size_t i = 1; i < peaks.size(); ++i) {
    const auto first = magnitude.begin() + static_cast<std::ptrdiff_t>(peaks[i - 1].bin) + 1;
    const auto last = magnitude.begin() + static_cast<std::ptrdiff_t>(peaks[i].bin);
    const auto boundary = static_cast<std::size_t>(std::min_element(first, last) - magnitude.begin());
    peaks[i - 1].region_end = boundary;
    peaks[i].region_start = boundary;
  }
  return peaks;
}

AudioBuffer phase_vocoder(const AudioBuffer& x, const PvParams& params, PhaseMode mode) {
  validate(x);
  validate(params);
  const std::size_t out_length = stretched_length(x.size(), params.alpha);
  if (x.empty() || out_length == 0) return AudioBuffer(out_length, x.sample_rate);

  const auto stft_cfg = stft_params(params);
  const std::size_t win = params.window_size;
  const std::size_t hop = params.synthesis_hop;
  const std::size_t bins = stft_cfg.bins();
  const auto centered = center_pad(x, stft_cfg);
  const std::size_t frames = frame_count(out_length + 2 * centered.offset, stft_cfg);

  std::vector<std::ptrdiff_t> positions(frames);
  for (std::size_t m = 0; m < frames; ++m) {
    positions[m] = static_cast<std::ptrdiff_t>(
        std::llround(static_cast<double>(m) * static_cast<double>(hop) / params.alpha));
  }

  // Analysis frames at the fractional-hop positions.
  ComplexSpectrogram spec{{win, hop, x.sample_rate}, Grid<Complex>(frames, bins)};
  {
    const auto window = make_window(WindowKind::hann, win);
    const RealFft fft(win);
    const auto count = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel
    {
      std::vector<double> frame(win);
#pragma omp for schedule(static)
      for (std::ptrdiff_t m = 0; m < count; ++m) {
        const auto idx = static_cast<std::size_t>(m);
        detail::analyze_frame(centered.padded.samples, static_cast<std::size_t>(positions[idx]),
                              window, fft, frame, spec.bins.row(idx));
      }
    }
  }

  // Phase propagation is sequential across frames.
  std::vector<double> analysis_phase(bins), previous_phase(bins), synthesis_phase(bins);
  std::vector<double> inst_freq(bins), magnitude(bins);
  for (std::size_t k = 0; k < bins; ++k) inst_freq[k] = kTwoPi * static_cast<double>(k) / win;

  for (std::size_t m = 0; m < frames; ++m) {
    auto row = spec.bins.row(m);
    for (std::size_t k = 0; k < bins; ++k) {
      analysis_phase[k] = std::arg(row[k]);
      magnitude[k] = std::abs(row[k]);
    }
    if (m == 0) {
      synthesis_phase = analysis_phase;
    } else {
      const auto analysis_hop = positions[m] - positions[m - 1];
      if (analysis_hop > 0) {
        const double ha = static_cast<double>(analysis_hop);
        for (std::size_t k = 0; k < bins; ++k) {
          const double omega = kTwoPi * static_cast<double>(k) / win;
          const double deviation =
              principal_value(analysis_phase[k] - previous_phase[k] - omega * ha);
          inst_freq[k] = omega + deviation / ha;
        }
      }
      const auto advance = [&](std::size_t k) {
        return principal_value(synthesis_phase[k] + static_cast<double>(hop) * inst_freq[k]);
      };
      const auto peaks =
          mode == PhaseMode::identity_locking ? find_peaks(magnitude) : std::vector<SpectralPeak>{};
      if (peaks.empty()) {
        for (std::size_t k = 0; k < bins; ++k) synthesis_phase[k] = advance(k);
      } else {
        std::vector<double> next(bins);
        for (const auto& peak : peaks) {
          const double rotation = advance(peak.bin) - analysis_phase[peak.bin];
          for (std::size_t k = peak.region_start; k < peak.region_end; ++k) {
            next[k] = principal_value(analysis_phase[k] + rotation);
          }
        }
        synthesis_phase = std::move(next);
      }
    }
    for (std::size_t k = 0; k < bins; ++k) row[k] = std::polar(magnitude[k], synthesis_phase[k]);
    previous_phase = analysis_phase;
  }

  return uncenter(istft(spec, stft_cfg), centered.offset, out_length);
}

AudioBuffer stretch_sines(const AudioBuffer& sines, const PvParams& params) {
  return phase_vocoder(sines, params, PhaseMode::identity_locking);
}

}  // namespace nmstretch
