#include "nmstretch/stn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nmstretch/error.hpp"
#include "nmstretch/log.hpp"

namespace nmstretch {
namespace {

std::size_t nearest_odd(double x) {
  const auto r = static_cast<long long>(std::llround(x));
  if (r < 1) return 1;
  if (r % 2 == 1) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(x >= static_cast<double>(r) ? r + 1 : r - 1);
}

std::size_t scaled_window(std::size_t at_44k, int sample_rate) {
  const double scaled = static_cast<double>(at_44k) * sample_rate / 44100.0;
  const auto quarters = std::max<long long>(1, std::llround(scaled / 4.0));
  return static_cast<std::size_t>(quarters) * 4;
}

StnStageConfig stage_config(std::size_t window_44k, int sample_rate, StnThresholds thresholds) {
  StnStageConfig stage;
  stage.stft.window_size = scaled_window(window_44k, sample_rate);
  stage.stft.hop_size = stage.stft.window_size / 4;
  stage.stft.window_kind = WindowKind::hann;
  const double frame_rate = static_cast<double>(sample_rate) / stage.stft.hop_size;
  const double bin_width = static_cast<double>(sample_rate) / stage.stft.window_size;
  stage.time_median = nearest_odd(0.200 * frame_rate);
  stage.freq_median = nearest_odd(500.0 / bin_width);
  stage.thresholds = thresholds;
  return stage;
}

ComplexSpectrogram apply_mask(const ComplexSpectrogram& spec, const Grid<double>& mask,
                              bool complement) {
  ComplexSpectrogram out{spec.framing, Grid<Complex>(spec.frames(), spec.bin_count())};
  const auto src = spec.bins.flat();
  const auto gain = mask.flat();
  auto dst = out.bins.flat();
  const auto count = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    dst[i] = src[i] * (complement ? 1.0 - gain[i] : gain[i]);
  }
  return out;
}

struct StageOutput {
  AudioBuffer selected;
  AudioBuffer rest;
  MaskSet masks;
};

// Runs one stage and splits `x` with the sines mask (stage 1) or the
// transients mask (stage 2) and its complement.
StageOutput run_stage(const AudioBuffer& x, const StnStageConfig& stage, bool select_sines) {
  const auto centered = center_pad(x, stage.stft);
  const auto spec = stft(centered.padded, stage.stft);
  const auto ratios =
      tonalness_transientness(magnitude(spec), stage.time_median, stage.freq_median);
  StageOutput out;
  out.masks = compute_masks(ratios.tonalness, ratios.transientness, stage.thresholds);
  const auto& mask = select_sines ? out.masks.sines : out.masks.transients;
  const auto full = istft(apply_mask(spec, mask, false), stage.stft);
  const auto rest = istft(apply_mask(spec, mask, true), stage.stft);
  out.selected = uncenter(full, centered.offset, x.size());
  out.rest = uncenter(rest, centered.offset, x.size());
  return out;
}

}  // namespace

void validate(const StnThresholds& thresholds) {
  const auto [upper, lower] = thresholds;
  if (!(upper > 0.0 && upper <= 1.0)) throw ConfigError("beta_U must be in (0, 1]");
  if (!(lower >= 0.0 && lower < 1.0)) throw ConfigError("beta_L must be in [0, 1)");
  if (!(lower < upper)) throw ConfigError("beta_L must be below beta_U");
}

StnConfig StnConfig::for_sample_rate(int sample_rate) {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  return {stage_config(8192, sample_rate, StnThresholds::stage1()),
          stage_config(512, sample_rate, StnThresholds::stage2())};
}

void validate(const StnConfig& config) {
  for (const auto* stage : {&config.stage1, &config.stage2}) {
    validate(stage->stft);
    validate(stage->thresholds);
    if (stage->time_median % 2 == 0 || stage->freq_median % 2 == 0) {
      throw ConfigError("median filter lengths must be odd");
    }
  }
}

double saturating_mask(double a, const StnThresholds& thresholds) {
  if (a >= thresholds.upper) return 1.0;
  if (a < thresholds.lower) return 0.0;
  const double s = std::sin(std::numbers::pi / 2.0 * (a - thresholds.lower) /
                            (thresholds.upper - thresholds.lower));
  return s * s;
}

TonalnessTransientness tonalness_transientness(const MagnitudeSpectrogram& mag,
                                               std::size_t time_median_len,
                                               std::size_t freq_median_len) {
  const auto along_time = median_filter_axis(mag, Axis::time, time_median_len);
  const auto along_freq = median_filter_axis(mag, Axis::frequency, freq_median_len);
  TonalnessTransientness out{along_time, along_time};
  const auto ht = along_time.values.flat();
  const auto vf = along_freq.values.flat();
  auto rs = out.tonalness.values.flat();
  auto rt = out.transientness.values.flat();
  const auto count = static_cast<std::ptrdiff_t>(ht.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const double den = ht[i] + vf[i];
    rs[i] = den > 0.0 ? ht[i] / den : 0.5;
    rt[i] = 1.0 - rs[i];
  }
  return out;
}

MaskSet compute_masks(const MagnitudeSpectrogram& tonalness,
                      const MagnitudeSpectrogram& transientness,
                      const StnThresholds& thresholds) {
  validate(thresholds);
  if (!tonalness.values.same_shape(transientness.values)) {
    throw ConfigError("tonalness and transientness shapes differ");
  }
  const std::size_t rows = tonalness.frames();
  const std::size_t cols = tonalness.bin_count();
  MaskSet masks{Grid<double>(rows, cols), Grid<double>(rows, cols), Grid<double>(rows, cols)};
  const auto rs = tonalness.values.flat();
  const auto rt = transientness.values.flat();
  auto s = masks.sines.flat();
  auto t = masks.transients.flat();
  auto n = masks.noise.flat();
  const auto count = static_cast<std::ptrdiff_t>(rs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    double si = saturating_mask(rs[i], thresholds);
    double ti = saturating_mask(rt[i], thresholds);
    const double sum = si + ti;
    if (sum > 1.0) {
      // Only reachable with beta_L < 0.5.
      si /= sum;
      ti = 1.0 - si;
    }
    s[i] = si;
    t[i] = ti;
    n[i] = std::max(0.0, 1.0 - si - ti);
  }
  return masks;
}

StnAnalysis stn_analyze(const AudioBuffer& x, const StnConfig& config) {
  validate(x);
  validate(config);
  StnAnalysis out;
  if (x.empty()) {
    out.components = {x, x, x};
    return out;
  }
  if (x.size() < config.stage1.stft.window_size) {
    log_warning("input of " + std::to_string(x.size()) +
                " samples is shorter than the long analysis window (" +
                std::to_string(config.stage1.stft.window_size) + "); frames are zero-padded");
  }
  auto first = run_stage(x, config.stage1, true);
  auto second = run_stage(first.rest, config.stage2, false);
  out.components = {std::move(first.selected), std::move(second.selected),
                    std::move(second.rest)};
  out.stage1 = std::move(first.masks);
  out.stage2 = std::move(second.masks);
  return out;
}

StnComponents stn_decompose(const AudioBuffer& x, const StnConfig& config) {
  return stn_analyze(x, config).components;
}

}  // namespace nmstretch
