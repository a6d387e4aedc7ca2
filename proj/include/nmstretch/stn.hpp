#pragma once

// Two-stage fuzzy sines/transients/noise decomposition.
//
// Stage 1 analyses the input with a long window and splits it into sines
// (mask S1) and a residual (mask 1 - S1). Stage 2 analyses the residual with a
// short window and splits it into transients (mask T2) and noise (1 - T2).
// Masks come from median-filtered magnitude spectrograms passed through the
// saturating function below, so the three components sum back to the input.

#include "nmstretch/audio_buffer.hpp"
#include "nmstretch/core_dsp.hpp"

namespace nmstretch {

struct StnThresholds {
  double upper = 0.85;  // beta_U
  double lower = 0.75;  // beta_L

  static constexpr StnThresholds stage1() { return {0.80, 0.70}; }
  static constexpr StnThresholds stage2() { return {0.85, 0.75}; }
};

void validate(const StnThresholds& thresholds);

/// Soft masks of one stage. Invariant: S + T + N = 1 with every entry in [0, 1].
struct MaskSet {
  Grid<double> sines;
  Grid<double> transients;
  Grid<double> noise;
};

struct StnStageConfig {
  StftParams stft;
  std::size_t time_median = 5;   // frames, odd
  std::size_t freq_median = 93;  // bins, odd
  StnThresholds thresholds;
};

struct StnConfig {
  StnStageConfig stage1;
  StnStageConfig stage2;

  /// Long window 8192/2048 and short window 512/128 at 44.1 kHz, scaled to
  /// `sample_rate`. Median spans cover about 200 ms (time) and 500 Hz
  /// (frequency), rounded to the nearest odd count.
  static StnConfig for_sample_rate(int sample_rate);
};

void validate(const StnConfig& config);

struct StnComponents {
  AudioBuffer sines;
  AudioBuffer transients;
  AudioBuffer noise;
};

struct StnAnalysis {
  StnComponents components;
  MaskSet stage1;
  MaskSet stage2;
};

/// Saturating mask function: 1 above `upper`, 0 below `lower`, and
/// sin^2(pi/2 * (a - lower) / (upper - lower)) in between.
double saturating_mask(double a, const StnThresholds& thresholds);

/// Tonalness R_s = M_time / (M_time + M_freq) and transientness R_t = 1 - R_s,
/// where M_time and M_freq are medians along the time and frequency axes.
/// Bins where both medians vanish get R_s = R_t = 0.5.
struct TonalnessTransientness {
  MagnitudeSpectrogram tonalness;
  MagnitudeSpectrogram transientness;
};
TonalnessTransientness tonalness_transientness(const MagnitudeSpectrogram& mag,
                                               std::size_t time_median_len,
                                               std::size_t freq_median_len);

/// S = f(R_s), T = f(R_t), N = max(0, 1 - S - T). When N is clamped, S and T
/// are rescaled to sum to one so the partition still holds.
MaskSet compute_masks(const MagnitudeSpectrogram& tonalness,
                      const MagnitudeSpectrogram& transientness,
                      const StnThresholds& thresholds);

StnComponents stn_decompose(const AudioBuffer& x, const StnConfig& config);

/// Same as stn_decompose(), also returning the masks of both stages.
StnAnalysis stn_analyze(const AudioBuffer& x, const StnConfig& config);

}  // namespace nmstretch
