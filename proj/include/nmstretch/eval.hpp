#pragma once

// Synthetic test material and objective measurements. The measurements use
// their own FFT and envelope code and share nothing with the processing
// modules beyond AudioBuffer.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "nmstretch/audio_buffer.hpp"

namespace nmstretch::eval {

struct GeneratedSignal {
  std::string name;
  AudioBuffer audio;
  std::vector<std::size_t> onsets;  // sample positions of clicks, if any
  std::vector<double> frequencies;  // Hz, for tonal signals
};

// All generators throw ConfigError for non-positive durations/rates or
// frequencies at or above Nyquist.
GeneratedSignal sine(double frequency, double seconds, int sample_rate, double amplitude = 0.5);
GeneratedSignal two_tone(double f1, double f2, double seconds, int sample_rate,
                         double amplitude = 0.25);

/// Click: white-noise burst with exponential decay (time constant 1 ms, 10 ms
/// long) starting at full amplitude.
std::vector<double> click_shape(int sample_rate, std::uint64_t seed, double amplitude = 0.8);

/// Clicks every `period` seconds starting at t = 0.
GeneratedSignal click_train(double period, double seconds, int sample_rate, std::uint64_t seed);

/// Gaussian noise whose power spectrum falls `slope_db_per_octave` dB per
/// octave above 40 Hz (nothing below), scaled to `rms`.
GeneratedSignal shaped_noise(double slope_db_per_octave, double seconds, int sample_rate,
                             std::uint64_t seed, double rms = 0.1);

/// Stationary hiss (band around 5 kHz, RMS 0.03) with six clicks at 0.3, 0.7,
/// 1.1, 1.5, 1.62 and 1.75 s (scaled into `seconds`).
GeneratedSignal click_plus_hiss(double seconds, int sample_rate, std::uint64_t seed);

/// The five 2 s signals used by the acceptance suite.
std::vector<GeneratedSignal> corpus(int sample_rate = 44100);

// ---------------------------------------------------------------------------
// Measurements

/// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse = false);

/// Frequency of the largest spectral peak: Hann window, zero padding to at
/// least 4x the length, parabolic interpolation of the log magnitude.
double dominant_frequency(const AudioBuffer& signal);

struct WelchSpectrum {
  std::vector<double> frequency;  // Hz
  std::vector<double> power;      // mean |X|^2 / sum(w^2)
};
WelchSpectrum welch(const AudioBuffer& signal, std::size_t segment = 4096);

struct BandLevel {
  double center_hz;
  double level_db;  // 10 log10 of mean power in [center/sqrt2, center*sqrt2)
};
std::vector<BandLevel> octave_bands(const WelchSpectrum& spectrum, double first_center_hz,
                                    double last_center_hz);

/// Centred 1 ms moving average of x^2.
std::vector<double> power_envelope(const AudioBuffer& signal, double window_seconds = 0.001);

struct EventShape {
  double onset_seconds;  // 10% crossing of the event's rise
  double peak_seconds;
  double rise_seconds;   // 10% to 90% of peak above background
};

/// Analyses the event whose envelope peak is the largest within
/// `search_seconds` of `expected_seconds`. Background is the 10th percentile
/// of the envelope within 100 ms of the expected position.
EventShape measure_event(const AudioBuffer& signal, double expected_seconds,
                         double search_seconds = 0.05);

/// Global onset detector: envelope rises above background + 25% of
/// (global peak - background), re-arms below half that, 50 ms minimum
/// spacing. Returns the 10% rise crossings in seconds.
std::vector<double> onset_positions(const AudioBuffer& signal);

/// Mean |value - target - offset| over entries where target >= floor_db.
/// When `remove_offset` is set the mean difference is subtracted first
/// (shape comparison).
double frame_envelope_deviation(const std::vector<double>& value, const std::vector<double>& target,
                                double floor_db, bool remove_offset);

// ---------------------------------------------------------------------------
// Reports

enum class Comparison { within, at_most, at_least };

struct MetricReport {
  std::string case_name;
  std::string metric;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::within;
  bool pass = false;
  std::string note;
};

MetricReport make_report(std::string case_name, std::string metric, double value, double target,
                         double tolerance, Comparison comparison, std::string note = {});

std::string format_report_line(const MetricReport& report);
std::string report_csv(const std::vector<MetricReport>& reports);

}  // namespace nmstretch::eval
