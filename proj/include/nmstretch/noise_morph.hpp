#pragma once

// Noise morphing: time-stretches a noise signal by linearly interpolating its
// log-magnitude STFT frames and imposing the interpolated magnitudes on the
// STFT of a freshly generated white-noise excitation of the output length.
// Because every synthesis frame is cut from the same excitation signal,
// overlapping frames stay correlated and overlap-add introduces no frame-rate
// modulation.

#include <cstdint>

#include "nmstretch/audio_buffer.hpp"
#include "nmstretch/core_dsp.hpp"

namespace nmstretch {

/// Log-magnitude spectrogram, values in dB as 10*log10(|X|).
struct LogMagSpectrogram {
  Framing framing;
  Grid<double> values;

  std::size_t frames() const noexcept { return values.rows(); }
  std::size_t bin_count() const noexcept { return values.cols(); }
};

struct NoiseMorphParams {
  StftParams stft{2048, 1024, WindowKind::hann};
  std::uint64_t seed = 0;
  double floor_db = -120.0;

  /// 2048/1024 at 44.1 kHz (46 ms / 23 ms), scaled to `sample_rate`.
  static NoiseMorphParams for_sample_rate(int sample_rate);
};

void validate(const NoiseMorphParams& params);

enum class MorphVariant {
  multiply,  // excitation spectrum times interpolated magnitude
  replace,   // interpolated magnitude with the excitation phase
};

LogMagSpectrogram log_magnitude(const ComplexSpectrogram& spec, double floor_db);

/// Output frame m reads input position tau = min(m / alpha, M - 1) and blends
/// frames floor(tau) and ceil(tau). Produces round(alpha * M) frames.
LogMagSpectrogram lerp_frames(const LogMagSpectrogram& logmag, double alpha);

/// Standard Gaussian samples from a 64-bit Mersenne Twister seeded with
/// `seed`, transformed with Box-Muller. Generated sequentially, so the output
/// depends only on (length, seed).
AudioBuffer generate_excitation(std::size_t length, std::uint64_t seed, int sample_rate = 44100);

/// Element-wise product of the (window-energy normalised) excitation spectrum
/// and 10^(interp / 10).
ComplexSpectrogram morph(const LogMagSpectrogram& interp, const ComplexSpectrogram& excitation);

/// Interpolated magnitude with the excitation's phase. A zero excitation bin
/// is given phase 0.
ComplexSpectrogram morph_replace(const LogMagSpectrogram& interp,
                                 const ComplexSpectrogram& excitation);

/// STFT of the excitation for `out_length` output samples, divided by the
/// window energy and fitted to `frames` frames (zero frames appended or
/// trailing frames dropped). Uses the centred framing of stretch_noise().
ComplexSpectrogram excitation_spectrum(std::size_t out_length, std::size_t frames,
                                       const NoiseMorphParams& params, int sample_rate);

/// Analysis half of stretch_noise(): centred STFT, log magnitude and frame
/// interpolation.
LogMagSpectrogram analyze_noise(const AudioBuffer& noise, double alpha,
                                const NoiseMorphParams& params);

/// Synthesis half of stretch_noise(): excitation, morphing and inverse STFT,
/// trimmed to `out_length` samples. `interp` is held at its last frame when
/// the excitation needs more frames.
AudioBuffer synthesize_noise(const LogMagSpectrogram& interp, std::size_t out_length,
                             const NoiseMorphParams& params, MorphVariant variant,
                             int sample_rate);

/// Full noise branch. Output length is round(alpha * len(noise)).
AudioBuffer stretch_noise(const AudioBuffer& noise, double alpha, const NoiseMorphParams& params,
                          MorphVariant variant);

}  // namespace nmstretch
