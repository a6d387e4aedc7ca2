#pragma once

// Phase vocoder time stretching. Identity phase locking rotates every bin in a
// peak's region of influence by the phase increment of that peak; per-bin
// propagation (the plain phase vocoder) advances each bin independently.

#include <vector>

#include "nmstretch/audio_buffer.hpp"
#include "nmstretch/core_dsp.hpp"

namespace nmstretch {

struct PvParams {
  std::size_t window_size = 4096;
  std::size_t synthesis_hop = 1024;
  double alpha = 1.0;

  /// 4096/1024 at 44.1 kHz, scaled to `sample_rate`.
  static PvParams for_sample_rate(int sample_rate, double alpha = 1.0);
};

void validate(const PvParams& params);

struct SpectralPeak {
  std::size_t bin;
  std::size_t region_start;  // inclusive
  std::size_t region_end;    // exclusive
};

/// A bin is a peak when it is strictly greater than each of its (up to) two
/// neighbours on both sides; neighbours outside the frame are ignored.
/// Regions split [0, K) at the lowest bin between adjacent peaks (ties go to
/// the lower bin, which starts the upper peak's region). Frames shorter than
/// five bins have no peaks.
std::vector<SpectralPeak> find_peaks(std::span<const double> magnitude);

enum class PhaseMode { identity_locking, per_bin };

/// Analysis frames are taken at round(m * synthesis_hop / alpha) on the
/// centred signal; output length is round(alpha * len(x)).
AudioBuffer phase_vocoder(const AudioBuffer& x, const PvParams& params, PhaseMode mode);

/// Sines branch: phase vocoder with identity phase locking.
AudioBuffer stretch_sines(const AudioBuffer& sines, const PvParams& params);

}  // namespace nmstretch
