#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "nmstretch/audio_buffer.hpp"
#include "nmstretch/noise_morph.hpp"
#include "nmstretch/sines_pv.hpp"
#include "nmstretch/stn.hpp"
#include "nmstretch/transients.hpp"

namespace nmstretch {

enum class StretchMode {
  nm,  // decomposition + noise morphing (multiply)
  ni,  // decomposition + noise morphing with magnitude replacement
  nd,  // noise morphing on the whole mixture, no decomposition
  an,  // plain phase vocoder on the whole mixture
};

std::string_view to_string(StretchMode mode);
/// Accepts "nm", "ni", "nd", "an" in any letter case.
std::optional<StretchMode> parse_mode(std::string_view text);

struct StretchConfig {
  double alpha = 1.0;
  StretchMode mode = StretchMode::nm;
  std::uint64_t seed = 0;
  StnConfig stn;
  NoiseMorphParams noise;
  PvParams pv;
  TransientDetectParams transients;

  /// Defaults with every sample-denominated size scaled to `sample_rate`.
  static StretchConfig defaults(int sample_rate);
};

void validate(const StretchConfig& config);

struct StretchResult {
  AudioBuffer output;
  // Populated for the decomposing modes (nm, ni).
  std::optional<StnComponents> components;
  std::optional<StnComponents> stretched;
  std::vector<TransientEvent> events;
};

/// Runs the configured mode. Every branch is fitted to round(alpha * len(x))
/// samples; the decomposing modes sum sines, transients and noise in that order.
StretchResult time_stretch_detailed(const AudioBuffer& x, const StretchConfig& config);
AudioBuffer time_stretch(const AudioBuffer& x, const StretchConfig& config);

/// Plain phase vocoder (per-bin phase propagation, no phase locking).
AudioBuffer time_stretch_anchor(const AudioBuffer& x, double alpha, const PvParams& params);

}  // namespace nmstretch
