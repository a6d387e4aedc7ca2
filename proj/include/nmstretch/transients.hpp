#pragma once

// Transient branch: the transient component is cut into events at energy
// onsets and each event is copied, unstretched, to its scaled position.

#include <vector>

#include "nmstretch/audio_buffer.hpp"

namespace nmstretch {

struct TransientDetectParams {
  double frame_seconds = 0.010;     // energy envelope frame
  double hop_seconds = 0.001;       // energy envelope hop
  double threshold_ratio = 4.0;     // onset threshold = ratio * median envelope
  double absolute_floor = 1e-3;     // onset threshold never below this RMS
  double release_ratio = 0.5;       // event ends below threshold * release_ratio
  double pre_onset_seconds = 0.005;
  double max_event_seconds = 0.100;
  double fade_seconds = 0.005;      // raised-cosine fade at both segment edges
  double min_gap_seconds = 0.020;   // minimum distance between onsets
};

void validate(const TransientDetectParams& params);

struct TransientEvent {
  std::size_t onset = 0;   // sample index in the input
  AudioBuffer segment;     // faded excerpt of the transient component
  std::size_t anchor = 0;  // offset of the onset inside `segment`

  std::size_t start() const noexcept { return onset - anchor; }
};

/// RMS envelope of frames [j * hop, j * hop + frame), one value per hop.
std::vector<double> energy_envelope(const AudioBuffer& signal, const TransientDetectParams& params);

/// Onsets are the envelope frames that rise above the threshold after being
/// below it, refined to the largest |sample| inside that frame. An event runs
/// from pre_onset_seconds before the onset until the envelope drops below the
/// release level or max_event_seconds elapse. Segments never overlap; a
/// segment that would run into the next one is cut at its start.
std::vector<TransientEvent> detect_events(const AudioBuffer& transient,
                                          const TransientDetectParams& params);

/// Sums every segment into a zero buffer of `out_length` samples with its
/// anchor at round(alpha * onset). Samples falling outside are dropped.
AudioBuffer reposition_events(const std::vector<TransientEvent>& events, double alpha,
                              std::size_t out_length, int sample_rate);

}  // namespace nmstretch
