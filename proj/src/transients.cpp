#include "nmstretch/transients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nmstretch/error.hpp"

namespace nmstretch {
namespace {

std::size_t to_samples(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + values[mid]);
}

double raised_cosine(std::size_t i, std::size_t length) {
  return 0.5 - 0.5 * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) /
                              static_cast<double>(length));
}

// The fade-in stays inside the pre-onset part so the onset itself is never
// attenuated (an event at the very start of the signal gets none).
void apply_fades(std::vector<double>& segment, std::size_t anchor, std::size_t fade) {
  const std::size_t fade_in = std::min(fade, anchor);
  for (std::size_t i = 0; i < fade_in; ++i) segment[i] *= raised_cosine(i, fade_in);
  const std::size_t fade_out = std::min(fade, segment.size() - anchor);
  for (std::size_t i = 0; i < fade_out; ++i) {
    segment[segment.size() - 1 - i] *= raised_cosine(i, fade_out);
  }
}

struct Bounds {
  std::size_t onset;
  std::size_t start;
  std::size_t end;
};

}  // namespace

void validate(const TransientDetectParams& p) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.frame_seconds) || !positive(p.hop_seconds) || !positive(p.threshold_ratio) ||
      !positive(p.max_event_seconds)) {
    throw ConfigError("transient detection frame, hop, ratio and event length must be positive");
  }
  if (!(p.absolute_floor >= 0.0) || !(p.pre_onset_seconds >= 0.0) || !(p.fade_seconds >= 0.0) ||
      !(p.min_gap_seconds >= 0.0)) {
    throw ConfigError("transient detection floor, pre-onset, fade and gap must be non-negative");
  }
  if (!(p.release_ratio > 0.0 && p.release_ratio <= 1.0)) {
    throw ConfigError("transient release ratio must be in (0, 1]");
  }
}

std::vector<double> energy_envelope(const AudioBuffer& signal,
                                    const TransientDetectParams& params) {
  const std::size_t frame = std::max<std::size_t>(1, to_samples(params.frame_seconds, signal.sample_rate));
  const std::size_t hop = std::max<std::size_t>(1, to_samples(params.hop_seconds, signal.sample_rate));
  std::vector<double> envelope;
  if (signal.empty()) return envelope;
  const std::size_t frames = (signal.size() + hop - 1) / hop;
  envelope.resize(frames);
  for (std::size_t j = 0; j < frames; ++j) {
    const std::size_t lo = j * hop;
    const std::size_t hi = std::min(signal.size(), lo + frame);
    double energy = 0.0;
    for (std::size_t n = lo; n < hi; ++n) energy += signal.samples[n] * signal.samples[n];
    envelope[j] = std::sqrt(energy / static_cast<double>(frame));
  }
  return envelope;
}

std::vector<TransientEvent> detect_events(const AudioBuffer& transient,
                                          const TransientDetectParams& params) {
  validate(transient);
  validate(params);
  std::vector<TransientEvent> events;
  const auto envelope = energy_envelope(transient, params);
  if (envelope.empty()) return events;

  const int rate = transient.sample_rate;
  const std::size_t frame = std::max<std::size_t>(1, to_samples(params.frame_seconds, rate));
  const std::size_t hop = std::max<std::size_t>(1, to_samples(params.hop_seconds, rate));
  const std::size_t pre = to_samples(params.pre_onset_seconds, rate);
  const std::size_t max_len = std::max<std::size_t>(1, to_samples(params.max_event_seconds, rate));
  const std::size_t gap = to_samples(params.min_gap_seconds, rate);
  const double on = std::max(median_of(envelope) * params.threshold_ratio, params.absolute_floor);
  const double off = on * params.release_ratio;
  const std::size_t length = transient.size();

  std::vector<Bounds> bounds;
  bool below = true;
  for (std::size_t j = 0; j < envelope.size(); ++j) {
    if (envelope[j] < on) {
      below = true;
      continue;
    }
    if (!below) continue;
    below = false;

    // The first frame above threshold may only hold the leading edge (or
    // analysis pre-echo), so the peak search also covers the next frame.
    const std::size_t lo = j * hop;
    const std::size_t hi = std::min(length, lo + 2 * frame);
    std::size_t onset = lo;
    for (std::size_t n = lo; n < hi; ++n) {
      if (std::abs(transient.samples[n]) > std::abs(transient.samples[onset])) onset = n;
    }
    if (!bounds.empty() && onset < bounds.back().onset + gap) continue;

    std::size_t end = std::min(length, onset + max_len);
    for (std::size_t i = j + 1; i < envelope.size(); ++i) {
      if (i * hop >= end) break;
      if (envelope[i] < off) {
        end = std::min(end, std::max(onset + 1, i * hop + frame));
        break;
      }
    }
    const std::size_t start = onset >= pre ? onset - pre : 0;
    if (!bounds.empty() && bounds.back().end > start) {
      bounds.back().end = std::max(bounds.back().onset + 1, start);
    }
    bounds.push_back({onset, std::max(start, bounds.empty() ? 0 : bounds.back().end), end});
  }

  const std::size_t fade = to_samples(params.fade_seconds, rate);
  events.reserve(bounds.size());
  for (const auto& b : bounds) {
    std::vector<double> segment(transient.samples.begin() + static_cast<std::ptrdiff_t>(b.start),
                                transient.samples.begin() + static_cast<std::ptrdiff_t>(b.end));
    apply_fades(segment, b.onset - b.start, fade);
    events.push_back({b.onset, AudioBuffer(std::move(segment), rate), b.onset - b.start});
  }
  return events;
}

AudioBuffer reposition_events(const std::vector<TransientEvent>& events, double alpha,
                              std::size_t out_length, int sample_rate) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw ConfigError("stretch factor must be finite and positive");
  }
  AudioBuffer out(out_length, sample_rate);
  for (const auto& event : events) {
    const auto target = static_cast<std::ptrdiff_t>(std::llround(alpha * static_cast<double>(event.onset)));
    const std::ptrdiff_t begin = target - static_cast<std::ptrdiff_t>(event.anchor);
    for (std::size_t i = 0; i < event.segment.size(); ++i) {
      const std::ptrdiff_t n = begin + static_cast<std::ptrdiff_t>(i);
      if (n < 0 || n >= static_cast<std::ptrdiff_t>(out_length)) continue;
      out.samples[static_cast<std::size_t>(n)] += event.segment.samples[i];
    }
  }
  return out;
}

}  // namespace nmstretch
