#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nmstretch {

/// Mono signal in 64-bit floating point, nominal range +-1.0.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 44100;

  AudioBuffer() = default;
  AudioBuffer(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate(rate) {}
  AudioBuffer(std::size_t length, int rate) : samples(length, 0.0), sample_rate(rate) {}

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_seconds() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  std::span<const double> view() const noexcept { return samples; }
  std::span<double> view() noexcept { return samples; }
};

/// Throws ConfigError if the sample rate is not positive or a sample is NaN/Inf.
void validate(const AudioBuffer& buffer);

/// Copy of `buffer` zero-padded or truncated to `length` samples.
AudioBuffer fit_length(const AudioBuffer& buffer, std::size_t length);

/// round(alpha * length), the length contract shared by every stretching branch.
std::size_t stretched_length(std::size_t length, double alpha);

}  // namespace nmstretch
