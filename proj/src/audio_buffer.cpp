#include "nmstretch/audio_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmstretch/error.hpp"

namespace nmstretch {

void validate(const AudioBuffer& buffer) {
  if (buffer.sample_rate <= 0) {
    throw ConfigError("sample rate must be positive, got " + std::to_string(buffer.sample_rate));
  }
  const auto bad = std::find_if(buffer.samples.begin(), buffer.samples.end(),
                                [](double v) { return !std::isfinite(v); });
  if (bad != buffer.samples.end()) {
    throw ConfigError("non-finite sample at index " +
                      std::to_string(bad - buffer.samples.begin()));
  }
}

AudioBuffer fit_length(const AudioBuffer& buffer, std::size_t length) {
  AudioBuffer out(length, buffer.sample_rate);
  std::copy_n(buffer.samples.begin(), std::min(length, buffer.size()), out.samples.begin());
  return out;
}

std::size_t stretched_length(std::size_t length, double alpha) {
  return static_cast<std::size_t>(std::llround(alpha * static_cast<double>(length)));
}

}  // namespace nmstretch
