#pragma once

// Serial reference versions of the parallel kernels in core_dsp.hpp.
// Outputs must match the parallel kernels bit for bit; tests and the
// benchmark compare the two.

#include "nmstretch/core_dsp.hpp"

namespace nmstretch::reference {

ComplexSpectrogram stft(const AudioBuffer& signal, const StftParams& params);

AudioBuffer istft(const ComplexSpectrogram& spec, const StftParams& params,
                  std::optional<std::size_t> target_length = std::nullopt);

MagnitudeSpectrogram median_filter_axis(const MagnitudeSpectrogram& mag, Axis axis,
                                        std::size_t length);

}  // namespace nmstretch::reference
