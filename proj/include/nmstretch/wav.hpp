#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nmstretch/audio_buffer.hpp"

namespace nmstretch {

enum class SampleFormat { pcm16, pcm24, float32 };

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  SampleFormat format = SampleFormat::pcm16;
};

struct DecodedWav {
  AudioBuffer audio;  // mono; stereo input is downmixed as 0.5 * (L + R)
  WavInfo info;
};

/// Parses a RIFF/WAVE image (PCM16, PCM24 or IEEE float32; 1 or 2 channels).
/// Throws IoError naming the problem for anything else.
DecodedWav decode_wav(std::span<const std::uint8_t> bytes);
DecodedWav read_wav_file(const std::filesystem::path& path);
AudioBuffer read_wav(const std::filesystem::path& path);

struct EncodeStats {
  std::size_t clipped = 0;  // samples outside [-1, 1] clamped before quantisation
};

/// Mono RIFF/WAVE image. Integer formats clip to [-1, 1] and quantise with
/// round(x * 2^(bits-1)), so a PCM code written and read back is unchanged.
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, SampleFormat format,
                                     EncodeStats* stats = nullptr);
EncodeStats write_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
                      SampleFormat format);

}  // namespace nmstretch
