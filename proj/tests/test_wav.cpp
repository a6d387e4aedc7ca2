#include <catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "nmstretch/error.hpp"
#include "nmstretch/wav.hpp"

using namespace nmstretch;
using Catch::Approx;

namespace {

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

// Hand-built PCM16 image with an extra chunk before "data".
std::vector<std::uint8_t> pcm16_image(const std::vector<std::int16_t>& frames, int channels) {
  std::vector<std::uint8_t> b;
  const auto data_size = static_cast<std::uint32_t>(frames.size() * 2);
  put_tag(b, "RIFF");
  put_u32(b, 4 + 24 + 12 + 8 + data_size);
  put_tag(b, "WAVE");
  put_tag(b, "fmt ");
  put_u32(b, 16);
  put_u16(b, 1);
  put_u16(b, static_cast<std::uint16_t>(channels));
  put_u32(b, 44100);
  put_u32(b, 44100u * 2 * channels);
  put_u16(b, static_cast<std::uint16_t>(2 * channels));
  put_u16(b, 16);
  put_tag(b, "LIST");
  put_u32(b, 4);
  put_tag(b, "INFO");
  put_tag(b, "data");
  put_u32(b, data_size);
  for (auto v : frames) put_u16(b, static_cast<std::uint16_t>(v));
  return b;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nmstretch_wav_" + name);
}

}  // namespace

TEST_CASE("PCM16 decoding normalises by 32768", "[wav]") {
  const auto d = decode_wav(pcm16_image({32767, -32768, 0, 16384}, 1));
  CHECK(d.info.sample_rate == 44100);
  CHECK(d.info.channels == 1);
  CHECK(d.info.format == SampleFormat::pcm16);
  REQUIRE(d.audio.size() == 4);
  CHECK(d.audio.samples[0] == Approx(32767.0 / 32768.0));
  CHECK(d.audio.samples[1] == -1.0);
  CHECK(d.audio.samples[3] == 0.5);
}

TEST_CASE("Stereo is downmixed", "[wav]") {
  const auto same = decode_wav(pcm16_image({100, 100, -2000, -2000, 7, 7}, 2));
  REQUIRE(same.audio.size() == 3);
  CHECK(same.info.channels == 2);
  CHECK(same.audio.samples[1] == -2000.0 / 32768.0);
  const auto mixed = decode_wav(pcm16_image({1000, 3000}, 2));
  CHECK(mixed.audio.samples[0] == 2000.0 / 32768.0);
}

TEST_CASE("Round trips", "[wav]") {
  AudioBuffer x(88200, 48000);
  for (std::size_t i = 0; i < x.size(); ++i) x.samples[i] = std::sin(0.001 * i * i) * 0.9;
  const auto path = temp_path("float.wav");
  write_wav(x, path, SampleFormat::float32);
  const auto y = read_wav_file(path);
  CHECK(y.info.sample_rate == 48000);
  CHECK(y.info.format == SampleFormat::float32);
  REQUIRE(y.audio.size() == 88200);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(y.audio.samples[i] == static_cast<double>(static_cast<float>(x.samples[i])));
  }
  // A decoded float file re-encodes to the same bytes.
  CHECK(encode_wav(y.audio, SampleFormat::float32) == encode_wav(x, SampleFormat::float32));

  for (auto [format, bits] : {std::pair{SampleFormat::pcm16, 16}, std::pair{SampleFormat::pcm24, 24}}) {
    const auto bytes = encode_wav(x, format);
    const auto d = decode_wav(bytes);
    CHECK(d.info.format == format);
    const double step = std::ldexp(1.0, -(bits - 1));
    for (std::size_t i = 0; i < x.size(); i += 97) {
      CHECK(std::abs(d.audio.samples[i] - x.samples[i]) <= 0.5 * step + 1e-15);
    }
    // Decoded PCM is exactly representable, so it encodes to the same image.
    CHECK(encode_wav(d.audio, format) == bytes);
  }
  std::filesystem::remove(path);
}

TEST_CASE("Clipping is counted", "[wav]") {
  EncodeStats stats;
  const auto bytes = encode_wav(AudioBuffer({1.5, -3.0, 0.25, 1.0}, 44100), SampleFormat::pcm16, &stats);
  CHECK(stats.clipped == 2);
  const auto d = decode_wav(bytes);
  CHECK(d.audio.samples[0] == 32767.0 / 32768.0);
  CHECK(d.audio.samples[1] == -1.0);
  CHECK(d.audio.samples[3] == 32767.0 / 32768.0);

  EncodeStats none;
  encode_wav(AudioBuffer(std::vector<double>{1.5}, 44100), SampleFormat::float32, &none);
  CHECK(none.clipped == 0);
}

TEST_CASE("Empty buffers make valid files", "[wav]") {
  const auto bytes = encode_wav(AudioBuffer(0, 22050), SampleFormat::pcm24);
  CHECK(bytes.size() == 44);
  const auto d = decode_wav(bytes);
  CHECK(d.audio.empty());
  CHECK(d.info.sample_rate == 22050);
}

TEST_CASE("A short data chunk keeps its whole frames", "[wav]") {
  auto truncated = pcm16_image({1, 2, 3, 4}, 1);
  truncated.resize(truncated.size() - 3);
  const auto d = decode_wav(truncated);
  REQUIRE(d.audio.size() == 2);
  CHECK(d.audio.samples[1] == 2.0 / 32768.0);
}

TEST_CASE("Malformed input is an I/O error", "[wav]") {
  CHECK_THROWS_AS(decode_wav(std::vector<std::uint8_t>{}), IoError);
  CHECK_THROWS_AS(decode_wav(std::vector<std::uint8_t>(100, 0)), IoError);
  auto header_only = pcm16_image({1, 2, 3, 4}, 1);
  header_only.resize(30);
  CHECK_THROWS_AS(decode_wav(header_only), IoError);
  auto eight_bit = pcm16_image({1, 2}, 1);
  eight_bit[34] = 8;
  CHECK_THROWS_WITH(decode_wav(eight_bit), Catch::Matchers::ContainsSubstring("unsupported"));
  CHECK_THROWS_AS(read_wav(temp_path("does_not_exist.wav")), IoError);
  CHECK_THROWS_AS(write_wav(AudioBuffer(4, 44100), "/nonexistent_dir/x.wav", SampleFormat::pcm16),
                  IoError);
}
