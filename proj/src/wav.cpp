#include "nmstretch/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "nmstretch/error.hpp"
#include "nmstretch/log.hpp"

namespace nmstretch {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }
  void seek(std::size_t pos) { pos_ = std::min(pos, bytes_.size()); }

  std::uint32_t u32() {
    require(4);
    const std::uint32_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8) | (bytes_[pos_ + 2] << 16) |
                            (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    require(2);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag() {
    require(4);
    std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }

 private:
  void require(std::size_t n) const {
    if (!has(n)) throw IoError("truncated WAV file");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string describe(std::uint16_t tag, std::uint16_t bits, std::uint16_t channels) {
  return "format tag " + std::to_string(tag) + ", " + std::to_string(bits) + " bits, " +
         std::to_string(channels) + " channel(s)";
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::int32_t quantize(double v, int bits, std::size_t& clipped) {
  if (v > 1.0 || v < -1.0) {
    ++clipped;
    v = std::clamp(v, -1.0, 1.0);
  }
  const double scale = std::ldexp(1.0, bits - 1);
  const auto q = static_cast<std::int64_t>(std::llround(v * scale));
  return static_cast<std::int32_t>(
      std::clamp<std::int64_t>(q, -static_cast<std::int64_t>(scale), static_cast<std::int64_t>(scale) - 1));
}

}  // namespace

DecodedWav decode_wav(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (!r.has(12) || r.tag() != "RIFF") throw IoError("not a RIFF file");
  r.u32();
  if (r.tag() != "WAVE") throw IoError("RIFF file is not WAVE");

  bool have_fmt = false;
  std::uint16_t tag = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  while (r.has(8)) {
    const auto id = r.tag();
    const std::uint32_t size = r.u32();
    const std::size_t body = r.position();
    const std::size_t available = std::min<std::size_t>(size, r.remaining());
    if (id == "fmt ") {
      if (size < 16) throw IoError("fmt chunk too short");
      tag = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();
      block_align = r.u16();
      bits = r.u16();
      if (tag == kFormatExtensible) {
        if (size < 40) throw IoError("extensible fmt chunk too short");
        r.u16();
        r.u16();
        r.u32();
        tag = r.u16();  // first two bytes of the sub-format GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.subspan(body, available);
      have_data = true;
    }
    r.seek(body + available + (available % 2));
  }
  if (!have_fmt) throw IoError("WAV file has no fmt chunk");
  if (!have_data) throw IoError("WAV file has no data chunk");

  SampleFormat format;
  if (tag == kFormatPcm && bits == 16) {
    format = SampleFormat::pcm16;
  } else if (tag == kFormatPcm && bits == 24) {
    format = SampleFormat::pcm24;
  } else if (tag == kFormatFloat && bits == 32) {
    format = SampleFormat::float32;
  } else {
    throw IoError("unsupported WAV encoding (" + describe(tag, bits, channels) +
                  "); expected PCM16, PCM24 or float32");
  }
  if (channels < 1 || channels > 2) {
    throw IoError("unsupported channel count (" + describe(tag, bits, channels) + ")");
  }
  if (rate == 0 || rate > 1'000'000) throw IoError("invalid sample rate " + std::to_string(rate));
  const std::size_t width = bits / 8;
  if (block_align != width * channels) throw IoError("inconsistent WAV block alignment");

  const std::size_t frames = data.size() / block_align;
  DecodedWav out{AudioBuffer(frames, static_cast<int>(rate)),
                 {static_cast<int>(rate), channels, format}};
  const auto sample_at = [&](std::size_t offset) -> double {
    const auto* p = data.data() + offset;
    switch (format) {
      case SampleFormat::pcm16:
        return static_cast<std::int16_t>(p[0] | (p[1] << 8)) / 32768.0;
      case SampleFormat::pcm24: {
        std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
        if (v & 0x800000) v -= 0x1000000;
        return v / 8388608.0;
      }
      case SampleFormat::float32: {
        const std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) |
                                (static_cast<std::uint32_t>(p[3]) << 24);
        return static_cast<double>(std::bit_cast<float>(u));
      }
    }
    return 0.0;
  };
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t base = i * block_align;
    double v = sample_at(base);
    if (channels == 2) v = 0.5 * (v + sample_at(base + width));
    if (!std::isfinite(v)) throw IoError("WAV file contains non-finite samples");
    out.audio.samples[i] = v;
  }
  if (channels == 2) log_warning("stereo input downmixed to mono as 0.5 * (L + R)");
  return out;
}

DecodedWav read_wav_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

AudioBuffer read_wav(const std::filesystem::path& path) { return read_wav_file(path).audio; }

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, SampleFormat format,
                                     EncodeStats* stats) {
  const std::uint16_t bits = format == SampleFormat::pcm16 ? 16 : format == SampleFormat::pcm24 ? 24 : 32;
  const std::uint16_t tag = format == SampleFormat::float32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t width = bits / 8u;
  const std::uint64_t data_size = static_cast<std::uint64_t>(buffer.size()) * width;
  if (data_size > 0xFFFFFFFFull - 36) throw IoError("audio too long for a WAV file");

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, static_cast<std::uint32_t>(36 + data_size));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * width);
  put_u16(out, static_cast<std::uint16_t>(width));
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_size));

  EncodeStats local;
  for (double v : buffer.samples) {
    switch (format) {
      case SampleFormat::pcm16: {
        const auto q = static_cast<std::uint32_t>(quantize(v, 16, local.clipped));
        put_u16(out, static_cast<std::uint16_t>(q & 0xFFFF));
        break;
      }
      case SampleFormat::pcm24: {
        const auto q = static_cast<std::uint32_t>(quantize(v, 24, local.clipped));
        for (int i = 0; i < 3; ++i) out.push_back(static_cast<std::uint8_t>((q >> (8 * i)) & 0xFF));
        break;
      }
      case SampleFormat::float32:
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        break;
    }
  }
  if (local.clipped > 0) {
    log_info(std::to_string(local.clipped) + " sample(s) clipped to [-1, 1]");
  }
  if (stats) *stats = local;
  return out;
}

EncodeStats write_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
                      SampleFormat format) {
  EncodeStats stats;
  const auto bytes = encode_wav(buffer, format, &stats);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
  return stats;
}

}  // namespace nmstretch
