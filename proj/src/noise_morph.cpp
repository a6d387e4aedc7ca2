#include "nmstretch/noise_morph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "nmstretch/error.hpp"

namespace nmstretch {
namespace {

void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw ConfigError("stretch factor must be finite and positive, got " + std::to_string(alpha));
  }
}

void check_shapes(const LogMagSpectrogram& interp, const ComplexSpectrogram& excitation) {
  if (!interp.values.same_shape(excitation.bins)) {
    throw ConfigError("interpolated spectrogram is " + std::to_string(interp.frames()) + "x" +
                      std::to_string(interp.bin_count()) + " but excitation is " +
                      std::to_string(excitation.frames()) + "x" +
                      std::to_string(excitation.bin_count()));
  }
}

double db_to_magnitude(double db) { return std::pow(10.0, db / 10.0); }

// Repeats the last frame (or drops trailing frames) to reach `frames`.
LogMagSpectrogram hold_frames(const LogMagSpectrogram& interp, std::size_t frames) {
  LogMagSpectrogram out{interp.framing, Grid<double>(frames, interp.bin_count())};
  if (interp.frames() == 0) return out;
  for (std::size_t m = 0; m < frames; ++m) {
    const auto src = interp.values.row(std::min(m, interp.frames() - 1));
    std::copy(src.begin(), src.end(), out.values.row(m).begin());
  }
  return out;
}

}  // namespace

NoiseMorphParams NoiseMorphParams::for_sample_rate(int sample_rate) {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  NoiseMorphParams params;
  const double scaled = 2048.0 * sample_rate / 44100.0;
  const auto halves = std::max<long long>(1, std::llround(scaled / 2.0));
  params.stft.window_size = static_cast<std::size_t>(halves) * 2;
  params.stft.hop_size = params.stft.window_size / 2;
  return params;
}

void validate(const NoiseMorphParams& params) {
  validate(params.stft);
  if (!std::isfinite(params.floor_db)) throw ConfigError("noise floor must be finite");
}

LogMagSpectrogram log_magnitude(const ComplexSpectrogram& spec, double floor_db) {
  const double floor = db_to_magnitude(floor_db);
  LogMagSpectrogram out{spec.framing, Grid<double>(spec.frames(), spec.bin_count())};
  const auto src = spec.bins.flat();
  auto dst = out.values.flat();
  const auto count = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    dst[i] = 10.0 * std::log10(std::max(std::abs(src[i]), floor));
  }
  return out;
}

LogMagSpectrogram lerp_frames(const LogMagSpectrogram& logmag, double alpha) {
  check_alpha(alpha);
  const std::size_t in_frames = logmag.frames();
  const std::size_t out_frames = in_frames == 0 ? 0 : stretched_length(in_frames, alpha);
  LogMagSpectrogram out{logmag.framing, Grid<double>(out_frames, logmag.bin_count())};
  if (out_frames == 0) return out;

  const double last = static_cast<double>(in_frames - 1);
  const auto count = static_cast<std::ptrdiff_t>(out_frames);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < count; ++m) {
    const double tau = std::min(static_cast<double>(m) / alpha, last);
    const auto before = static_cast<std::size_t>(std::floor(tau));
    const std::size_t after = std::min(before + 1, in_frames - 1);
    const double frac = tau - static_cast<double>(before);
    const auto a = logmag.values.row(before);
    const auto b = logmag.values.row(after);
    auto dst = out.values.row(static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = (1.0 - frac) * a[k] + frac * b[k];
  }
  return out;
}

AudioBuffer generate_excitation(std::size_t length, std::uint64_t seed, int sample_rate) {
  AudioBuffer out(length, sample_rate);
  std::mt19937_64 engine(seed);
  // 53-bit uniform in [0, 1); std::uniform_real_distribution is not portable.
  const auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  for (std::size_t n = 0; n < length; n += 2) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out.samples[n] = radius * std::cos(angle);
    if (n + 1 < length) out.samples[n + 1] = radius * std::sin(angle);
  }
  return out;
}

ComplexSpectrogram morph(const LogMagSpectrogram& interp, const ComplexSpectrogram& excitation) {
  check_shapes(interp, excitation);
  ComplexSpectrogram out{excitation.framing, Grid<Complex>(excitation.frames(),
                                                           excitation.bin_count())};
  const auto gain = interp.values.flat();
  const auto src = excitation.bins.flat();
  auto dst = out.bins.flat();
  const auto count = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) dst[i] = src[i] * db_to_magnitude(gain[i]);
  return out;
}

ComplexSpectrogram morph_replace(const LogMagSpectrogram& interp,
                                 const ComplexSpectrogram& excitation) {
  check_shapes(interp, excitation);
  ComplexSpectrogram out{excitation.framing, Grid<Complex>(excitation.frames(),
                                                           excitation.bin_count())};
  const auto gain = interp.values.flat();
  const auto src = excitation.bins.flat();
  auto dst = out.bins.flat();
  const auto count = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const double phase = src[i] == Complex{} ? 0.0 : std::arg(src[i]);
    dst[i] = std::polar(db_to_magnitude(gain[i]), phase);
  }
  return out;
}

ComplexSpectrogram excitation_spectrum(std::size_t out_length, std::size_t frames,
                                       const NoiseMorphParams& params, int sample_rate) {
  validate(params);
  const auto excitation = generate_excitation(out_length, params.seed, sample_rate);
  const auto spec = stft(center_pad(excitation, params.stft).padded, params.stft);
  const double norm = 1.0 / window_energy(params.stft);
  ComplexSpectrogram out{spec.framing, Grid<Complex>(frames, params.stft.bins())};
  const std::size_t kept = std::min(frames, spec.frames());
  for (std::size_t m = 0; m < kept; ++m) {
    const auto src = spec.bins.row(m);
    auto dst = out.bins.row(m);
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] * norm;
  }
  return out;
}

LogMagSpectrogram analyze_noise(const AudioBuffer& noise, double alpha,
                                const NoiseMorphParams& params) {
  validate(params);
  check_alpha(alpha);
  const auto spec = stft(center_pad(noise, params.stft).padded, params.stft);
  return lerp_frames(log_magnitude(spec, params.floor_db), alpha);
}

AudioBuffer synthesize_noise(const LogMagSpectrogram& interp, std::size_t out_length,
                             const NoiseMorphParams& params, MorphVariant variant,
                             int sample_rate) {
  validate(params);
  if (interp.frames() == 0 || out_length == 0) return AudioBuffer(out_length, sample_rate);
  if (interp.bin_count() != params.stft.bins()) {
    throw ConfigError("interpolated spectrogram does not match the noise STFT size");
  }
  const std::size_t pad = params.stft.window_size / 2;
  const std::size_t needed = frame_count(out_length + 2 * pad, params.stft);
  const std::size_t frames = std::max(interp.frames(), needed);
  const auto target = hold_frames(interp, frames);
  const auto excitation = excitation_spectrum(out_length, frames, params, sample_rate);
  const auto shaped = variant == MorphVariant::multiply ? morph(target, excitation)
                                                        : morph_replace(target, excitation);
  return uncenter(istft(shaped, params.stft), pad, out_length);
}

AudioBuffer stretch_noise(const AudioBuffer& noise, double alpha, const NoiseMorphParams& params,
                          MorphVariant variant) {
  validate(noise);
  const auto interp = analyze_noise(noise, alpha, params);
  return synthesize_noise(interp, stretched_length(noise.size(), alpha), params, variant,
                          noise.sample_rate);
}

}  // namespace nmstretch
