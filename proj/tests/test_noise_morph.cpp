#include <catch_amalgamated.hpp>

#include <cmath>

#include "nmstretch/error.hpp"
#include "nmstretch/eval.hpp"
#include "nmstretch/noise_morph.hpp"

using namespace nmstretch;
using Catch::Approx;

namespace {

constexpr int kRate = 44100;

LogMagSpectrogram logmag(std::size_t frames, std::size_t bins, double value) {
  LogMagSpectrogram l{{2048, 1024, kRate}, Grid<double>(frames, bins)};
  std::fill(l.values.flat().begin(), l.values.flat().end(), value);
  return l;
}

ComplexSpectrogram spectrum(std::size_t frames, std::size_t bins, Complex value) {
  ComplexSpectrogram s{{2048, 1024, kRate}, Grid<Complex>(frames, bins)};
  std::fill(s.bins.flat().begin(), s.bins.flat().end(), value);
  return s;
}

LogMagSpectrogram centred_logmag(const AudioBuffer& x, const NoiseMorphParams& p) {
  return log_magnitude(stft(center_pad(x, p.stft).padded, p.stft), p.floor_db);
}

}  // namespace

TEST_CASE("log_magnitude uses 10 log10 with a floor", "[noise_morph]") {
  auto s = spectrum(1, 3, {});
  s.bins(0, 0) = {1.0, 0.0};
  s.bins(0, 1) = {0.0, 10.0};
  s.bins(0, 2) = {0.0, 0.0};
  const auto l = log_magnitude(s, -120.0);
  CHECK(l.values(0, 0) == Approx(0.0).margin(1e-12));
  CHECK(l.values(0, 1) == Approx(10.0));
  CHECK(l.values(0, 2) == Approx(-120.0));
  CHECK(l.framing == s.framing);
}

TEST_CASE("lerp_frames examples", "[noise_morph]") {
  LogMagSpectrogram two{{2048, 1024, kRate}, Grid<double>(2, 1)};
  two.values(0, 0) = 0.0;
  two.values(1, 0) = 10.0;
  const auto out = lerp_frames(two, 2.0);
  REQUIRE(out.frames() == 4);
  CHECK(out.values(0, 0) == 0.0);
  CHECK(out.values(1, 0) == Approx(5.0));
  CHECK(out.values(2, 0) == 10.0);
  CHECK(out.values(3, 0) == 10.0);

  LogMagSpectrogram ramp{{2048, 1024, kRate}, Grid<double>(5, 2)};
  for (std::size_t i = 0; i < ramp.values.size(); ++i) ramp.values.flat()[i] = 0.37 * i - 1.0;
  CHECK(lerp_frames(ramp, 1.0).values == ramp.values);

  const auto constant = lerp_frames(logmag(7, 3, -12.5), 3.3);
  CHECK(constant.frames() == 23);
  for (double v : constant.values.flat()) CHECK(v == Approx(-12.5));

  CHECK(lerp_frames(logmag(0, 3, 0.0), 4.0).frames() == 0);
  CHECK_THROWS_AS(lerp_frames(two, 0.0), ConfigError);
  CHECK_THROWS_AS(lerp_frames(two, -1.0), ConfigError);
}

TEST_CASE("Excitation is deterministic and standardised", "[noise_morph]") {
  CHECK(generate_excitation(0, 1).empty());
  const auto a = generate_excitation(4096, 99);
  CHECK(a.samples == generate_excitation(4096, 99).samples);
  CHECK(a.samples != generate_excitation(4096, 100).samples);
  // A prefix does not depend on the requested length.
  const auto longer = generate_excitation(8192, 99);
  CHECK(std::equal(a.samples.begin(), a.samples.end(), longer.samples.begin()));

  const auto e = generate_excitation(1'000'000, 3);
  double mean = 0.0;
  for (double v : e.samples) mean += v;
  mean /= e.size();
  double var = 0.0;
  for (double v : e.samples) var += (v - mean) * (v - mean);
  var /= e.size();
  CHECK(std::abs(mean) <= 0.005);
  CHECK(var == Approx(1.0).margin(0.01));
}

TEST_CASE("Normalised excitation bins have unit expected power", "[noise_morph]") {
  const auto p = NoiseMorphParams::for_sample_rate(kRate);
  const auto spec = excitation_spectrum(10 * kRate, 400, p, kRate);
  double power = 0.0;
  std::size_t count = 0;
  for (std::size_t m = 5; m < 400; ++m) {
    for (std::size_t k = 1; k + 1 < spec.bin_count(); ++k) {
      power += std::norm(spec.bins(m, k));
      ++count;
    }
  }
  CHECK(power / count == Approx(1.0).margin(0.01));
}

TEST_CASE("morph examples", "[noise_morph]") {
  const auto exc = spectrum(2, 3, {0.3, -0.4});
  const auto unit = morph(logmag(2, 3, 0.0), exc);
  CHECK(unit.bins == exc.bins);

  auto one = spectrum(1, 1, {0.6, 0.8});
  const auto loud = morph(logmag(1, 1, 20.0), one);
  CHECK(std::abs(loud.bins(0, 0)) == Approx(100.0));
  CHECK(std::arg(loud.bins(0, 0)) == Approx(std::arg(Complex{0.6, 0.8})));

  const auto quiet = morph(logmag(2, 3, -120.0), exc);
  for (std::size_t i = 0; i < quiet.bins.size(); ++i) {
    CHECK(std::abs(quiet.bins.flat()[i]) <= 1e-12 * std::abs(exc.bins.flat()[i]) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(morph(logmag(2, 4, 0.0), exc), ConfigError);
  CHECK_THROWS_AS(morph(logmag(3, 3, 0.0), exc), ConfigError);
}

TEST_CASE("morph_replace examples", "[noise_morph]") {
  auto seven = spectrum(1, 1, std::polar(7.0, 1.1));
  const auto out = morph_replace(logmag(1, 1, 0.0), seven);
  CHECK(std::abs(out.bins(0, 0)) == Approx(1.0));
  CHECK(std::arg(out.bins(0, 0)) == Approx(1.1));

  const auto zero = morph_replace(logmag(1, 1, 20.0), spectrum(1, 1, {}));
  CHECK(zero.bins(0, 0) == Complex{100.0, 0.0});

  for (double theta : {-2.5, 0.3, 3.0}) {
    const auto r = morph_replace(logmag(1, 1, 20.0), spectrum(1, 1, std::polar(0.01, theta)));
    CHECK(std::abs(r.bins(0, 0) - std::polar(100.0, theta)) < 1e-10);
  }
  CHECK_THROWS_AS(morph_replace(logmag(1, 2, 0.0), seven), ConfigError);
}

TEST_CASE("stretch_noise on silence stays silent", "[noise_morph]") {
  const auto p = NoiseMorphParams::for_sample_rate(kRate);
  const auto y = stretch_noise(AudioBuffer(20000, kRate), 2.5, p, MorphVariant::multiply);
  CHECK(y.size() == 50000);
  double e = 0.0;
  for (double v : y.samples) e += v * v;
  CHECK(std::sqrt(e / y.size()) <= std::pow(10.0, p.floor_db / 20.0) * 10.0);
}

TEST_CASE("stretch_noise length and determinism", "[noise_morph]") {
  auto p = NoiseMorphParams::for_sample_rate(kRate);
  p.seed = 5;
  const auto x = eval::shaped_noise(-3.0, 0.5, kRate, 1).audio;
  for (double alpha : {0.5, 1.0, 1.37, 2.0, 4.0}) {
    for (auto variant : {MorphVariant::multiply, MorphVariant::replace}) {
      const auto a = stretch_noise(x, alpha, p, variant);
      CHECK(a.size() == stretched_length(x.size(), alpha));
      CHECK(a.samples == stretch_noise(x, alpha, p, variant).samples);
    }
  }
  CHECK(stretch_noise(x, 2.0, p, MorphVariant::multiply).samples !=
        stretch_noise(x, 2.0, p, MorphVariant::replace).samples);
  CHECK(stretch_noise(AudioBuffer(0, kRate), 2.0, p, MorphVariant::multiply).empty());
}

TEST_CASE("At alpha 1 the output envelope follows the input envelope", "[noise_morph]") {
  const auto x = eval::shaped_noise(-6.0, 2.0, kRate, 31).audio;
  auto p = NoiseMorphParams::for_sample_rate(kRate);
  const auto target = centred_logmag(x, p);
  std::vector<double> mean(target.values.size(), 0.0);
  constexpr int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    p.seed = static_cast<std::uint64_t>(s);
    const auto y = stretch_noise(x, 1.0, p, MorphVariant::multiply);
    const auto spec = stft(center_pad(y, p.stft).padded, p.stft);
    REQUIRE(spec.bins.size() == mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += std::abs(spec.bins.flat()[i]) / seeds;
  }
  for (auto& v : mean) v = 10.0 * std::log10(std::max(v, 1e-300));
  const auto& t = target.values.flat();
  const double dev = eval::frame_envelope_deviation(mean, {t.begin(), t.end()}, -60.0, false);
  CHECK(dev <= 1.5);
}

TEST_CASE("Octave-band spectrum survives stretching by 4", "[noise_morph]") {
  const auto x = eval::shaped_noise(-3.0, 2.0, kRate, 32).audio;
  auto p = NoiseMorphParams::for_sample_rate(kRate);
  p.seed = 3;
  const auto y = stretch_noise(x, 4.0, p, MorphVariant::multiply);
  const auto in = eval::octave_bands(eval::welch(x), 125.0, 16000.0);
  const auto out = eval::octave_bands(eval::welch(y), 125.0, 16000.0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    INFO("band " << in[i].center_hz);
    CHECK(std::abs(out[i].level_db - in[i].level_db) <= 2.0);
  }
}

TEST_CASE("Noise parameters are validated", "[noise_morph]") {
  NoiseMorphParams p;
  p.stft.hop_size = 0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  CHECK(NoiseMorphParams::for_sample_rate(kRate).stft.window_size == 2048);
  CHECK(NoiseMorphParams::for_sample_rate(kRate).stft.hop_size == 1024);
  CHECK(NoiseMorphParams::for_sample_rate(kRate).floor_db == -120.0);
}
