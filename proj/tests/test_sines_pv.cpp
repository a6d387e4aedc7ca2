#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nmstretch/error.hpp"
#include "nmstretch/eval.hpp"
#include "nmstretch/sines_pv.hpp"

using namespace nmstretch;
using Catch::Approx;

namespace {

constexpr int kRate = 44100;

double rms(const std::vector<double>& x, std::size_t from, std::size_t to) {
  double e = 0.0;
  for (std::size_t i = from; i < to; ++i) e += x[i] * x[i];
  return std::sqrt(e / static_cast<double>(to - from));
}

struct Peak {
  double frequency;
  double level_db;
};

// Largest spectral peak within +-20 Hz of `near`, from a zero-padded Hann FFT.
Peak peak_near(const AudioBuffer& x, double near) {
  std::size_t size = 1;
  while (size < 4 * x.size()) size <<= 1;
  std::vector<std::complex<double>> data(size);
  for (std::size_t i = 0; i < x.size(); ++i) {
    data[i] = x.samples[i] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / x.size()));
  }
  eval::fft_radix2(data);
  const double bin_hz = static_cast<double>(x.sample_rate) / size;
  const auto lo = static_cast<std::size_t>((near - 20.0) / bin_hz);
  const auto hi = static_cast<std::size_t>((near + 20.0) / bin_hz);
  std::size_t best = lo;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (std::abs(data[k]) > std::abs(data[best])) best = k;
  }
  const double a = std::log(std::abs(data[best - 1])), b = std::log(std::abs(data[best])),
               c = std::log(std::abs(data[best + 1]));
  const double offset = 0.5 * (a - c) / (a - 2.0 * b + c);
  return {(best + offset) * bin_hz, 20.0 * std::log10(std::abs(data[best]))};
}

}  // namespace

TEST_CASE("find_peaks examples", "[sines_pv]") {
  std::vector<double> rising(64);
  for (std::size_t k = 0; k < rising.size(); ++k) rising[k] = static_cast<double>(k);
  auto peaks = find_peaks(rising);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].bin == 63);
  CHECK(peaks[0].region_start == 0);
  CHECK(peaks[0].region_end == 64);

  std::vector<double> spike(64, 0.0);
  spike[20] = 1.0;
  peaks = find_peaks(spike);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].bin == 20);
  CHECK(peaks[0].region_start == 0);
  CHECK(peaks[0].region_end == 64);

  std::vector<double> two(64, 0.0);
  two[10] = 1.0;
  two[30] = 1.0;
  peaks = find_peaks(two);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].bin == 10);
  CHECK(peaks[1].bin == 30);
  CHECK(peaks[0].region_start == 0);
  CHECK(peaks[0].region_end == 11);
  CHECK(peaks[1].region_start == 11);
  CHECK(peaks[1].region_end == 64);
}

TEST_CASE("find_peaks edge cases", "[sines_pv]") {
  CHECK(find_peaks(std::vector<double>{}).empty());
  CHECK(find_peaks(std::vector<double>{0, 5, 0, 0}).empty());
  CHECK(find_peaks(std::vector<double>(32, 1.0)).empty());
  // A plateau is not a strict maximum.
  CHECK(find_peaks(std::vector<double>{0, 0, 3, 3, 0, 0, 0}).empty());
  // Neighbour at distance two must also be smaller.
  const auto close = find_peaks(std::vector<double>{0, 0, 5, 1, 6, 0, 0, 0});
  REQUIRE(close.size() == 1);
  CHECK(close[0].bin == 4);
  // Regions tile the frame.
  std::vector<double> many(200);
  for (std::size_t k = 0; k < many.size(); ++k) many[k] = std::abs(std::sin(0.31 * k)) + 0.01 * k;
  const auto peaks = find_peaks(many);
  REQUIRE(peaks.size() > 3);
  CHECK(peaks.front().region_start == 0);
  CHECK(peaks.back().region_end == many.size());
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    CHECK(peaks[i].region_start == peaks[i - 1].region_end);
    CHECK(peaks[i].region_start > peaks[i - 1].bin);
    CHECK(peaks[i].region_start <= peaks[i].bin);
  }
}

TEST_CASE("Phase vocoder parameters", "[sines_pv]") {
  CHECK_THROWS_AS(validate(PvParams{4096, 1024, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate(PvParams{4096, 4096, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate(PvParams{4095, 1024, 1.0}), ConfigError);
  const auto p = PvParams::for_sample_rate(kRate, 2.0);
  CHECK(p.window_size == 4096);
  CHECK(p.synthesis_hop == 1024);
  CHECK(p.alpha == 2.0);
  CHECK(PvParams::for_sample_rate(96000).window_size % 4 == 0);
}

TEST_CASE("alpha 1 is a near identity", "[sines_pv]") {
  const auto x = eval::two_tone(440.0, 660.0, 1.0, kRate).audio;
  for (auto mode : {PhaseMode::identity_locking, PhaseMode::per_bin}) {
    const auto y = phase_vocoder(x, PvParams::for_sample_rate(kRate, 1.0), mode);
    REQUIRE(y.size() == x.size());
    std::vector<double> diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = y.samples[i] - x.samples[i];
    CHECK(rms(diff, 4096, x.size() - 4096) <= 1e-3 * rms(x.samples, 4096, x.size() - 4096));
  }
}

TEST_CASE("Pitch, length and level are preserved", "[sines_pv]") {
  for (double f : {100.0, 440.0, 1234.5, 5000.0}) {
    const auto x = eval::sine(f, 1.0, kRate).audio;
    for (double alpha : {2.0, 4.0, 8.0}) {
      const auto y = stretch_sines(x, PvParams::for_sample_rate(kRate, alpha));
      INFO("f=" << f << " alpha=" << alpha);
      CHECK(y.size() == stretched_length(x.size(), alpha));
      CHECK(eval::dominant_frequency(y) == Approx(f).margin(1.0));
      const double ratio_db = 20.0 * std::log10(rms(y.samples, 4096, y.size() - 4096) /
                                                rms(x.samples, 0, x.size()));
      CHECK(std::abs(ratio_db) <= 1.0);
    }
  }
}

TEST_CASE("Two tones keep their frequencies and relative level", "[sines_pv]") {
  auto x = eval::two_tone(440.0, 660.0, 1.0, kRate).audio;
  // Unequal levels make the relative-level check meaningful.
  for (std::size_t i = 0; i < x.size(); ++i) {
    x.samples[i] += 0.25 * std::sin(2.0 * std::numbers::pi * 660.0 * i / kRate);
  }
  const auto y = stretch_sines(x, PvParams::for_sample_rate(kRate, 4.0));
  const auto in_low = peak_near(x, 440.0), in_high = peak_near(x, 660.0);
  const auto out_low = peak_near(y, 440.0), out_high = peak_near(y, 660.0);
  CHECK(out_low.frequency == Approx(440.0).margin(1.0));
  CHECK(out_high.frequency == Approx(660.0).margin(1.0));
  const double in_rel = in_high.level_db - in_low.level_db;
  const double out_rel = out_high.level_db - out_low.level_db;
  CHECK(std::abs(out_rel - in_rel) <= 1.0);
}

TEST_CASE("Phase vocoder is deterministic and handles short input", "[sines_pv]") {
  const auto x = eval::two_tone(300.0, 1700.0, 0.5, kRate).audio;
  const auto p = PvParams::for_sample_rate(kRate, 2.7);
  CHECK(stretch_sines(x, p).samples == stretch_sines(x, p).samples);
  CHECK(stretch_sines(AudioBuffer(0, kRate), p).empty());
  const auto tiny = stretch_sines(AudioBuffer(std::vector<double>{0.1, -0.2, 0.3}, kRate), p);
  CHECK(tiny.size() == 8);
  const auto shrink = phase_vocoder(x, PvParams::for_sample_rate(kRate, 0.5), PhaseMode::per_bin);
  CHECK(shrink.size() == stretched_length(x.size(), 0.5));
}
