#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nmstretch/acceptance.hpp"
#include "nmstretch/error.hpp"
#include "nmstretch/eval.hpp"

using namespace nmstretch;
using namespace nmstretch::eval;
using Catch::Approx;

TEST_CASE("Generators", "[eval]") {
  const auto s = sine(440.0, 1.0, 44100);
  REQUIRE(s.audio.size() == 44100);
  int crossings = 0;
  for (std::size_t i = 1; i < s.audio.size(); ++i) {
    if ((s.audio.samples[i - 1] < 0.0) != (s.audio.samples[i] < 0.0)) ++crossings;
  }
  CHECK(std::abs(crossings - 880) <= 2);

  const auto clicks = click_train(0.25, 2.0, 44100, 1);
  REQUIRE(clicks.onsets.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(clicks.onsets[k] == k * 11025);
    CHECK(clicks.audio.samples[k * 11025] == Approx(0.8));
  }

  CHECK(click_plus_hiss(2.0, 44100, 1).onsets.size() == 6);
  CHECK(two_tone(440.0, 660.0, 1.0, 44100).frequencies == std::vector<double>{440.0, 660.0});
  CHECK(shaped_noise(-3.0, 1.0, 44100, 5).audio.samples == shaped_noise(-3.0, 1.0, 44100, 5).audio.samples);
  CHECK(corpus().size() == 5);

  CHECK_THROWS_AS(sine(22050.0, 1.0, 44100), ConfigError);
  CHECK_THROWS_AS(sine(30000.0, 1.0, 44100), ConfigError);
  CHECK_THROWS_AS(two_tone(440.0, 25000.0, 1.0, 44100), ConfigError);
  CHECK_THROWS_AS(sine(440.0, 0.0, 44100), ConfigError);
  CHECK_THROWS_AS(click_train(0.0, 1.0, 44100, 1), ConfigError);
}

TEST_CASE("Shaped noise follows its slope", "[eval]") {
  const auto x = shaped_noise(-6.0, 4.0, 44100, 9, 0.1);
  double rms = 0.0;
  for (double v : x.audio.samples) rms += v * v;
  CHECK(std::sqrt(rms / x.audio.size()) == Approx(0.1));
  const auto bands = octave_bands(welch(x.audio), 125.0, 8000.0);
  // Least-squares slope of band level against octave index.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    mx += i;
    my += bands[i].level_db;
  }
  mx /= bands.size();
  my /= bands.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    sxy += (i - mx) * (bands[i].level_db - my);
    sxx += (i - mx) * (i - mx);
  }
  CHECK(sxy / sxx == Approx(-6.0).margin(1.0));
}

TEST_CASE("Radix-2 FFT matches a direct DFT", "[eval]") {
  std::vector<std::complex<double>> data(32);
  for (std::size_t n = 0; n < data.size(); ++n) data[n] = {std::cos(0.3 * n * n), std::sin(1.7 * n)};
  auto spectrum = data;
  fft_radix2(spectrum);
  for (std::size_t k = 0; k < 32; ++k) {
    std::complex<double> sum{};
    for (std::size_t n = 0; n < 32; ++n) sum += data[n] * std::polar(1.0, -2.0 * std::numbers::pi * k * n / 32.0);
    CHECK(std::abs(spectrum[k] - sum) < 1e-12);
  }
  fft_radix2(spectrum, true);
  for (std::size_t n = 0; n < 32; ++n) CHECK(std::abs(spectrum[n] - data[n]) < 1e-13);
  std::vector<std::complex<double>> odd(12);
  CHECK_THROWS_AS(fft_radix2(odd), ConfigError);
}

TEST_CASE("Dominant frequency", "[eval]") {
  CHECK(dominant_frequency(sine(440.0, 1.0, 44100).audio) == Approx(440.0).margin(0.5));
  CHECK(dominant_frequency(sine(1234.5, 0.5, 44100).audio) == Approx(1234.5).margin(0.5));
  CHECK(dominant_frequency(sine(97.0, 1.0, 8000).audio) == Approx(97.0).margin(0.5));
  CHECK_THROWS_AS(dominant_frequency(AudioBuffer(2, 44100)), ConfigError);
}

TEST_CASE("Rise time of a linear ramp", "[eval]") {
  // Amplitude ramps so that power rises linearly over 20 ms, then holds.
  AudioBuffer x(44100, 44100);
  const std::size_t start = 20000, ramp = 882;
  for (std::size_t i = start; i < x.size(); ++i) {
    const double p = std::min(1.0, double(i - start) / ramp);
    x.samples[i] = std::sqrt(p) * (i % 2 ? 1.0 : -1.0);
  }
  x.samples.resize(start + 2 * ramp);
  const auto e = measure_event(x, (start + ramp) / 44100.0, 0.02);
  CHECK(e.rise_seconds == Approx(0.8 * 0.020).margin(0.001));
  CHECK(e.onset_seconds == Approx((start + 0.1 * ramp) / 44100.0).margin(0.001));
}

TEST_CASE("Onset detector finds clicks", "[eval]") {
  const auto clicks = click_train(0.25, 2.0, 44100, 3);
  const auto onsets = onset_positions(clicks.audio);
  REQUIRE(onsets.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) CHECK(onsets[k] == Approx(0.25 * k).margin(0.002));
  CHECK(onset_positions(AudioBuffer(0, 44100)).empty());
}

TEST_CASE("Envelope deviation and reports", "[eval]") {
  CHECK(frame_envelope_deviation({1.0, 2.0, -100.0}, {0.0, 0.0, -90.0}, -60.0, false) == 1.5);
  CHECK(frame_envelope_deviation({1.0, 3.0}, {0.0, 0.0}, -60.0, true) == 1.0);
  CHECK(frame_envelope_deviation({5.0, 5.0}, {0.0, 0.0}, -60.0, true) == 0.0);
  CHECK_THROWS_AS(frame_envelope_deviation({1.0}, {}, -60.0, true), ConfigError);

  CHECK(make_report("c", "m", 1.05, 1.0, 0.1, Comparison::within).pass);
  CHECK_FALSE(make_report("c", "m", 1.2, 1.0, 0.1, Comparison::within).pass);
  CHECK(make_report("c", "m", 0.5, 1.0, 0.0, Comparison::at_most).pass);
  CHECK_FALSE(make_report("c", "m", 0.5, 1.0, 0.0, Comparison::at_least).pass);
  CHECK_FALSE(make_report("c", "m", std::nan(""), 1.0, 10.0, Comparison::within).pass);

  const auto csv = report_csv({make_report("case_a", "metric_b", 2.0, 1.0, 1.0, Comparison::within)});
  CHECK(csv == "case,metric,value,target,tolerance,pass\ncase_a,metric_b,2,1,1,true\n");
  CHECK(format_report_line(make_report("c", "m", 3.0, 1.0, 0.0, Comparison::at_most)).rfind("FAIL c m", 0) == 0);
}

TEST_CASE("Acceptance registry", "[eval]") {
  CHECK(acceptance_cases().size() == 11);
  CHECK_THROWS_AS(run_acceptance("no_such_case"), ConfigError);
  const auto reports = run_acceptance("c03");
  CHECK(reports.size() == 8);
  for (const auto& r : reports) CHECK(r.pass);
}
