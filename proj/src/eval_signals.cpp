#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "nmstretch/error.hpp"
#include "nmstretch/eval.hpp"

namespace nmstretch::eval {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t sample_count(double seconds, int sample_rate) {
  if (!(seconds > 0.0) || sample_rate <= 0) {
    throw ConfigError("signal duration and sample rate must be positive");
  }
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

void check_frequency(double f, int sample_rate) {
  if (!(f > 0.0) || f >= 0.5 * sample_rate) {
    throw ConfigError("frequency " + std::to_string(f) + " Hz is outside (0, Nyquist)");
  }
}

// Portable standard normal stream (Box-Muller over mt19937_64).
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Shapes white noise in the frequency domain with `gain(f)` and scales to `rms`.
template <typename Gain>
std::vector<double> filtered_noise(std::size_t length, int sample_rate, std::uint64_t seed,
                                   double rms, Gain gain) {
  const std::size_t size = next_pow2(length);
  Gaussian normal(seed);
  std::vector<std::complex<double>> data(size);
  for (auto& v : data) v = normal();
  fft_radix2(data);
  for (std::size_t k = 0; k <= size / 2; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(size);
    const double g = gain(f);
    data[k] *= g;
    if (k != 0 && k != size / 2) data[size - k] *= g;
  }
  fft_radix2(data, true);
  std::vector<double> out(length);
  double energy = 0.0;
  for (std::size_t n = 0; n < length; ++n) {
    out[n] = data[n].real();
    energy += out[n] * out[n];
  }
  const double scale = energy > 0.0 ? rms / std::sqrt(energy / static_cast<double>(length)) : 0.0;
  for (auto& v : out) v *= scale;
  return out;
}

void add_click(std::vector<double>& x, std::size_t at, const std::vector<double>& click) {
  for (std::size_t i = 0; i < click.size() && at + i < x.size(); ++i) x[at + i] += click[i];
}

}  // namespace

GeneratedSignal sine(double frequency, double seconds, int sample_rate, double amplitude) {
  check_frequency(frequency, sample_rate);
  const auto n = sample_count(seconds, sample_rate);
  GeneratedSignal g{"sine" + std::to_string(static_cast<int>(frequency)), AudioBuffer(n, sample_rate),
                    {}, {frequency}};
  for (std::size_t i = 0; i < n; ++i) {
    g.audio.samples[i] = amplitude * std::sin(kTwoPi * frequency * static_cast<double>(i) / sample_rate);
  }
  return g;
}

GeneratedSignal two_tone(double f1, double f2, double seconds, int sample_rate, double amplitude) {
  check_frequency(f1, sample_rate);
  check_frequency(f2, sample_rate);
  const auto n = sample_count(seconds, sample_rate);
  GeneratedSignal g{"two_tone", AudioBuffer(n, sample_rate), {}, {f1, f2}};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    g.audio.samples[i] = amplitude * (std::sin(kTwoPi * f1 * t) + std::sin(kTwoPi * f2 * t));
  }
  return g;
}

std::vector<double> click_shape(int sample_rate, std::uint64_t seed, double amplitude) {
  const auto n = sample_count(0.010, sample_rate);
  const double tau = 0.001 * sample_rate;
  Gaussian normal(seed);
  std::vector<double> click(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double carrier = i == 0 ? 1.0 : std::clamp(normal() / 2.5, -1.0, 1.0);
    click[i] = amplitude * carrier * std::exp(-static_cast<double>(i) / tau);
  }
  return click;
}

GeneratedSignal click_train(double period, double seconds, int sample_rate, std::uint64_t seed) {
  if (!(period > 0.0)) throw ConfigError("click period must be positive");
  const auto n = sample_count(seconds, sample_rate);
  GeneratedSignal g{"click_train", AudioBuffer(n, sample_rate), {}, {}};
  for (std::size_t k = 0;; ++k) {
    const auto at = static_cast<std::size_t>(std::llround(k * period * sample_rate));
    if (at >= n) break;
    g.onsets.push_back(at);
    add_click(g.audio.samples, at, click_shape(sample_rate, seed + k));
  }
  return g;
}

GeneratedSignal shaped_noise(double slope_db_per_octave, double seconds, int sample_rate,
                             std::uint64_t seed, double rms) {
  const auto n = sample_count(seconds, sample_rate);
  const double exponent = slope_db_per_octave / (20.0 * std::log10(2.0));
  GeneratedSignal g{"shaped_noise", AudioBuffer(n, sample_rate), {}, {}};
  g.audio.samples = filtered_noise(n, sample_rate, seed, rms, [&](double f) {
    return f < 40.0 ? 0.0 : std::pow(f / 1000.0, exponent);
  });
  return g;
}

GeneratedSignal click_plus_hiss(double seconds, int sample_rate, std::uint64_t seed) {
  const auto n = sample_count(seconds, sample_rate);
  if (5000.0 >= 0.5 * sample_rate) throw ConfigError("click_plus_hiss needs a rate above 10 kHz");
  GeneratedSignal g{"click_plus_hiss", AudioBuffer(n, sample_rate), {}, {}};
  g.audio.samples = filtered_noise(n, sample_rate, seed, 0.03, [](double f) {
    if (f < 40.0) return 0.0;
    const double octaves = std::log2(f / 5000.0);
    return 0.15 + std::exp(-octaves * octaves / (2.0 * 0.5 * 0.5));
  });
  const double scale = seconds / 2.0;
  std::uint64_t k = 0;
  for (double t : {0.3, 0.7, 1.1, 1.5, 1.62, 1.75}) {
    const auto at = static_cast<std::size_t>(std::llround(t * scale * sample_rate));
    if (at >= n) continue;
    g.onsets.push_back(at);
    add_click(g.audio.samples, at, click_shape(sample_rate, seed + 101 + k++));
  }
  return g;
}

std::vector<GeneratedSignal> corpus(int sample_rate) {
  return {sine(440.0, 2.0, sample_rate), two_tone(440.0, 660.0, 2.0, sample_rate),
          click_train(0.25, 2.0, sample_rate, 11), shaped_noise(-6.0, 2.0, sample_rate, 12),
          click_plus_hiss(2.0, sample_rate, 13)};
}

}  // namespace nmstretch::eval
