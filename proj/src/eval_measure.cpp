#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <iomanip>

#include "nmstretch/error.hpp"
#include "nmstretch/eval.hpp"

namespace nmstretch::eval {
namespace {

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

// Index (fractional) where env rises through `level`, searching backwards
// from `from` while env stays at or above it.
double crossing_before(const std::vector<double>& env, std::size_t from, double level) {
  std::size_t i = from;
  while (i > 0 && env[i - 1] >= level) --i;
  if (i == 0) return 0.0;
  const double lo = env[i - 1];
  const double hi = env[i];
  const double frac = hi > lo ? (level - lo) / (hi - lo) : 1.0;
  return static_cast<double>(i - 1) + frac;
}

}  // namespace

void fft_radix2(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("fft_radix2 needs a power-of-two size");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Direct twiddles keep the error flat for long transforms.
      const std::complex<double> w(std::cos(angle * static_cast<double>(k)),
                                   std::sin(angle * static_cast<double>(k)));
      for (std::size_t start = 0; start < n; start += len) {
        const auto u = data[start + k];
        const auto v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= scale;
  }
}

double dominant_frequency(const AudioBuffer& signal) {
  const std::size_t n = signal.size();
  if (n < 4) throw ConfigError("dominant_frequency needs at least 4 samples");
  const auto w = hann(n);
  const std::size_t size = next_pow2(4 * n);
  std::vector<std::complex<double>> data(size);
  for (std::size_t i = 0; i < n; ++i) data[i] = signal.samples[i] * w[i];
  fft_radix2(data);
  std::size_t best = 1;
  for (std::size_t k = 1; k < size / 2; ++k) {
    if (std::abs(data[k]) > std::abs(data[best])) best = k;
  }
  double offset = 0.0;
  if (best > 1 && best + 1 < size / 2) {
    const double a = std::log(std::abs(data[best - 1]) + 1e-300);
    const double b = std::log(std::abs(data[best]) + 1e-300);
    const double c = std::log(std::abs(data[best + 1]) + 1e-300);
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) offset = 0.5 * (a - c) / denom;
  }
  return (static_cast<double>(best) + offset) * signal.sample_rate / static_cast<double>(size);
}

WelchSpectrum welch(const AudioBuffer& signal, std::size_t segment) {
  if (segment < 2 || (segment & (segment - 1)) != 0) {
    throw ConfigError("welch segment must be a power of two");
  }
  const auto w = hann(segment);
  const double wsum = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  const std::size_t hop = segment / 2;
  const std::size_t bins = segment / 2 + 1;
  WelchSpectrum out;
  out.power.assign(bins, 0.0);
  out.frequency.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.frequency[k] = static_cast<double>(k) * signal.sample_rate / static_cast<double>(segment);
  }
  std::size_t count = 0;
  std::vector<std::complex<double>> data(segment);
  for (std::size_t start = 0; count == 0 || start + segment <= signal.size(); start += hop) {
    for (std::size_t i = 0; i < segment; ++i) {
      const std::size_t at = start + i;
      data[i] = at < signal.size() ? signal.samples[at] * w[i] : 0.0;
    }
    fft_radix2(data);
    for (std::size_t k = 0; k < bins; ++k) out.power[k] += std::norm(data[k]) / wsum;
    ++count;
  }
  for (auto& p : out.power) p /= static_cast<double>(count);
  return out;
}

std::vector<BandLevel> octave_bands(const WelchSpectrum& spectrum, double first_center_hz,
                                    double last_center_hz) {
  std::vector<BandLevel> bands;
  for (double c = first_center_hz; c <= last_center_hz * 1.0001; c *= 2.0) {
    const double lo = c / std::numbers::sqrt2;
    const double hi = c * std::numbers::sqrt2;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < spectrum.frequency.size(); ++k) {
      if (spectrum.frequency[k] >= lo && spectrum.frequency[k] < hi) {
        sum += spectrum.power[k];
        ++count;
      }
    }
    const double mean = count ? sum / static_cast<double>(count) : 0.0;
    bands.push_back({c, 10.0 * std::log10(mean + 1e-300)});
  }
  return bands;
}

std::vector<double> power_envelope(const AudioBuffer& signal, double window_seconds) {
  const std::size_t n = signal.size();
  const auto width = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(window_seconds * signal.sample_rate)));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + signal.samples[i] * signal.samples[i];
  std::vector<double> env(n);
  const std::size_t half = width / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, lo + width);
    env[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(width);
  }
  return env;
}

EventShape measure_event(const AudioBuffer& signal, double expected_seconds, double search_seconds) {
  const auto env = power_envelope(signal);
  if (env.empty()) throw ConfigError("measure_event on an empty signal");
  const double fs = signal.sample_rate;
  auto clamp_index = [&](double seconds) {
    return static_cast<std::size_t>(
        std::clamp(std::llround(seconds * fs), 0LL, static_cast<long long>(env.size() - 1)));
  };
  const std::size_t lo = clamp_index(expected_seconds - search_seconds);
  const std::size_t hi = clamp_index(expected_seconds + search_seconds);
  const auto peak = static_cast<std::size_t>(
      std::max_element(env.begin() + static_cast<std::ptrdiff_t>(lo),
                       env.begin() + static_cast<std::ptrdiff_t>(hi) + 1) - env.begin());
  const std::size_t blo = clamp_index(expected_seconds - 0.1);
  const std::size_t bhi = clamp_index(expected_seconds + 0.1);
  const double background = percentile(
      {env.begin() + static_cast<std::ptrdiff_t>(blo), env.begin() + static_cast<std::ptrdiff_t>(bhi) + 1},
      0.1);
  const double span = env[peak] - background;
  const double t90 = crossing_before(env, peak, background + 0.9 * span);
  const double t10 = crossing_before(env, peak, background + 0.1 * span);
  return {t10 / fs, static_cast<double>(peak) / fs, (t90 - t10) / fs};
}

std::vector<double> onset_positions(const AudioBuffer& signal) {
  const auto env = power_envelope(signal);
  std::vector<double> onsets;
  if (env.empty()) return onsets;
  const double fs = signal.sample_rate;
  const double background = percentile(env, 0.5);
  const double top = *std::max_element(env.begin(), env.end());
  const double trigger = background + 0.25 * (top - background);
  const double rearm = background + 0.125 * (top - background);
  const auto gap = static_cast<std::size_t>(0.05 * fs);
  const auto look = static_cast<std::size_t>(0.02 * fs);
  bool armed = true;
  std::size_t last = 0;
  bool any = false;
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (!armed) {
      if (env[i] < rearm) armed = true;
      continue;
    }
    if (env[i] < trigger || (any && i - last < gap)) continue;
    const std::size_t end = std::min(env.size(), i + look);
    const auto peak = static_cast<std::size_t>(
        std::max_element(env.begin() + static_cast<std::ptrdiff_t>(i),
                         env.begin() + static_cast<std::ptrdiff_t>(end)) - env.begin());
    const double t10 = crossing_before(env, peak, background + 0.1 * (env[peak] - background));
    onsets.push_back(t10 / fs);
    last = i;
    any = true;
    armed = false;
  }
  return onsets;
}

double frame_envelope_deviation(const std::vector<double>& value, const std::vector<double>& target,
                                double floor_db, bool remove_offset) {
  if (value.size() != target.size()) throw ConfigError("frame_envelope_deviation size mismatch");
  double offset = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (target[i] >= floor_db) {
      offset += value[i] - target[i];
      ++count;
    }
  }
  if (count == 0) return 0.0;
  offset = remove_offset ? offset / static_cast<double>(count) : 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (target[i] >= floor_db) sum += std::abs(value[i] - target[i] - offset);
  }
  return sum / static_cast<double>(count);
}

MetricReport make_report(std::string case_name, std::string metric, double value, double target,
                         double tolerance, Comparison comparison, std::string note) {
  bool pass = false;
  if (std::isfinite(value)) {
    switch (comparison) {
      case Comparison::within: pass = std::abs(value - target) <= tolerance; break;
      case Comparison::at_most: pass = value <= target + tolerance; break;
      case Comparison::at_least: pass = value >= target - tolerance; break;
    }
  }
  return {std::move(case_name), std::move(metric), value, target, tolerance, comparison, pass,
          std::move(note)};
}

std::string format_report_line(const MetricReport& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS " : "FAIL ") << r.case_name << " " << r.metric << " = "
     << std::setprecision(6) << r.value << " (";
  switch (r.comparison) {
    case Comparison::within: os << "target " << r.target << " +/- " << r.tolerance; break;
    case Comparison::at_most: os << "<= " << r.target + r.tolerance; break;
    case Comparison::at_least: os << ">= " << r.target - r.tolerance; break;
  }
  os << ")";
  if (!r.note.empty()) os << " " << r.note;
  return os.str();
}

std::string report_csv(const std::vector<MetricReport>& reports) {
  std::ostringstream os;
  os << "case,metric,value,target,tolerance,pass\n" << std::setprecision(10);
  for (const auto& r : reports) {
    os << r.case_name << ',' << r.metric << ',' << r.value << ',' << r.target << ',' << r.tolerance
       << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace nmstretch::eval
