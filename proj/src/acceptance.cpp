#include "nmstretch/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "nmstretch/error.hpp"
#include "nmstretch/noise_morph.hpp"
#include "nmstretch/pipeline.hpp"
#include "nmstretch/stn.hpp"
#include "nmstretch/wav.hpp"

namespace nmstretch::eval {
namespace {

using Reports = std::vector<MetricReport>;
constexpr int kRate = 44100;
constexpr StretchMode kModes[] = {StretchMode::nm, StretchMode::ni, StretchMode::nd,
                                  StretchMode::an};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double peak_abs(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

AudioBuffer run(const AudioBuffer& x, double alpha, StretchMode mode, std::uint64_t seed = 0) {
  auto config = StretchConfig::defaults(x.sample_rate);
  config.alpha = alpha;
  config.mode = mode;
  config.seed = seed;
  return time_stretch(x, config);
}

Reports reconstruction() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& g : corpus(kRate)) {
    const auto c = stn_decompose(g.audio, StnConfig::for_sample_rate(kRate));
    double err = 0.0;
    for (std::size_t n = 0; n < g.audio.size(); ++n) {
      const double sum = c.sines.samples[n] + c.transients.samples[n] + c.noise.samples[n];
      err = std::max(err, std::abs(g.audio.samples[n] - sum));
    }
    worst = std::max(worst, err / peak_abs(g.audio.samples));
  }
  const double elapsed = seconds_since(start);
  return {make_report("c01_reconstruction", "max_rel_error", worst, 0.0, 1e-4, Comparison::at_most),
          make_report("c01_reconstruction", "runtime_seconds", elapsed, 10.0, 0.0,
                      Comparison::at_most)};
}

Reports mask_partition() {
  double worst_sum = 0.0;
  double lowest = 1.0;
  double highest = 0.0;
  for (const auto& g : corpus(kRate)) {
    const auto a = stn_analyze(g.audio, StnConfig::for_sample_rate(kRate));
    for (const MaskSet* m : {&a.stage1, &a.stage2}) {
      for (std::size_t i = 0; i < m->sines.size(); ++i) {
        const double s = m->sines.flat()[i];
        const double t = m->transients.flat()[i];
        const double n = m->noise.flat()[i];
        worst_sum = std::max(worst_sum, std::abs(s + t + n - 1.0));
        lowest = std::min({lowest, s, t, n});
        highest = std::max({highest, s, t, n});
      }
    }
  }
  return {make_report("c02_mask_partition", "max_sum_error", worst_sum, 0.0, 1e-12,
                      Comparison::at_most),
          make_report("c02_mask_partition", "min_entry", lowest, 0.0, 0.0, Comparison::at_least),
          make_report("c02_mask_partition", "max_entry", highest, 1.0, 0.0, Comparison::at_most)};
}

Reports saturating_table() {
  Reports out;
  for (const auto& [label, th] : {std::pair{"stage1", StnThresholds::stage1()},
                                  std::pair{"stage2", StnThresholds::stage2()}}) {
    const std::string name = std::string("c03_saturating_") + label;
    out.push_back(make_report(name, "f_lower", saturating_mask(th.lower, th), 0.0, 1e-12,
                              Comparison::within));
    out.push_back(make_report(name, "f_upper", saturating_mask(th.upper, th), 1.0, 1e-12,
                              Comparison::within));
    out.push_back(make_report(name, "f_mid", saturating_mask(0.5 * (th.lower + th.upper), th), 0.5,
                              1e-12, Comparison::within));
    double worst_drop = 0.0;
    double prev = saturating_mask(0.0, th);
    for (int i = 1; i < 1000; ++i) {
      const double v = saturating_mask(i / 999.0, th);
      worst_drop = std::max(worst_drop, prev - v);
      prev = v;
    }
    out.push_back(make_report(name, "max_decrease", worst_drop, 0.0, 0.0, Comparison::at_most));
  }
  return out;
}

Reports length_contract() {
  std::size_t mismatches = 0;
  std::size_t runs = 0;
  for (const auto& g : corpus(kRate)) {
    for (double alpha : {1.0, 2.0, 3.0, 4.0, 8.0}) {
      for (auto mode : kModes) {
        const auto y = run(g.audio, alpha, mode);
        if (y.size() != stretched_length(g.audio.size(), alpha)) ++mismatches;
        ++runs;
      }
    }
  }
  return {make_report("c04_length", "mismatched_runs", static_cast<double>(mismatches), 0.0, 0.0,
                      Comparison::within, std::to_string(runs) + " runs")};
}

Reports pitch() {
  Reports out;
  for (double f : {440.0, 1000.0}) {
    const auto x = sine(f, 2.0, kRate);
    for (double alpha : {2.0, 4.0, 8.0}) {
      const auto y = run(x.audio, alpha, StretchMode::nm);
      out.push_back(make_report("c05_pitch", "f" + std::to_string(static_cast<int>(f)) + "_alpha" +
                                                 std::to_string(static_cast<int>(alpha)),
                                dominant_frequency(y), f, 1.0, Comparison::within));
    }
  }
  return out;
}

Reports transient_smearing() {
  constexpr double alpha = 3.0;
  const auto g = click_plus_hiss(2.0, kRate, 13);
  const auto nm = run(g.audio, alpha, StretchMode::nm);
  const auto nd = run(g.audio, alpha, StretchMode::nd);
  const auto an = run(g.audio, alpha, StretchMode::an);
  const auto detected = onset_positions(nm);

  double onset_error = 0.0;
  double nm_ratio = 0.0;
  double nd_ratio = std::numeric_limits<double>::infinity();
  double an_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t click : g.onsets) {
    const double t = static_cast<double>(click) / kRate;
    const auto original = measure_event(g.audio, t);
    const double expected = alpha * original.onset_seconds;
    double nearest = std::numeric_limits<double>::infinity();
    for (double d : detected) nearest = std::min(nearest, std::abs(d - expected));
    onset_error = std::max(onset_error, nearest);
    const double nm_rise = measure_event(nm, expected).rise_seconds;
    nm_ratio = std::max(nm_ratio, nm_rise / original.rise_seconds);
    nd_ratio = std::min(nd_ratio, measure_event(nd, expected).rise_seconds / nm_rise);
    an_ratio = std::min(an_ratio, measure_event(an, expected).rise_seconds / nm_rise);
  }

  const auto train = click_train(0.25, 2.0, kRate, 11);
  const auto train_out = onset_positions(run(train.audio, alpha, StretchMode::nm));
  double train_error = 0.0;
  for (std::size_t click : train.onsets) {
    const double expected = alpha * static_cast<double>(click) / kRate;
    double nearest = std::numeric_limits<double>::infinity();
    for (double d : train_out) nearest = std::min(nearest, std::abs(d - expected));
    train_error = std::max(train_error, nearest);
  }

  return {make_report("c06_transients", "nm_onset_count", static_cast<double>(detected.size()),
                      static_cast<double>(g.onsets.size()), 0.0, Comparison::within),
          make_report("c06_transients", "nm_max_onset_error_s", onset_error, 0.0, 0.010,
                      Comparison::at_most),
          make_report("c06_transients", "nm_rise_over_original_max", nm_ratio, 2.0, 0.0,
                      Comparison::at_most),
          make_report("c06_transients", "nd_rise_over_nm_min", nd_ratio, 2.0, 0.0,
                      Comparison::at_least),
          make_report("c06_transients", "an_rise_over_nm_min", an_ratio, 2.0, 0.0,
                      Comparison::at_least),
          make_report("c06_transients", "click_train_onset_count",
                      static_cast<double>(train_out.size()),
                      static_cast<double>(train.onsets.size()), 0.0, Comparison::within),
          make_report("c06_transients", "click_train_max_onset_error_s", train_error, 0.0, 0.010,
                      Comparison::at_most)};
}

Reports noise_fidelity() {
  constexpr double alpha = 4.0;
  const auto g = shaped_noise(-6.0, 2.0, kRate, 12);
  const auto y = run(g.audio, alpha, StretchMode::nm);
  const auto in_bands = octave_bands(welch(g.audio), 125.0, 16000.0);
  const auto out_bands = octave_bands(welch(y), 125.0, 16000.0);
  double band_dev = 0.0;
  for (std::size_t i = 0; i < in_bands.size(); ++i) {
    band_dev = std::max(band_dev, std::abs(out_bands[i].level_db - in_bands[i].level_db));
  }

  // Seed-averaged magnitude of the morphed noise spectrogram against the
  // interpolated target, as a shape (common offset removed).
  const auto noise = stn_decompose(g.audio, StnConfig::for_sample_rate(kRate)).noise;
  auto params = NoiseMorphParams::for_sample_rate(kRate);
  const auto interp = analyze_noise(noise, alpha, params);
  const auto out_length = stretched_length(g.audio.size(), alpha);
  // Only frames covered by the excitation are compared.
  const std::size_t frames = std::min(
      interp.frames(), frame_count(out_length + params.stft.window_size, params.stft));
  const std::size_t cells = frames * interp.bin_count();
  std::vector<double> mean(cells, 0.0);
  constexpr int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    params.seed = static_cast<std::uint64_t>(s);
    const auto shaped = morph(interp, excitation_spectrum(out_length, interp.frames(), params, kRate));
    for (std::size_t i = 0; i < cells; ++i) mean[i] += std::abs(shaped.bins.flat()[i]) / seeds;
  }
  for (auto& v : mean) v = 10.0 * std::log10(std::max(v, 1e-300));
  const auto& target = interp.values.flat();
  const double env_dev = frame_envelope_deviation(
      mean, std::vector<double>(target.begin(), target.begin() + static_cast<std::ptrdiff_t>(cells)),
      -60.0, true);

  return {make_report("c07_noise_fidelity", "max_octave_band_dev_db", band_dev, 0.0, 2.0,
                      Comparison::at_most, "bands 125 Hz - 16 kHz"),
          make_report("c07_noise_fidelity", "mean_frame_envelope_dev_db", env_dev, 0.0, 1.0,
                      Comparison::at_most, "50 seeds")};
}

Reports frame_smoothness() {
  constexpr double alpha = 4.0;
  const auto g = shaped_noise(-3.0, 2.0, kRate, 21);
  auto params = NoiseMorphParams::for_sample_rate(kRate);
  auto target = analyze_noise(g.audio, 1.0, params);
  // Stationary target: every frame set to the time average of the log spectrum.
  std::vector<double> average(target.bin_count(), 0.0);
  for (std::size_t m = 0; m < target.frames(); ++m) {
    for (std::size_t k = 0; k < target.bin_count(); ++k) average[k] += target.values(m, k);
  }
  for (auto& v : average) v /= static_cast<double>(target.frames());
  const auto out_length = stretched_length(g.audio.size(), alpha);
  const std::size_t frames = frame_count(out_length + params.stft.window_size, params.stft);
  LogMagSpectrogram stationary{target.framing, Grid<double>(frames, target.bin_count())};
  for (std::size_t m = 0; m < frames; ++m) {
    std::copy(average.begin(), average.end(), stationary.values.row(m).begin());
  }

  // Mean power folded onto one hop period, then averaged over seeds.
  const std::size_t hop = params.stft.hop_size;
  std::vector<double> folded(hop, 0.0);
  constexpr int seeds = 30;
  for (int s = 0; s < seeds; ++s) {
    params.seed = 1000 + static_cast<std::uint64_t>(s);
    const auto y = synthesize_noise(stationary, out_length, params, MorphVariant::multiply, kRate);
    for (std::size_t n = params.stft.window_size; n + params.stft.window_size < y.size(); ++n) {
      folded[n % hop] += y.samples[n] * y.samples[n];
    }
  }
  double dc = 0.0;
  std::complex<double> first{0.0, 0.0};
  for (std::size_t n = 0; n < hop; ++n) {
    dc += folded[n];
    first += folded[n] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(n) / hop);
  }
  const double modulation_db = 20.0 * std::log10(std::abs(first) / dc);
  return {make_report("c08_frame_smoothness", "hop_rate_modulation_db", modulation_db, -40.0, 0.0,
                      Comparison::at_most, "30 seeds")};
}

Reports ablation() {
  constexpr double alpha = 2.0;
  const auto g = shaped_noise(-6.0, 2.0, kRate, 12);
  const auto nm = run(g.audio, alpha, StretchMode::nm, 7);
  const auto ni = run(g.audio, alpha, StretchMode::ni, 7);
  double diff = 0.0;
  for (std::size_t n = 0; n < nm.size(); ++n) {
    diff = std::max(diff, std::abs(nm.samples[n] - ni.samples[n]));
  }

  auto params = NoiseMorphParams::for_sample_rate(kRate);
  params.seed = 7;
  const auto noise = stn_decompose(g.audio, StnConfig::for_sample_rate(kRate)).noise;
  const auto interp = analyze_noise(noise, alpha, params);
  const auto excitation = excitation_spectrum(stretched_length(g.audio.size(), alpha),
                                              interp.frames(), params, kRate);
  const auto replaced = morph_replace(interp, excitation);
  const auto multiplied = morph(interp, excitation);
  double worst_rel = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < interp.values.size(); ++i) {
    const double target = std::pow(10.0, interp.values.flat()[i] / 10.0);
    worst_rel = std::max(worst_rel, std::abs(std::abs(replaced.bins.flat()[i]) - target) / target);
    const double ratio = std::abs(multiplied.bins.flat()[i]) / target;
    sum += ratio;
    sum_sq += ratio * ratio;
    ++count;
  }
  const double mean = sum / static_cast<double>(count);
  const double cv = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean)) / mean;
  return {make_report("c09_ablation", "nm_ni_max_abs_diff", diff, 1e-6, 0.0, Comparison::at_least),
          make_report("c09_ablation", "ni_max_rel_magnitude_error", worst_rel, 0.0, 1e-9,
                      Comparison::at_most),
          make_report("c09_ablation", "nm_magnitude_ratio_cv", cv, 0.1, 0.0, Comparison::at_least)};
}

Reports determinism() {
  const auto g = click_plus_hiss(2.0, kRate, 13);
  Reports out;
  for (auto mode : kModes) {
    const auto a = encode_wav(run(g.audio, 2.0, mode, 42), SampleFormat::float32);
    const auto b = encode_wav(run(g.audio, 2.0, mode, 42), SampleFormat::float32);
    out.push_back(make_report("c10_determinism", std::string(to_string(mode)) + "_identical",
                              a == b ? 1.0 : 0.0, 1.0, 0.0, Comparison::within));
  }
  return out;
}

Reports excitation_statistics() {
  const auto e = generate_excitation(1'000'000, 0, kRate);
  double mean = 0.0;
  for (double v : e.samples) mean += v;
  mean /= static_cast<double>(e.size());
  double var = 0.0;
  for (double v : e.samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(e.size());
  return {make_report("c11_excitation", "abs_mean", std::abs(mean), 0.0, 0.005, Comparison::at_most),
          make_report("c11_excitation", "variance", var, 1.0, 0.01, Comparison::within)};
}

const std::map<std::string, std::function<Reports()>>& registry() {
  static const std::map<std::string, std::function<Reports()>> cases{
      {"c01_reconstruction", reconstruction},     {"c02_mask_partition", mask_partition},
      {"c03_saturating", saturating_table},       {"c04_length", length_contract},
      {"c05_pitch", pitch},                       {"c06_transients", transient_smearing},
      {"c07_noise_fidelity", noise_fidelity},     {"c08_frame_smoothness", frame_smoothness},
      {"c09_ablation", ablation},                 {"c10_determinism", determinism},
      {"c11_excitation", excitation_statistics},
  };
  return cases;
}

}  // namespace

std::vector<std::string> acceptance_cases() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

std::vector<MetricReport> run_acceptance(std::string_view filter) {
  std::vector<MetricReport> reports;
  bool matched = false;
  for (const auto& [name, fn] : registry()) {
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    matched = true;
    auto part = fn();
    reports.insert(reports.end(), part.begin(), part.end());
  }
  if (!matched) throw ConfigError("no acceptance case matches '" + std::string(filter) + "'");
  return reports;
}

}  // namespace nmstretch::eval
