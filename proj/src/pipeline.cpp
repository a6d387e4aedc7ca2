#include "nmstretch/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "nmstretch/error.hpp"

namespace nmstretch {

std::string_view to_string(StretchMode mode) {
  switch (mode) {
    case StretchMode::nm: return "nm";
    case StretchMode::ni: return "ni";
    case StretchMode::nd: return "nd";
    case StretchMode::an: return "an";
  }
  return "?";
}

std::optional<StretchMode> parse_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto mode : {StretchMode::nm, StretchMode::ni, StretchMode::nd, StretchMode::an}) {
    if (lower == to_string(mode)) return mode;
  }
  return std::nullopt;
}

StretchConfig StretchConfig::defaults(int sample_rate) {
  StretchConfig config;
  config.stn = StnConfig::for_sample_rate(sample_rate);
  config.noise = NoiseMorphParams::for_sample_rate(sample_rate);
  config.pv = PvParams::for_sample_rate(sample_rate);
  return config;
}

void validate(const StretchConfig& config) {
  if (!std::isfinite(config.alpha) || config.alpha <= 0.0) {
    throw ConfigError("alpha must be finite and positive, got " + std::to_string(config.alpha));
  }
  switch (config.mode) {
    case StretchMode::nm:
    case StretchMode::ni:
      validate(config.stn);
      validate(config.transients);
      [[fallthrough]];
    case StretchMode::nd:
      validate(config.noise);
      if (config.mode == StretchMode::nd) break;
      [[fallthrough]];
    case StretchMode::an: {
      auto pv = config.pv;
      pv.alpha = config.alpha;
      validate(pv);
      break;
    }
  }
}

AudioBuffer time_stretch_anchor(const AudioBuffer& x, double alpha, const PvParams& params) {
  auto pv = params;
  pv.alpha = alpha;
  return phase_vocoder(x, pv, PhaseMode::per_bin);
}

StretchResult time_stretch_detailed(const AudioBuffer& x, const StretchConfig& config) {
  validate(x);
  validate(config);
  const std::size_t out_length = stretched_length(x.size(), config.alpha);
  auto noise_params = config.noise;
  noise_params.seed = config.seed;

  StretchResult result;
  switch (config.mode) {
    case StretchMode::an:
      result.output = fit_length(time_stretch_anchor(x, config.alpha, config.pv), out_length);
      return result;
    case StretchMode::nd:
      result.output = fit_length(
          stretch_noise(x, config.alpha, noise_params, MorphVariant::multiply), out_length);
      return result;
    case StretchMode::nm:
    case StretchMode::ni:
      break;
  }

  auto components = stn_decompose(x, config.stn);
  auto pv = config.pv;
  pv.alpha = config.alpha;
  const auto variant = config.mode == StretchMode::nm ? MorphVariant::multiply : MorphVariant::replace;

  StnComponents stretched;
  stretched.sines = fit_length(stretch_sines(components.sines, pv), out_length);
  result.events = detect_events(components.transients, config.transients);
  stretched.transients =
      reposition_events(result.events, config.alpha, out_length, x.sample_rate);
  stretched.noise =
      fit_length(stretch_noise(components.noise, config.alpha, noise_params, variant), out_length);

  result.output = AudioBuffer(out_length, x.sample_rate);
  for (std::size_t n = 0; n < out_length; ++n) {
    result.output.samples[n] =
        stretched.sines.samples[n] + stretched.transients.samples[n] + stretched.noise.samples[n];
  }
  result.components = std::move(components);
  result.stretched = std::move(stretched);
  return result;
}

AudioBuffer time_stretch(const AudioBuffer& x, const StretchConfig& config) {
  return time_stretch_detailed(x, config).output;
}

}  // namespace nmstretch
