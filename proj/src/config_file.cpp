#include "nmstretch/config_file.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include "nmstretch/error.hpp"

namespace nmstretch {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + value + "' for " + key);
  }
  return out;
}

using Setter = std::function<void(StretchConfig&, const std::string& key, const std::string&)>;

template <typename T, typename Field>
Setter number(Field field) {
  return [field](StretchConfig& c, const std::string& key, const std::string& v) {
    field(c) = parse_number<T>(key, v);
  };
}

void add_stage(std::map<std::string, Setter>& setters, const std::string& prefix,
               StnStageConfig StnConfig::*stage) {
  setters[prefix + ".window"] = number<std::size_t>(
      [stage](StretchConfig& c) -> std::size_t& { return (c.stn.*stage).stft.window_size; });
  setters[prefix + ".hop"] = number<std::size_t>(
      [stage](StretchConfig& c) -> std::size_t& { return (c.stn.*stage).stft.hop_size; });
  setters[prefix + ".time_median"] = number<std::size_t>(
      [stage](StretchConfig& c) -> std::size_t& { return (c.stn.*stage).time_median; });
  setters[prefix + ".freq_median"] = number<std::size_t>(
      [stage](StretchConfig& c) -> std::size_t& { return (c.stn.*stage).freq_median; });
  setters[prefix + ".beta_u"] = number<double>(
      [stage](StretchConfig& c) -> double& { return (c.stn.*stage).thresholds.upper; });
  setters[prefix + ".beta_l"] = number<double>(
      [stage](StretchConfig& c) -> double& { return (c.stn.*stage).thresholds.lower; });
}

const std::map<std::string, Setter>& setters() {
  static const auto table = [] {
    std::map<std::string, Setter> s;
    s["alpha"] = number<double>([](StretchConfig& c) -> double& { return c.alpha; });
    s["seed"] = number<std::uint64_t>([](StretchConfig& c) -> std::uint64_t& { return c.seed; });
    s["mode"] = [](StretchConfig& c, const std::string& key, const std::string& v) {
      const auto mode = parse_mode(v);
      if (!mode) throw ConfigError("invalid value '" + v + "' for " + key + " (nm, ni, nd, an)");
      c.mode = *mode;
    };
    add_stage(s, "stn.stage1", &StnConfig::stage1);
    add_stage(s, "stn.stage2", &StnConfig::stage2);
    s["noise.window"] = number<std::size_t>(
        [](StretchConfig& c) -> std::size_t& { return c.noise.stft.window_size; });
    s["noise.hop"] = number<std::size_t>(
        [](StretchConfig& c) -> std::size_t& { return c.noise.stft.hop_size; });
    s["noise.floor_db"] = number<double>([](StretchConfig& c) -> double& { return c.noise.floor_db; });
    s["pv.window"] = number<std::size_t>([](StretchConfig& c) -> std::size_t& { return c.pv.window_size; });
    s["pv.hop"] = number<std::size_t>([](StretchConfig& c) -> std::size_t& { return c.pv.synthesis_hop; });
    const auto t = [](double TransientDetectParams::*field) {
      return number<double>([field](StretchConfig& c) -> double& { return c.transients.*field; });
    };
    s["transients.frame_seconds"] = t(&TransientDetectParams::frame_seconds);
    s["transients.hop_seconds"] = t(&TransientDetectParams::hop_seconds);
    s["transients.threshold_ratio"] = t(&TransientDetectParams::threshold_ratio);
    s["transients.absolute_floor"] = t(&TransientDetectParams::absolute_floor);
    s["transients.release_ratio"] = t(&TransientDetectParams::release_ratio);
    s["transients.pre_onset_seconds"] = t(&TransientDetectParams::pre_onset_seconds);
    s["transients.max_event_seconds"] = t(&TransientDetectParams::max_event_seconds);
    s["transients.fade_seconds"] = t(&TransientDetectParams::fade_seconds);
    s["transients.min_gap_seconds"] = t(&TransientDetectParams::min_gap_seconds);
    return s;
  }();
  return table;
}

}  // namespace

void set_config_value(StretchConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(config, key, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : setters()) keys.push_back(key);
  return keys;
}

std::vector<std::string> apply_config(std::istream& in, StretchConfig& config,
                                      const std::string& source) {
  std::vector<std::string> keys;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    try {
      set_config_value(config, key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
    keys.push_back(key);
  }
  return keys;
}

std::vector<std::string> apply_config_file(const std::filesystem::path& path,
                                           StretchConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return apply_config(in, config, path.string());
}

}  // namespace nmstretch
