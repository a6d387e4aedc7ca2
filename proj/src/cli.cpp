#include "nmstretch/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nmstretch/config_file.hpp"
#include "nmstretch/error.hpp"
#include "nmstretch/log.hpp"
#include "nmstretch/pipeline.hpp"
#include "nmstretch/wav.hpp"

namespace nmstretch {
namespace {

SampleFormat parse_bit_depth(const std::string& text) {
  if (text == "16") return SampleFormat::pcm16;
  if (text == "24") return SampleFormat::pcm24;
  if (text == "float" || text == "float32" || text == "32") return SampleFormat::float32;
  throw ConfigError("--bit-depth must be 16, 24 or float, got '" + text + "'");
}

void write_onsets(const std::filesystem::path& path, const std::vector<TransientEvent>& events,
                  double alpha) {
  std::ofstream csv(path, std::ios::trunc);
  if (!csv) throw IoError("cannot open " + path.string() + " for writing");
  csv << "input_sample,output_sample\n";
  for (const auto& e : events) {
    csv << e.onset << ',' << std::llround(alpha * static_cast<double>(e.onset)) << '\n';
  }
  if (!csv) throw IoError("failed writing " + path.string());
}

void write_stems(const std::filesystem::path& dir, const StretchResult& result, SampleFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create stems directory " + dir.string() + ": " + ec.message());
  const auto& c = *result.components;
  const auto& s = *result.stretched;
  write_wav(c.sines, dir / "sines.wav", format);
  write_wav(c.transients, dir / "transients.wav", format);
  write_wav(c.noise, dir / "noise.wav", format);
  write_wav(s.sines, dir / "sines_stretched.wav", format);
  write_wav(s.transients, dir / "transients_stretched.wav", format);
  write_wav(s.noise, dir / "noise_stretched.wav", format);
}

}  // namespace

std::variant<CliArgs, int> parse_cli(int argc, const char* const* argv, std::ostream& out,
                                     std::ostream& err) {
  CliArgs args;
  CLI::App app{"Time-stretch a WAV file with sines/transients/noise decomposition and noise morphing",
               "stretch"};
  std::string input, output;
  app.add_option("input", input, "Input WAV file")->required();
  app.add_option("output", output, "Output WAV file")->required();
  app.add_option("--alpha", args.alpha, "Stretch factor (output duration / input duration)");
  app.add_option("--mode", args.mode, "nm (default), ni, nd or an");
  app.add_option("--seed", args.seed, "Seed of the noise excitation (default 0)");
  app.add_option("--config", args.config, "Key/value configuration file");
  app.add_option("--stems", args.stems, "Directory for component stems (nm/ni modes)");
  app.add_option("--onsets", args.onsets, "CSV file for detected transient onsets");
  app.add_option("--bit-depth", args.bit_depth, "16, 24 or float (default: input's)");
  app.add_flag("-v,--verbose", args.verbosity, "More logging (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitConfig;
  }
  args.input = input;
  args.output = output;
  return args;
}

int run_cli(const CliArgs& args, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  set_log_level(args.verbosity >= 2 ? LogLevel::debug
                : args.verbosity == 1 ? LogLevel::info
                                      : LogLevel::warning);
  try {
    if (args.alpha && !(std::isfinite(*args.alpha) && *args.alpha > 0.0)) {
      throw ConfigError("--alpha must be a positive number, got " + std::to_string(*args.alpha));
    }
    if (args.mode && !parse_mode(*args.mode)) {
      throw ConfigError("--mode must be one of nm, ni, nd, an, got '" + *args.mode + "'");
    }
    std::optional<SampleFormat> depth;
    if (args.bit_depth) depth = parse_bit_depth(*args.bit_depth);

    const auto decoded = read_wav_file(args.input);
    const auto& x = decoded.audio;

    auto config = StretchConfig::defaults(x.sample_rate);
    bool alpha_given = false;
    if (args.config) {
      const auto keys = apply_config_file(*args.config, config);
      alpha_given = std::find(keys.begin(), keys.end(), "alpha") != keys.end();
    }
    if (args.alpha) {
      config.alpha = *args.alpha;
      alpha_given = true;
    }
    if (!alpha_given) throw ConfigError("--alpha is required");
    if (args.mode) config.mode = *parse_mode(*args.mode);
    if (args.seed) config.seed = *args.seed;
    validate(config);

    const auto result = time_stretch_detailed(x, config);
    const auto format = depth.value_or(decoded.info.format);
    const auto stats = write_wav(result.output, args.output, format);
    if (stats.clipped > 0) {
      log_warning(std::to_string(stats.clipped) + " output sample(s) clipped to [-1, 1]");
    }
    if (args.stems) {
      if (result.components) {
        write_stems(*args.stems, result, format);
      } else {
        log_warning("--stems ignored: mode " + std::string(to_string(config.mode)) +
                    " does not decompose the input");
      }
    }
    if (args.onsets) write_onsets(*args.onsets, result.events, config.alpha);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out << "RESULT: input_samples=" << x.size() << " alpha=" << config.alpha
        << " output_samples=" << result.output.size() << " mode=" << to_string(config.mode)
        << " seed=" << config.seed << " wall_seconds=" << wall << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int stretch_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto parsed = parse_cli(argc, argv, out, err);
  if (const int* code = std::get_if<int>(&parsed)) return *code;
  return run_cli(std::get<CliArgs>(parsed), out, err);
}

}  // namespace nmstretch
