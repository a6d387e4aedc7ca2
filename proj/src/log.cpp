#include "nmstretch/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace nmstretch {
namespace {

std::atomic<LogLevel> g_level{LogLevel::warning};
std::mutex g_sink_mutex;
std::function<void(LogLevel, std::string_view)> g_sink;

const char* prefix(LogLevel level) {
  switch (level) {
    case LogLevel::debug: return "debug: ";
    case LogLevel::info: return "info: ";
    case LogLevel::warning: return "warning: ";
    case LogLevel::silent: break;
  }
  return "";
}

}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void set_log_sink(std::function<void(LogLevel, std::string_view)> sink) {
  std::lock_guard lock(g_sink_mutex);
  g_sink = std::move(sink);
}

void log(LogLevel level, std::string_view message) {
  if (level < g_level.load() || level == LogLevel::silent) return;
  std::lock_guard lock(g_sink_mutex);
  if (g_sink) {
    g_sink(level, message);
  } else {
    std::cerr << prefix(level) << message << '\n';
  }
}

}  // namespace nmstretch
