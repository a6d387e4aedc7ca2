#pragma once

#include <functional>
#include <string_view>

namespace nmstretch {

enum class LogLevel { debug = 0, info = 1, warning = 2, silent = 3 };

// Messages below the threshold are dropped. Default threshold: warning.
void set_log_level(LogLevel level);
LogLevel log_level();

// Replaces the default sink (standard error). Pass an empty function to restore it.
void set_log_sink(std::function<void(LogLevel, std::string_view)> sink);

void log(LogLevel level, std::string_view message);
inline void log_warning(std::string_view message) { log(LogLevel::warning, message); }
inline void log_info(std::string_view message) { log(LogLevel::info, message); }
inline void log_debug(std::string_view message) { log(LogLevel::debug, message); }

}  // namespace nmstretch
