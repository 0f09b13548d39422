#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace bie2d {

// Verbosity is controlled by the BIE_LOG environment variable:
//   off | error | warn | info | debug   (default: warn)
enum class LogLevel { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("BIE_LOG");
    if (!env) return LogLevel::Warn;
    if (!std::strcmp(env, "off")) return LogLevel::Off;
    if (!std::strcmp(env, "error")) return LogLevel::Error;
    if (!std::strcmp(env, "warn")) return LogLevel::Warn;
    if (!std::strcmp(env, "info")) return LogLevel::Info;
    if (!std::strcmp(env, "debug")) return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

template <typename... Args>
void log_at(LogLevel lvl, const char* tag, const char* fmt, Args... args) {
  if (log_level() < lvl) return;
  std::fprintf(stderr, "[bie2d %s] ", tag);
  if constexpr (sizeof...(Args) == 0)
    std::fputs(fmt, stderr);
  else
    std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

template <typename... Args>
void log_error(const char* fmt, Args... args) {
  log_at(LogLevel::Error, "error", fmt, args...);
}
template <typename... Args>
void log_warn(const char* fmt, Args... args) {
  log_at(LogLevel::Warn, "warn", fmt, args...);
}
template <typename... Args>
void log_info(const char* fmt, Args... args) {
  log_at(LogLevel::Info, "info", fmt, args...);
}
template <typename... Args>
void log_debug(const char* fmt, Args... args) {
  log_at(LogLevel::Debug, "debug", fmt, args...);
}

}  // namespace bie2d
