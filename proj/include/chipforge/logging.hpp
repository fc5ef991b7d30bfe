#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace chipforge::log {

enum class Level { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

// Level comes from CHIPFORGE_LOG (debug|info|warn|error), default warn.
inline Level threshold() {
  static const Level lvl = [] {
    const char* env = std::getenv("CHIPFORGE_LOG");
    if (env == nullptr) return Level::kWarn;
    if (std::strcmp(env, "debug") == 0) return Level::kDebug;
    if (std::strcmp(env, "info") == 0) return Level::kInfo;
    if (std::strcmp(env, "error") == 0) return Level::kError;
    return Level::kWarn;
  }();
  return lvl;
}

inline void emit(Level lvl, const char* tag, const char* fmt, ...) {
  if (lvl < threshold()) return;
  std::fprintf(stderr, "[%s] ", tag);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace chipforge::log

#define CF_DEBUG(...) ::chipforge::log::emit(::chipforge::log::Level::kDebug, "debug", __VA_ARGS__)
#define CF_INFO(...) ::chipforge::log::emit(::chipforge::log::Level::kInfo, "info", __VA_ARGS__)
#define CF_WARN(...) ::chipforge::log::emit(::chipforge::log::Level::kWarn, "warn", __VA_ARGS__)
#define CF_ERROR(...) ::chipforge::log::emit(::chipforge::log::Level::kError, "error", __VA_ARGS__)
