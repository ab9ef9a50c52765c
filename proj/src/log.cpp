#include "dirlin/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace dirlin {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("DIRLIN_LOG");
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

void log_msg(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static std::mutex mu;
  static const char* names[] = {"off", "error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[dirlin %s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace dirlin
