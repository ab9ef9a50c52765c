#pragma once

#include <string>

namespace dirlin {

enum class LogLevel { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

// Level comes from the DIRLIN_LOG environment variable (off/error/warn/info/
// debug), read once; default warn.
LogLevel log_level();

void log_msg(LogLevel level, const std::string& msg);

inline void log_warn(const std::string& msg) { log_msg(LogLevel::Warn, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::Debug, msg); }

}  // namespace dirlin
