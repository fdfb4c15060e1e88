#pragma once

#include <cstdio>
#include <string>

namespace orbit::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Level comes from the ORBIT_LOG environment variable (error|warn|info|debug),
// default info. Output goes to stderr so it never mixes with data on stdout.
Level threshold();

void write(Level lvl, const std::string& msg);

inline void error(const std::string& msg) { write(Level::error, msg); }
inline void warn(const std::string& msg) { write(Level::warn, msg); }
inline void info(const std::string& msg) { write(Level::info, msg); }
inline void debug(const std::string& msg) { write(Level::debug, msg); }

}  // namespace orbit::log
