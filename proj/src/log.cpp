#include "orbit/log.hpp"

#include <cstdlib>
#include <cstring>

namespace orbit::log {

static Level parse_env() {
    const char* v = std::getenv("ORBIT_LOG");
    if (v == nullptr) return Level::info;
    if (std::strcmp(v, "error") == 0) return Level::error;
    if (std::strcmp(v, "warn") == 0) return Level::warn;
    if (std::strcmp(v, "debug") == 0) return Level::debug;
    return Level::info;
}

Level threshold() {
    static const Level lvl = parse_env();
    return lvl;
}

void write(Level lvl, const std::string& msg) {
    if (lvl > threshold()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

}  // namespace orbit::log
