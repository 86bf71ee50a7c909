#include "prunesid/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace prunesid::log {
namespace {

Level parse_level() {
    const char* env = std::getenv("PRUNESID_LOG");
    if (env == nullptr) return Level::info;
    const std::string value(env);
    if (value == "quiet") return Level::quiet;
    if (value == "debug") return Level::debug;
    return Level::info;
}

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

void emit(Level at, std::string_view prefix, std::string_view message) {
    if (level() < at) return;
    std::lock_guard lock(sink_mutex());
    std::cerr << prefix << message << '\n';
}

}  // namespace

Level level() {
    static const Level current = parse_level();
    return current;
}

void warn(std::string_view message) { emit(Level::info, "warning: ", message); }
void info(std::string_view message) { emit(Level::info, "info: ", message); }
void debug(std::string_view message) { emit(Level::debug, "debug: ", message); }

}  // namespace prunesid::log
