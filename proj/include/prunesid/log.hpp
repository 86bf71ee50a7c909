#pragma once

#include <string_view>

namespace prunesid::log {

enum class Level { quiet = 0, info = 1, debug = 2 };

// Read once from PRUNESID_LOG (quiet|info|debug); defaults to info.
Level level();

void warn(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

}  // namespace prunesid::log
