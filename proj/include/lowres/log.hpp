#pragma once

#include <iostream>
#include <string_view>

namespace lowres::log {

enum class Level { kQuiet = 0, kInfo = 1, kDebug = 2 };

Level verbosity();
void set_verbosity(Level level);

void info(std::string_view msg);
void warn(std::string_view msg);
void debug(std::string_view msg);

}  // namespace lowres::log
