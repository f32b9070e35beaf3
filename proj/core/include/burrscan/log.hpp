#pragma once

#include <string_view>

namespace burrscan::log {

// Reads BURRSCAN_LOG (trace, debug, info, warn, error, off; default warn).
void configure_from_env();

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

}  // namespace burrscan::log
