#pragma once

#include <string_view>

namespace bilat {

enum class LogLevel { Quiet, Info, Debug };

/// Level from BILAT_SIM_LOG_LEVEL (quiet|info|debug), read once; defaults to info.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_info(std::string_view message);
void log_debug(std::string_view message);

}  // namespace bilat
