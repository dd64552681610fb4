#include "bilat/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace bilat {

namespace {

LogLevel level_from_env() {
    const char* env = std::getenv("BILAT_SIM_LOG_LEVEL");
    if (env == nullptr) {
        return LogLevel::Info;
    }
    const std::string v(env);
    if (v == "quiet") return LogLevel::Quiet;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
}

std::atomic<LogLevel>& current() {
    static std::atomic<LogLevel> level{level_from_env()};
    return level;
}

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

void emit(const char* tag, std::string_view message) {
    std::lock_guard lock(sink_mutex());
    std::cerr << "[bilat-sim " << tag << "] " << message << '\n';
}

}  // namespace

LogLevel log_level() { return current().load(); }

void set_log_level(LogLevel level) { current().store(level); }

void log_info(std::string_view message) {
    if (log_level() != LogLevel::Quiet) {
        emit("info", message);
    }
}

void log_debug(std::string_view message) {
    if (log_level() == LogLevel::Debug) {
        emit("debug", message);
    }
}

}  // namespace bilat
