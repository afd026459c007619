// Diagnostics on stderr, gated by FQT_LOG = off | warn | debug (default warn).
#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace fqt::log {

enum class Level { off = 0, warn = 1, debug = 2 };

inline Level level() {
    static const Level lvl = [] {
        const char* v = std::getenv("FQT_LOG");
        if (v == nullptr) return Level::warn;
        const std::string_view s(v);
        if (s == "off") return Level::off;
        if (s == "debug") return Level::debug;
        return Level::warn;
    }();
    return lvl;
}

inline void emit(Level at, std::string_view tag, std::string_view msg) {
    if (static_cast<int>(level()) < static_cast<int>(at)) return;
    static std::mutex mu;
    const std::lock_guard<std::mutex> lock(mu);
    std::cerr << "fqt[" << tag << "] " << msg << '\n';
}

inline void warn(std::string_view msg) { emit(Level::warn, "warn", msg); }
inline void debug(std::string_view msg) { emit(Level::debug, "debug", msg); }

} // namespace fqt::log
