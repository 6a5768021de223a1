#include "ropscan/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace ropscan::log {

namespace {

Level level_from_env() {
    const char* env = std::getenv("ROPSCAN_LOG");
    if (!env) return Level::Warn;
    if (std::strcmp(env, "error") == 0) return Level::Error;
    if (std::strcmp(env, "warn") == 0) return Level::Warn;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    return Level::Warn;
}

std::atomic<int> g_level{-1};
std::mutex g_write_mutex;

const char* tag(Level lvl) {
    switch (lvl) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        case Level::Debug: return "debug";
    }
    return "?";
}

} // namespace

Level level() {
    int lvl = g_level.load(std::memory_order_relaxed);
    if (lvl < 0) {
        lvl = static_cast<int>(level_from_env());
        g_level.store(lvl, std::memory_order_relaxed);
    }
    return static_cast<Level>(lvl);
}

void set_level(Level lvl) { g_level.store(static_cast<int>(lvl), std::memory_order_relaxed); }

void write(Level lvl, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(level())) return;
    std::lock_guard<std::mutex> lock(g_write_mutex);
    std::fprintf(stderr, "ropscan[%s] %s\n", tag(lvl), msg.c_str());
}

} // namespace ropscan::log
