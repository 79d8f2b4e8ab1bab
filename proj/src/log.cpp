#include "pitchlab/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

namespace pitchlab::log {
namespace {

std::atomic<Level> g_level{Level::warn};
std::mutex g_mutex;

void emit(Level at, std::string_view tag, std::string_view message) {
  if (static_cast<int>(g_level.load()) < static_cast<int>(at)) return;
  std::string line;
  line.reserve(message.size() + 16);
  line.append("pitchlab: ").append(tag).append(": ").append(message).push_back('\n');
  std::lock_guard lock(g_mutex);
  std::cerr << line << std::flush;
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void warn(std::string_view message) { emit(Level::warn, "warning", message); }
void info(std::string_view message) { emit(Level::info, "info", message); }
void debug(std::string_view message) { emit(Level::debug, "debug", message); }

}  // namespace pitchlab::log
