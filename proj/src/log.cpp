#include "lowres/log.hpp"

#include <atomic>
#include <mutex>

namespace lowres::log {

namespace {

std::atomic<int> g_level{static_cast<int>(Level::kInfo)};
std::mutex g_mutex;

void emit(std::string_view tag, std::string_view msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::clog << "[" << tag << "] " << msg << '\n';
}

}  // namespace

Level verbosity() { return static_cast<Level>(g_level.load()); }
void set_verbosity(Level level) { g_level.store(static_cast<int>(level)); }

void info(std::string_view msg) {
  if (verbosity() >= Level::kInfo) emit("info", msg);
}

void warn(std::string_view msg) {
  if (verbosity() >= Level::kInfo) emit("warn", msg);
}

void debug(std::string_view msg) {
  if (verbosity() >= Level::kDebug) emit("debug", msg);
}

}  // namespace lowres::log
