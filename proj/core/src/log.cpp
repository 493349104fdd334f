#include "tnbma/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace tnbma::log {

namespace {

Level parse_env() {
  const char* v = std::getenv("TNBMA_LOG");
  if (v == nullptr) return Level::warn;
  const std::string s(v);
  if (s == "debug") return Level::debug;
  if (s == "info") return Level::info;
  if (s == "warn") return Level::warn;
  if (s == "error") return Level::error;
  if (s == "off") return Level::off;
  return Level::warn;
}

Level g_threshold = parse_env();
std::mutex g_mutex;

const char* tag(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    default: return "?";
  }
}

}  // namespace

Level threshold() { return g_threshold; }

void set_threshold(Level level) { g_threshold = level; }

void write(Level level, const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[tnbma " << tag(level) << "] " << message << '\n';
}

}  // namespace tnbma::log
