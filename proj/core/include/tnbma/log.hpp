#pragma once

#include <sstream>
#include <string>

namespace tnbma::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Threshold comes from the TNBMA_LOG environment variable
// (debug|info|warn|error|off); default is warn.
Level threshold();
void set_threshold(Level level);
void write(Level level, const std::string& message);

namespace detail {
template <typename... Args>
void emit(Level level, Args&&... args) {
  if (level < threshold()) return;
  std::ostringstream os;
  (os << ... << args);
  write(level, os.str());
}
}  // namespace detail

template <typename... Args>
void debug(Args&&... args) { detail::emit(Level::debug, std::forward<Args>(args)...); }
template <typename... Args>
void info(Args&&... args) { detail::emit(Level::info, std::forward<Args>(args)...); }
template <typename... Args>
void warn(Args&&... args) { detail::emit(Level::warn, std::forward<Args>(args)...); }
template <typename... Args>
void error(Args&&... args) { detail::emit(Level::error, std::forward<Args>(args)...); }

}  // namespace tnbma::log
