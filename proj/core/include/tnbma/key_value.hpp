#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tnbma {

// Ordered flat key-value text document: one "key = value" per line, '#'
// starts a comment.  Reals are written with 17 significant digits so that
// write/read round-trips are exact.
class KeyValueDoc {
 public:
  void set(std::string key, std::string value);
  void set_real(std::string key, double value);
  void set_int(std::string key, long long value);

  bool has(std::string_view key) const;
  const std::string& get(std::string_view key) const;       // throws ParseError
  double get_real(std::string_view key) const;              // throws ParseError
  long long get_int(std::string_view key) const;            // throws ParseError
  std::string get_or(std::string_view key, std::string fallback) const;
  double get_real_or(std::string_view key, double fallback) const;
  long long get_int_or(std::string_view key, long long fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  std::string to_text() const;
  static KeyValueDoc from_text(std::string_view text, std::string_view source = "<text>");

  void save(const std::filesystem::path& path) const;
  static KeyValueDoc load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// 17-significant-digit decimal rendering (exact double round-trip).
std::string format_real(double value);

}  // namespace tnbma
