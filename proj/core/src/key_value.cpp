#include "tnbma/key_value.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tnbma/errors.hpp"

namespace tnbma {

namespace {

std::string_view trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void KeyValueDoc::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void KeyValueDoc::set_real(std::string key, double value) {
  set(std::move(key), format_real(value));
}

void KeyValueDoc::set_int(std::string key, long long value) {
  set(std::move(key), std::to_string(value));
}

bool KeyValueDoc::has(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return true;
  }
  return false;
}

const std::string& KeyValueDoc::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw ParseError("missing key: " + std::string(key));
}

double KeyValueDoc::get_real(std::string_view key) const {
  const std::string& v = get(key);
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError("key '" + std::string(key) + "': not a real number: " + v);
  }
}

long long KeyValueDoc::get_int(std::string_view key) const {
  const std::string& v = get(key);
  try {
    size_t pos = 0;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ParseError("key '" + std::string(key) + "': not an integer: " + v);
  }
}

std::string KeyValueDoc::get_or(std::string_view key, std::string fallback) const {
  return has(key) ? get(key) : std::move(fallback);
}

double KeyValueDoc::get_real_or(std::string_view key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}

long long KeyValueDoc::get_int_or(std::string_view key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::string KeyValueDoc::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) {
    os << k << " = " << v << '\n';
  }
  return os.str();
}

KeyValueDoc KeyValueDoc::from_text(std::string_view text, std::string_view source) {
  KeyValueDoc doc;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
    }
    if (doc.has(key)) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                       ": duplicate key: " + key);
    }
    doc.entries_.emplace_back(std::move(key), std::move(value));
  }
  return doc;
}

void KeyValueDoc::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  out << to_text();
  if (!out) throw ParseError("write failed: " + path.string());
}

KeyValueDoc KeyValueDoc::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path.string());
}

}  // namespace tnbma
