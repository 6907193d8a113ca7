#include "densub/kv.hpp"

#include "densub/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace densub {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_number(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(ErrorKind::Parse, context + ": expected a number, got '" + text + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(ErrorKind::Parse, context + ": expected an integer, got '" + text + "'");
  }
  return value;
}

KeyValue KeyValue::parse(std::istream& in) {
  KeyValue kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::Parse,
           "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": empty key");
    }
    kv.set(key, trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValue KeyValue::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return parse(in);
}

void KeyValue::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void KeyValue::set(const std::string& key, double value) {
  set(key, format_number(value));
}

void KeyValue::set(const std::string& key, std::int64_t value) {
  set(key, std::to_string(value));
}

void KeyValue::set(const std::string& key, const std::vector<double>& values) {
  set(key, join(values));
}

void KeyValue::set(const std::string& key,
                   const std::vector<std::int64_t>& values) {
  set(key, join(values));
}

bool KeyValue::has(const std::string& key) const {
  return find(key).has_value();
}

std::optional<std::string> KeyValue::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KeyValue::get(const std::string& key) const {
  auto v = find(key);
  if (!v) fail(ErrorKind::Parse, "missing key '" + key + "'");
  return *v;
}

double KeyValue::get_double(const std::string& key) const {
  return parse_double(get(key), key);
}

double KeyValue::get_double(const std::string& key, double fallback) const {
  auto v = find(key);
  return v ? parse_double(*v, key) : fallback;
}

std::int64_t KeyValue::get_int(const std::string& key) const {
  return parse_int(get(key), key);
}

std::int64_t KeyValue::get_int(const std::string& key,
                               std::int64_t fallback) const {
  auto v = find(key);
  return v ? parse_int(*v, key) : fallback;
}

bool KeyValue::get_bool(const std::string& key, bool fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  fail(ErrorKind::Parse, key + ": expected a boolean, got '" + *v + "'");
}

std::vector<double> KeyValue::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& f : split_fields(get(key))) out.push_back(parse_double(f, key));
  return out;
}

std::vector<std::int64_t> KeyValue::get_ints(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& f : split_fields(get(key))) out.push_back(parse_int(f, key));
  return out;
}

void KeyValue::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

void KeyValue::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  write(out);
}

}  // namespace densub
