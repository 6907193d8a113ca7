#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace densub {

/// Ordered flat key-value document. Text form is one `key = value` pair per
/// line; blank lines and lines starting with '#' are ignored.
class KeyValue {
 public:
  static KeyValue parse(std::istream& in);
  static KeyValue load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, const std::vector<double>& values);
  void set(const std::string& key, const std::vector<std::int64_t>& values);

  bool has(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::int64_t> get_ints(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  void write(std::ostream& out) const;
  void save(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// 12 significant digits; the common numeric format for all text output.
std::string format_number(double value);

/// Splits on whitespace and commas.
std::vector<std::string> split_fields(const std::string& line);

double parse_double(const std::string& text, const std::string& context);
std::int64_t parse_int(const std::string& text, const std::string& context);

}  // namespace densub
