#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "socioscope/common.hpp"

namespace socioscope::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

inline std::string escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    // libstdc++ 11 supports floating from_chars.
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
  } else {
    if (s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
  }
}

/// Line-oriented reader that checks the header and tracks 1-based line numbers.
class Reader {
 public:
  Reader(std::istream& in, const std::vector<std::string>& expected_header) : in_(in) {
    std::string line;
    if (!next_line(line)) throw ParseError(1, "missing header");
    auto header = split(line);
    for (auto& h : header) h = std::string(trim(h));
    if (header != expected_header) {
      std::string want;
      for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
      throw ParseError(line_, "unexpected header, want '" + want + "'");
    }
    width_ = expected_header.size();
  }

  /// Reads the next non-empty record; false at end of input.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (next_line(line)) {
      if (trim(line).empty()) continue;
      fields = split(line);
      if (fields.size() != width_) {
        throw ParseError(line_, "expected " + std::to_string(width_) + " fields, got " +
                                    std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t width_ = 0;
};

/// Formats a double for CSV output; missing values become "NA".
inline std::string format(double v) {
  if (is_missing(v)) return "NA";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline double parse_cell(std::string_view s) {
  s = trim(s);
  if (s == "NA") return kMissing;
  double v = 0;
  if (!parse_number(s, v)) throw Error("bad numeric cell '" + std::string(s) + "'");
  return v;
}

}  // namespace socioscope::csv
