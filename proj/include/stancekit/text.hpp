#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "stancekit/error.hpp"

namespace stancekit {

// ASCII-only character classes. Keyword rules treat every byte outside
// [0-9A-Za-z] as non-alphanumeric, so UTF-8 multibyte sequences count as
// boundaries without any decoding.
inline bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string ascii_lower_copy(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

/// ASCII case-insensitive substring test.
inline bool contains_icase(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  if (haystack.size() < needle.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    std::size_t j = 0;
    while (j < needle.size() && ascii_lower(haystack[i + j]) == ascii_lower(needle[j])) ++j;
    if (j == needle.size()) return true;
  }
  return false;
}

inline std::string_view strip_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix)
    return s.substr(prefix.size());
  return s;
}

/// Round-trippable decimal form. Artifact files use this so reloading them
/// reproduces the exact double and reruns stay byte-identical.
inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Six significant digits, for human-facing reports.
inline std::string fmt_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Scientific notation with six significant digits, for p-values.
inline std::string fmt_sci6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

/// Splits one CSV line on commas. Fields in this toolkit's files (quarter
/// tags, group labels, numbers) never contain commas or quotes, so no
/// quoting dialect is needed; writers enforce that.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

/// Strict numeric field parsing: the whole field must be one number.
inline double parse_double_field(const std::string& field, std::string_view what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos == field.size()) return v;
  } catch (const std::exception&) {
  }
  throw ContractViolation(std::string(what) + ": bad number '" + field + "'");
}

inline long long parse_int_field(const std::string& field, std::string_view what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(field, &pos);
    if (pos == field.size()) return v;
  } catch (const std::exception&) {
  }
  throw ContractViolation(std::string(what) + ": bad integer '" + field + "'");
}

inline void require_csv_safe(std::string_view field, std::string_view what) {
  if (field.find(',') != std::string_view::npos ||
      field.find('"') != std::string_view::npos ||
      field.find('\n') != std::string_view::npos) {
    throw ContractViolation(std::string(what) + " may not contain commas, quotes or newlines: '" +
                            std::string(field) + "'");
  }
}

}  // namespace stancekit
