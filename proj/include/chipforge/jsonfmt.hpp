#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace chipforge {

// Fixed 6-decimal number formatting for everything serialized. One format,
// one rounding, byte-stable across platforms; negative zero is normalized.
inline void append_f6(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // collapse -0.0
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.6f", v);
  out.append(buf, static_cast<std::size_t>(n));
}

inline std::string f6(double v) {
  std::string s;
  append_f6(s, v);
  return s;
}

inline void append_json_string(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c) & 0xff);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace chipforge
