#ifndef OCRPROBE_CSV_H_
#define OCRPROBE_CSV_H_

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace ocrprobe::csv {

// RFC 4180 quoting: fields containing separators, quotes or line breaks are
// wrapped in double quotes with embedded quotes doubled.
inline std::string Escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Shortest round-trip representation; "nan"/"inf" for non-finite values.
inline std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace ocrprobe::csv

#endif  // OCRPROBE_CSV_H_
