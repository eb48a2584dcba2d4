#include "ocrprobe/unicode.h"

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <cstdint>

namespace ocrprobe::unicode {

namespace {

// U8_NEXT reports errors as negative code points and takes int32_t lengths.
template <typename Fn>
std::size_t Walk(std::string_view bytes, Fn&& fn) {
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const int32_t length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return static_cast<std::size_t>(start);
    fn(static_cast<char32_t>(c));
  }
  return std::string_view::npos;
}

}  // namespace

std::u32string Decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const std::size_t bad = Walk(utf8, [&](char32_t c) { out.push_back(c); });
  if (bad != std::string_view::npos) {
    throw EncodingError("invalid UTF-8 at byte offset " + std::to_string(bad),
                        bad);
  }
  return out;
}

std::size_t FindInvalidUtf8(std::string_view bytes) {
  return Walk(bytes, [](char32_t) {});
}

std::string Encode(char32_t cp) {
  char buf[4];
  int32_t i = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), i, 4, static_cast<UChar32>(cp),
            error);
  if (error) return "\xEF\xBF\xBD";
  return std::string(buf, static_cast<std::size_t>(i));
}

std::string Encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 2);
  for (char32_t c : text) out += Encode(c);
  return out;
}

bool IsLetter(char32_t cp) { return u_isalpha(static_cast<UChar32>(cp)); }

bool IsDigit(char32_t cp) { return u_isdigit(static_cast<UChar32>(cp)); }

bool IsWhitespace(char32_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool IsCombiningMark(char32_t cp) {
  switch (u_charType(static_cast<UChar32>(cp))) {
    case U_NON_SPACING_MARK:
    case U_ENCLOSING_MARK:
    case U_COMBINING_SPACING_MARK:
      return true;
    default:
      return false;
  }
}

bool IsUpper(char32_t cp) { return u_isUUppercase(static_cast<UChar32>(cp)); }

bool IsLower(char32_t cp) { return u_isULowercase(static_cast<UChar32>(cp)); }

bool IsGreekLetter(char32_t cp) {
  UErrorCode status = U_ZERO_ERROR;
  return IsLetter(cp) &&
         uscript_getScript(static_cast<UChar32>(cp), &status) == USCRIPT_GREEK;
}

bool IsLatinLetter(char32_t cp) {
  UErrorCode status = U_ZERO_ERROR;
  return IsLetter(cp) &&
         uscript_getScript(static_cast<UChar32>(cp), &status) == USCRIPT_LATIN;
}

char32_t ToLower(char32_t cp) {
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
}

std::vector<std::u32string> Graphemes(std::u32string_view text) {
  std::vector<std::u32string> out;
  for (char32_t c : text) {
    if (!out.empty() && IsCombiningMark(c) && !IsWhitespace(out.back()[0])) {
      out.back().push_back(c);
    } else {
      out.emplace_back(1, c);
    }
  }
  return out;
}

bool IsLetterCluster(std::u32string_view cluster) {
  return !cluster.empty() && IsLetter(cluster.front());
}

std::size_t Length(std::string_view utf8) { return Decode(utf8).size(); }

}  // namespace ocrprobe::unicode
