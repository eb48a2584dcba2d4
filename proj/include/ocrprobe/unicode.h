#ifndef OCRPROBE_UNICODE_H_
#define OCRPROBE_UNICODE_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ocrprobe {

// Raised when input bytes are not well-formed UTF-8. `offset` is the byte
// position of the first offending byte.
class EncodingError : public std::runtime_error {
 public:
  EncodingError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace unicode {

// Decodes UTF-8 into code points. Throws EncodingError on malformed input.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view text);
std::string Encode(char32_t cp);

// Returns the byte offset of the first invalid sequence, or npos.
std::size_t FindInvalidUtf8(std::string_view bytes);

bool IsLetter(char32_t cp);
bool IsDigit(char32_t cp);
bool IsWhitespace(char32_t cp);
bool IsCombiningMark(char32_t cp);
bool IsUpper(char32_t cp);
bool IsLower(char32_t cp);
bool IsGreekLetter(char32_t cp);
bool IsLatinLetter(char32_t cp);
char32_t ToLower(char32_t cp);

// A base code point followed by any combining marks. A leading mark with no
// base forms its own cluster.
std::vector<std::u32string> Graphemes(std::u32string_view text);

// True when the cluster's first code point is a letter.
bool IsLetterCluster(std::u32string_view cluster);

// Number of code points in a UTF-8 string.
std::size_t Length(std::string_view utf8);

}  // namespace unicode
}  // namespace ocrprobe

#endif  // OCRPROBE_UNICODE_H_
