#include "ocrprobe/harness/io.h"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ocrprobe/unicode.h"

namespace ocrprobe::harness {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string ReadUtf8File(const fs::path& path) {
  std::string data = ReadFile(path);
  const std::size_t bad = unicode::FindInvalidUtf8(data);
  if (bad != std::string::npos) {
    throw InputError(path.string() + ": invalid UTF-8 at byte offset " +
                     std::to_string(bad));
  }
  return data;
}

void WriteFile(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

RunLock::RunLock(const fs::path& dir) : path_(dir / kFileName) {
  fs::create_directories(dir);
  // "x" fails if the file exists, which makes the claim atomic.
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (f == nullptr) {
    throw InputError("output directory " + dir.string() +
                     " is locked by another run (remove " + path_.string() +
                     " if stale)");
  }
  std::fclose(f);
}

RunLock::~RunLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

std::size_t DefaultThreads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace ocrprobe::harness
