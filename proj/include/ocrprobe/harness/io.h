#ifndef OCRPROBE_HARNESS_IO_H_
#define OCRPROBE_HARNESS_IO_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace ocrprobe::harness {

namespace fs = std::filesystem;

// Bad user input. The message names the file and, where known, the line or
// byte offset.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadFile(const fs::path& path);

// Reads a file and checks it is well-formed UTF-8.
std::string ReadUtf8File(const fs::path& path);

// Writes `content`, creating parent directories.
void WriteFile(const fs::path& path, std::string_view content);

std::string Sha256Hex(std::string_view data);

// Exclusive claim on an output directory for the lifetime of the object.
// Throws InputError if another run holds it.
class RunLock {
 public:
  explicit RunLock(const fs::path& dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

  static constexpr const char* kFileName = ".ocrprobe.lock";

 private:
  fs::path path_;
};

std::size_t DefaultThreads();

// Runs fn(i) for i in [0, n) on up to `threads` workers. Callers write
// results into slot i of a preallocated vector, so output order never
// depends on scheduling. The first exception thrown is rethrown here.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace ocrprobe::harness

#endif  // OCRPROBE_HARNESS_IO_H_
