#ifndef OCRPROBE_RNG_H_
#define OCRPROBE_RNG_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace ocrprobe {

// SplitMix64 step (Steele, Lea & Flood). Used for seeding and for mixing
// derived seeds.
std::uint64_t SplitMix64(std::uint64_t& state);

// 64-bit FNV-1a over the bytes of `s`.
std::uint64_t Fnv1a64(std::string_view s);

// Seed for a named sub-stream: SplitMix64 of (seed XOR FNV-1a(name)).
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view name);

// xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64(seed).
// The derived draws below are defined bit-for-bit, independent of the
// standard library.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t Next();
  std::uint64_t operator()() { return Next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  // Top 53 bits scaled to [0, 1).
  double NextDouble();
  // Uniform in [0, bound) by rejection on the top of the range. bound > 0.
  std::uint64_t Below(std::uint64_t bound);
  // NextDouble() < p.
  bool Bernoulli(double p);

  // Fisher-Yates, iterating from the back: swap(v[i], v[Below(i + 1)]).
  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace ocrprobe

#endif  // OCRPROBE_RNG_H_
