#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace carbon::detail {

// SplitMix64; cheap to seed per sample, which keeps readings a pure function
// of (seed, meter, time).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t acc = 0x243f6a8885a308d3ULL;
  for (auto p : parts) {
    SplitMix64 g(acc ^ p);
    acc = g();
  }
  return acc;
}

}  // namespace carbon::detail
