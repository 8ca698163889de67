#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace hp {

// SplitMix64 step, used to derive well-separated seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-trial random stream derived from (master seed, stream index).
/// Streams are independent of execution order, so trials can run on any
/// thread and still reproduce bit-identical draws.
class TrialRng {
 public:
  TrialRng(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t s = master_seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    gen_.seed(seq);
  }

  explicit TrialRng(std::uint64_t seed) : TrialRng(seed, 0) {}

  std::mt19937_64& engine() { return gen_; }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  std::uint64_t uniform_int(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
  }

  double gaussian() { return normal_(gen_); }

  /// Standard circular complex Gaussian CN(0, 1).
  std::complex<double> cgaussian() {
    return {normal_(gen_) * kInvSqrt2, normal_(gen_) * kInvSqrt2};
  }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hp
