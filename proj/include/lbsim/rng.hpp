#pragma once

#include <cstdint>
#include <string_view>

namespace lbsim {

// 64-bit FNV-1a over raw bytes. Used for sub-seed derivation and for the
// IP/URL hash policies.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256** seeded through splitmix64. Each logical stream derives its
// sub-seed as splitmix64(run_seed ^ fnv1a64(label)), so adding a new stream
// never perturbs existing ones.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng for_stream(std::uint64_t run_seed, std::string_view label);

  std::uint64_t next_u64();

  // [0, 1)
  double uniform();

  // [0, n)
  std::uint32_t uniform_int(std::uint32_t n);

  double exponential(double mean);

  // standard normal via Box-Muller (cosine branch, two uniforms per draw)
  double normal();

 private:
  std::uint64_t s_[4];
};

}  // namespace lbsim
