#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace ocsim {

// xoshiro256++ seeded via splitmix64. Self-contained so that draw sequences
// are identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next();

  // [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform over [0, n), n >= 1; fixed-point multiply, no rejection loop
  uint32_t bounded(uint32_t n) {
    return static_cast<uint32_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Independent stream derived from (seed, name). Adding a new named stream
  // never perturbs draws on existing streams.
  static Rng stream(uint64_t seed, std::string_view name);

 private:
  std::array<uint64_t, 4> s_;
};

uint64_t fnv1a64(std::string_view data);

}  // namespace ocsim
