#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fragsim {

/// splitmix64 finalizer, used to decorrelate (seed, stream) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded uniform/exponential stream. One instance per worker or per path;
/// (seed, stream) pairs give decorrelated, reproducible streams. Exponentials
/// come from the inverse CDF so that two simulations consuming the same
/// (epsilon, theta) draw order see bit-identical randomness.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix64(mix64(seed) ^ (stream + 0x9e3779b97f4a7c15ULL))) {}

  /// Uniform on the open interval (0,1): never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exp(1) via -log(U).
  double exponential() { return -std::log(uniform()); }

private:
  std::mt19937_64 engine_;
};

}  // namespace fragsim
