#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "actreg/types.hpp"

namespace actreg {

namespace detail {

// SplitMix64 finalizer.  Bijective on 64-bit words, passes BigCrush as the
// output stage of a counter generator.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based generator: out_i = f(seed, stream, i).  State is three
// words, so a sampler call is reproducible from (seed, stream) alone and
// parallel work just uses distinct streams.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t counter = 0;

  std::uint64_t next_u64() {
    std::uint64_t base = detail::mix64(seed ^ detail::mix64(stream ^ 0xA0761D6478BD642Full));
    return detail::mix64(base + (++counter) * 0x9E3779B97F4A7C15ull);
  }

  // Uniform on [0, 1), 53-bit resolution.
  Real next_double() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); never returns an endpoint.
  Real next_double_open() {
    return (static_cast<Real>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes two uniforms per call.
  Real next_gaussian() {
    Real u1 = next_double_open();
    Real u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Derived stream with independent output sequence; counter starts at 0.
  RngState substream(std::uint64_t s) const {
    return RngState{seed, detail::mix64(stream) ^ detail::mix64(s + 0x8BB84B93962EACC9ull), 0};
  }
};

}  // namespace actreg
