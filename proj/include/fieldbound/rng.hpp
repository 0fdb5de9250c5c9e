#pragma once

#include <cstdint>

#include "fieldbound/lattice.hpp"

namespace fieldbound::rng {

// splitmix64 finalizer. Counter-based draws hash (seed, sample index, site)
// through it, so a draw is a pure function of those three: identical across
// runs, evaluation orders and thread counts.
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline uint64_t stream_base(uint64_t seed, uint64_t index) {
  uint64_t b = mix64(seed ^ 0xD1B54A32D192ED03ull);
  return mix64(b + index * 0x9E3779B97F4A7C15ull);
}

inline uint64_t site_key(const SitePoint& s) {
  uint64_t h = 0x517CC1B727220A95ull;
  for (int k = 0; k < s.dim(); ++k)
    h = mix64(h ^ static_cast<uint64_t>(static_cast<uint32_t>(s[k])) ^ (static_cast<uint64_t>(k) << 32));
  return h;
}

inline uint64_t draw_u64(uint64_t base, uint64_t key) { return mix64(base ^ key); }

// Uniform in [0, 1), 53 bits.
inline double to_unit(uint64_t w) {
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

// Inverse standard normal CDF, Acklam's rational approximation (|rel err| < 1.2e-9).
double normal_quantile(double p);

// Two-sided z value for a given confidence level, e.g. 0.99 -> 2.5758...
double two_sided_z(double confidence);

}  // namespace fieldbound::rng
