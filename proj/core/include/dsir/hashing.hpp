#pragma once

#include <cstdint>
#include <string_view>

namespace dsir {

// splitmix64 finalizer. Bijective on uint64, strong avalanche.
constexpr uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// 64-bit FNV-1a over the raw bytes, seeded by perturbing the offset
// basis with mix64(seed), then finalized with mix64. With seed 0 the
// basis is the standard FNV offset basis. This is the single hash the
// whole toolkit uses: feature bucketing, document-id keying, config
// digests. It is fixed bit-for-bit; changing it invalidates every
// persisted model, weight table, and manifest.
constexpr uint64_t hash64(std::string_view bytes, uint64_t seed = 0) {
  uint64_t h = 0xcbf29ce484222325ULL ^ mix64(seed);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

// Stateless counter RNG: draw `counter` of the stream identified by
// (seed, key). Evaluation order never matters, which is what makes
// sharded runs reproducible.
constexpr uint64_t counter_rand(uint64_t seed, uint64_t key, uint64_t counter) {
  uint64_t x = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  x = mix64(x ^ key);
  return mix64(x ^ counter);
}

// Map 64 random bits to the open interval (0,1); never returns 0 or 1.
constexpr double uniform_open01(uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace dsir
