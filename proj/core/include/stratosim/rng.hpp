#pragma once

#include <cmath>
#include <cstdint>

namespace stratosim::rng {

// Counter-based streams: draw k of stream (seed, purpose, index) is a pure
// function of its arguments, so batches are identical no matter how work is
// split across threads, and streams with different purposes never overlap.

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

/// SplitMix64 finalizer (Stafford mix13).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

/// Collapse (seed, purpose, index) into a stream key. Two mixing rounds per
/// word keep distinct tuples decorrelated.
inline constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t purpose,
                                             std::uint64_t index) {
  std::uint64_t h = mix64(seed + kGamma);
  h = mix64(h ^ (purpose * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull));
  h = mix64(h ^ (index * 0x9e6c63d0876a9a47ull + 0xda942042e4dd58b5ull));
  return h;
}

/// Stream purposes used by the toolkit. Values are arbitrary but frozen:
/// changing them changes every sampled path.
enum class StreamPurpose : std::uint64_t {
  GaussianPaths = 0x47505348u,   // driving-process paths
  LimitPaths = 0x4c505348u,      // fresh paths for limit-law samples
  Corrections = 0x434f5252u,     // independent correction increments
  Generic = 0x47454e52u,
};

/// One reproducible stream of uniforms / normals addressed by counter.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
      : key_(derive_stream(seed, static_cast<std::uint64_t>(purpose), index)) {}
  NormalStream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
      : key_(derive_stream(seed, purpose, index)) {}

  /// k-th uniform in (0,1), open at both ends.
  double uniform(std::uint64_t k) const {
    const std::uint64_t bits = mix64(key_ + (k + 1) * kGamma);
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// k-th standard normal (Box-Muller on uniforms 2k, 2k+1).
  double normal(std::uint64_t k) const {
    const double u1 = uniform(2 * k);
    const double u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace stratosim::rng
