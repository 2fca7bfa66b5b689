#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace batchalloc {

// Counter-based splittable pseudo-random generator built on the SplitMix64
// mixer.  Unlike the standard-library distributions, every draw here is a
// fixed arithmetic function of the state, so streams are bit-reproducible
// across platforms and standard libraries.  Independent substreams are derived
// with split(), which keys a child generator off the parent state and a caller
// supplied word; this lets e.g. an instance generator use one stream per field
// so that overriding one parameter does not reshuffle the others.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ kSeedSalt)) {}

  // Derives an independent stream keyed off this generator's key and a
  // caller-chosen word.  The key never changes as values are drawn, so a
  // split stream does not depend on how much of the parent was consumed.
  Rng split(std::uint64_t word) const {
    return Rng(FromKey{}, mix(key_ ^ mix(word + kSplitSalt)));
  }

  // Convenience: derive a stream from a textual label (FNV-1a hashed).
  Rng split(std::string_view label) const { return split(fnv1a(label)); }

  std::uint64_t next_u64() {
    pos_ += 0x9e3779b97f4a7c15ULL;
    return mix(key_ + pos_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unit-rate exponential via the inverse CDF.
  double exponential() { return -std::log1p(-next_double()); }

  // Uniform integer in [0, n).  Uses the high-word multiply technique; the
  // O(2^-64) modulo bias is irrelevant at simulation scale and the mapping is
  // deterministic, which is what matters here.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  struct FromKey {};
  Rng(FromKey, std::uint64_t raw_key) : key_(raw_key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kSeedSalt = 0x42616c6c6f634f6bULL;
  static constexpr std::uint64_t kSplitSalt = 0xd1342543de82ef95ULL;

  std::uint64_t key_;
  std::uint64_t pos_ = 0;
};

}  // namespace batchalloc
