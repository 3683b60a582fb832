#ifndef UNIFSEL_PRNG_HPP
#define UNIFSEL_PRNG_HPP

#include <cstdint>
#include <span>

namespace unifsel {

// Counter-based generator: output i of stream s under seed k is
//   mix64(mix64(k) ^ mix64(s ^ STREAM_SALT) ^ (GOLDEN * i))
// where mix64 is the SplitMix64 finalizer. State is just (seed, stream,
// counter), so any draw can be replayed from its coordinates and streams
// split cheaply for parallel workers. All arithmetic is plain uint64,
// identical on every platform.
class Prng {
 public:
  Prng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_key_(mix64(seed)), stream_key_(mix64(stream ^ kStreamSalt)) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(seed_key_ ^ stream_key_ ^ (kGolden * counter_));
  }

  // uniform in [0, 1) with 53 random mantissa bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  // index drawn from an (unnormalized is fine) probability row by CDF walk
  int categorical(std::span<const double> probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // independent child stream for task `index`; independent of draws made so far
  Prng split(std::uint64_t index) const {
    Prng child(0, 0);
    child.seed_key_ = seed_key_;
    child.stream_key_ = mix64(stream_key_ ^ mix64(index ^ kSplitSalt));
    return child;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;
  static constexpr std::uint64_t kSplitSalt = 0x8cb92ba72f3d8dd7ULL;

  std::uint64_t seed_key_;
  std::uint64_t stream_key_;
  std::uint64_t counter_ = 0;
};

}  // namespace unifsel

#endif
