#pragma once

#include <cstdint>

namespace isscert {

// SplitMix64 finalizer; full avalanche on 64 bits.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based uniform stream. Draw i of a stream is a pure function of
// (key, i), so streams keyed by (seed, stream_id, input_id) are independent
// of evaluation order across inputs.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
      : key_(mix64(mix64(seed) ^ mix64(stream ^ 0x6a09e667f3bcc909ull) ^
                   mix64(substream ^ 0xbb67ae8584caa73bull))) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix64(key_ ^ counter); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Stateful convenience: successive calls continue the stream.
  double next_uniform() { return uniform(pos_++); }
  std::uint64_t position() const { return pos_; }
  void seek(std::uint64_t pos) { pos_ = pos; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t pos_ = 0;
};

}  // namespace isscert
