#pragma once

#include <cstdint>
#include <span>

#include "boomerang/hash.hpp"

namespace boomerang {

class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<uint8_t> out) = 0;
  uint64_t next_u64();
  // Uniform in [0, bound).
  uint64_t uniform(uint64_t bound);
};

// Operating-system randomness.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<uint8_t> out) override;
};

// Reproducible stream: SHA256(seed || counter) blocks.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(uint64_t seed);
  explicit DeterministicRandom(ByteView seed);
  void fill(std::span<uint8_t> out) override;

 private:
  Digest seed_{};
  uint64_t counter_ = 0;
  Digest block_{};
  size_t used_ = 32;
};

}  // namespace boomerang
