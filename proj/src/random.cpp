#include "boomerang/random.hpp"

#include <openssl/rand.h>

#include <stdexcept>

namespace boomerang {

uint64_t RandomSource::next_u64() {
  uint8_t b[8];
  fill(b);
  uint64_t v = 0;
  for (uint8_t x : b) v = (v << 8) | x;
  return v;
}

uint64_t RandomSource::uniform(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform: zero bound");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

void SystemRandom::fill(std::span<uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
}

DeterministicRandom::DeterministicRandom(uint64_t seed) {
  Writer w;
  w.u64(seed);
  seed_ = sha256(w.bytes());
}

DeterministicRandom::DeterministicRandom(ByteView seed) : seed_(sha256(seed)) {}

void DeterministicRandom::fill(std::span<uint8_t> out) {
  for (uint8_t& b : out) {
    if (used_ == block_.size()) {
      Sha256 h;
      h.update(seed_);
      Writer w;
      w.u64(counter_++);
      h.update(w.bytes());
      block_ = h.digest();
      used_ = 0;
    }
    b = block_[used_++];
  }
}

}  // namespace boomerang
