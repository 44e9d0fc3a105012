#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "boomerang/bytes.hpp"

namespace boomerang {

using Digest = std::array<uint8_t, 32>;

// Incremental SHA-256. Copyable: a copy continues from the same state.
class Sha256 {
 public:
  Sha256();
  Sha256(const Sha256& other);
  Sha256& operator=(const Sha256& other);
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;
  ~Sha256();

  Sha256& update(ByteView data);
  Sha256& update_u32(uint32_t v);
  // Finalizes a copy; this object stays usable.
  Digest digest() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Digest sha256(ByteView data);

// Counter-mode expansion: SHA256(prefix || ctr_be32) for ctr = 0,1,... truncated to n bytes.
Bytes expand(const Sha256& prefix, size_t n);

}  // namespace boomerang
