#pragma once

#include <string_view>

#include "boomerang/curve.hpp"
#include "boomerang/hash.hpp"

namespace boomerang {

// Fiat-Shamir transcript over SHA-256. Every absorb is framed as
// u32(len label) || label || u32(len data) || data.
class Transcript {
 public:
  explicit Transcript(std::string_view domain);

  Transcript& absorb(std::string_view label, ByteView data);
  Transcript& absorb(std::string_view label, const Point& p) { return absorb(label, p.encode()); }
  Transcript& absorb(std::string_view label, const Fe& x) { return absorb(label, x.to_bytes()); }
  Transcript& absorb_u64(std::string_view label, uint64_t v);

  // Uniform in [1, order): 2*width bytes of counter-mode output, reduced, zero mapped to one.
  // The challenge is absorbed back so later challenges depend on it.
  Fe challenge_scalar(std::string_view label, const Field& order);

  Digest state() const { return h_.digest(); }

 private:
  Sha256 h_;
};

}  // namespace boomerang
