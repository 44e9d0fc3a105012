#include "boomerang/transcript.hpp"

namespace boomerang {

Transcript::Transcript(std::string_view domain) { absorb("domain", as_bytes(domain)); }

Transcript& Transcript::absorb(std::string_view label, ByteView data) {
  h_.update_u32(static_cast<uint32_t>(label.size()));
  h_.update(as_bytes(label));
  h_.update_u32(static_cast<uint32_t>(data.size()));
  h_.update(data);
  return *this;
}

Transcript& Transcript::absorb_u64(std::string_view label, uint64_t v) {
  Writer w;
  w.u64(v);
  return absorb(label, w.bytes());
}

Fe Transcript::challenge_scalar(std::string_view label, const Field& order) {
  Sha256 h(h_);
  h.update(as_bytes("challenge"));
  h.update_u32(static_cast<uint32_t>(label.size()));
  h.update(as_bytes(label));
  Fe c = order.from_bytes_reduce(expand(h, 2 * order.byte_len()));
  if (c.is_zero()) c = order.one();
  absorb(label, c);
  return c;
}

}  // namespace boomerang
