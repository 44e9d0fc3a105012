#include "boomerang/bytes.hpp"

namespace boomerang {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0F]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return out;
}

void Writer::u16(uint16_t v) {
  buf_.push_back(static_cast<uint8_t>(v >> 8));
  buf_.push_back(static_cast<uint8_t>(v));
}

void Writer::u32(uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<uint8_t>(v >> s));
}

void Writer::u64(uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<uint8_t>(v >> s));
}

void Writer::var16(ByteView data) {
  count16(data.size());
  raw(data);
}

void Writer::count16(size_t n) {
  if (n > 0xFFFF) throw std::length_error("vector too long for 16-bit count");
  u16(static_cast<uint16_t>(n));
}

ByteView Reader::raw(size_t n) {
  if (n > remaining()) throw DecodeError("truncated input");
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

uint8_t Reader::u8() { return raw(1)[0]; }

uint16_t Reader::u16() {
  ByteView b = raw(2);
  return static_cast<uint16_t>((b[0] << 8) | b[1]);
}

uint32_t Reader::u32() {
  ByteView b = raw(4);
  return (uint32_t{b[0]} << 24) | (uint32_t{b[1]} << 16) | (uint32_t{b[2]} << 8) | b[3];
}

uint64_t Reader::u64() {
  uint64_t hi = u32();
  return (hi << 32) | u32();
}

Bytes Reader::var16() {
  uint16_t n = u16();
  ByteView b = raw(n);
  return Bytes(b.begin(), b.end());
}

size_t Reader::count16(size_t max) {
  uint16_t n = u16();
  if (n > max) throw DecodeError("vector count exceeds limit");
  return n;
}

void Reader::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes");
}

}  // namespace boomerang
