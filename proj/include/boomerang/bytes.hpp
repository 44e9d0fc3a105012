#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace boomerang {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

// Raised on any malformed serialized input.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

class Writer {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v);
  void u32(uint32_t v);
  void u64(uint64_t v);
  void raw(ByteView data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  // 2-byte big-endian length prefix.
  void var16(ByteView data);
  void count16(size_t n);

  const Bytes& bytes() const& { return buf_; }
  Bytes&& bytes() && { return std::move(buf_); }
  size_t size() const { return buf_.size(); }

 private:
  Bytes buf_;
};

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  uint64_t u64();
  ByteView raw(size_t n);
  Bytes var16();
  size_t count16(size_t max);

  size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  // Throws unless every byte was consumed.
  void expect_done() const;

 private:
  ByteView data_;
  size_t pos_ = 0;
};

}  // namespace boomerang
