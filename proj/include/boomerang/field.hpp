#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "boomerang/bytes.hpp"

namespace boomerang {

class RandomSource;

// 256-bit unsigned integer, little-endian 64-bit limbs.
struct U256 {
  std::array<uint64_t, 4> w{};

  static U256 from_u64(uint64_t v) { return U256{{v, 0, 0, 0}}; }
  // Big-endian, at most 32 bytes.
  static U256 from_be(ByteView be);
  static U256 from_hex(std::string_view hex);

  Bytes to_be(size_t len) const;
  std::string to_hex() const;
  std::string to_dec() const;

  bool is_zero() const { return (w[0] | w[1] | w[2] | w[3]) == 0; }
  bool bit(size_t i) const { return (w[i / 64] >> (i % 64)) & 1; }
  size_t bit_length() const;
  bool fits_u64() const { return (w[1] | w[2] | w[3]) == 0; }

  friend bool operator==(const U256&, const U256&) = default;
  friend std::strong_ordering operator<=>(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
      if (a.w[i] != b.w[i]) return a.w[i] <=> b.w[i];
    }
    return std::strong_ordering::equal;
  }
};

// a + b, returns carry.
inline uint64_t add_carry(U256& out, const U256& a, const U256& b);
// a - b, returns borrow.
inline uint64_t sub_borrow(U256& out, const U256& a, const U256& b);
U256 shr1(const U256& a);

class Field;

// Element of a prime field, held in Montgomery form. The field pointer is the modulus tag.
struct Fe {
  U256 v;
  const Field* f = nullptr;

  Fe operator+(const Fe& o) const;
  Fe operator-(const Fe& o) const;
  Fe operator*(const Fe& o) const;
  Fe operator-() const;
  Fe& operator+=(const Fe& o) { return *this = *this + o; }
  Fe& operator-=(const Fe& o) { return *this = *this - o; }
  Fe& operator*=(const Fe& o) { return *this = *this * o; }

  Fe sqr() const { return *this * *this; }
  Fe pow(const U256& e) const;
  // Zero maps to zero.
  Fe inv() const;
  std::optional<Fe> sqrt() const;
  // 1, -1 or 0.
  int legendre() const;

  bool is_zero() const { return v.is_zero(); }
  bool is_one() const;
  U256 value() const;
  uint64_t low_u64() const { return value().w[0]; }
  bool is_odd() const { return value().w[0] & 1; }
  Bytes to_bytes() const;

  friend bool operator==(const Fe& a, const Fe& b) { return a.f == b.f && a.v == b.v; }
};

// Constant-time conditional swap (swap when bit == 1).
void cswap(Fe& a, Fe& b, uint64_t bit);

class Field {
 public:
  explicit Field(const U256& modulus);
  Field(const Field&) = delete;
  Field& operator=(const Field&) = delete;

  const U256& modulus() const { return m_; }
  size_t bits() const { return bits_; }
  size_t byte_len() const { return (bits_ + 7) / 8; }

  Fe zero() const { return Fe{U256{}, this}; }
  Fe one() const { return Fe{one_, this}; }
  Fe from_u64(uint64_t v) const;
  Fe from_int(int64_t v) const;
  // Any value below 2^256, reduced.
  Fe from_u256(const U256& v) const;
  // Big-endian bytes of any length, reduced mod m.
  Fe from_bytes_reduce(ByteView be) const;
  // Exactly byte_len() bytes, value < m.
  std::optional<Fe> from_bytes(ByteView be) const;
  Fe decode(Reader& r) const;
  Fe random(RandomSource& rng) const;
  Fe random_nonzero(RandomSource& rng) const;

  inline Fe mont_mul(const U256& a, const U256& b) const;

 private:
  friend struct Fe;
  U256 m_;
  uint64_t n0_ = 0;  // -m^-1 mod 2^64
  U256 one_;         // R mod m
  U256 r2_;          // R^2 mod m
  U256 r3_;          // R^3 mod m
  size_t bits_ = 0;
  // Tonelli-Shanks data.
  uint32_t two_adicity_ = 0;
  U256 odd_part_;
  U256 sqrt_exp_;   // (m+1)/4 when m = 3 mod 4, else (odd_part+1)/2
  U256 legendre_exp_;
  U256 nonresidue_root_;  // z^odd_part, Montgomery form
};

inline Fe Field::mont_mul(const U256& a, const U256& b) const {
  using u128 = unsigned __int128;
  uint64_t t0 = 0, t1 = 0, t2 = 0, t3 = 0, t4 = 0;
  const uint64_t m0 = m_.w[0], m1 = m_.w[1], m2 = m_.w[2], m3 = m_.w[3];
  for (int i = 0; i < 4; ++i) {
    const uint64_t bi = b.w[i];
    u128 c = u128{t0} + u128{a.w[0]} * bi;
    t0 = static_cast<uint64_t>(c);
    c = u128{t1} + u128{a.w[1]} * bi + (c >> 64);
    t1 = static_cast<uint64_t>(c);
    c = u128{t2} + u128{a.w[2]} * bi + (c >> 64);
    t2 = static_cast<uint64_t>(c);
    c = u128{t3} + u128{a.w[3]} * bi + (c >> 64);
    t3 = static_cast<uint64_t>(c);
    c = u128{t4} + (c >> 64);
    t4 = static_cast<uint64_t>(c);
    const uint64_t t5 = static_cast<uint64_t>(c >> 64);

    const uint64_t mq = t0 * n0_;
    c = u128{t0} + u128{mq} * m0;
    c = u128{t1} + u128{mq} * m1 + (c >> 64);
    t0 = static_cast<uint64_t>(c);
    c = u128{t2} + u128{mq} * m2 + (c >> 64);
    t1 = static_cast<uint64_t>(c);
    c = u128{t3} + u128{mq} * m3 + (c >> 64);
    t2 = static_cast<uint64_t>(c);
    c = u128{t4} + (c >> 64);
    t3 = static_cast<uint64_t>(c);
    t4 = t5 + static_cast<uint64_t>(c >> 64);
  }
  U256 r{{t0, t1, t2, t3}};
  if (t4 != 0 || r >= m_) sub_borrow(r, r, m_);
  return Fe{r, this};
}

inline Fe Fe::operator+(const Fe& o) const {
  U256 s;
  uint64_t carry = add_carry(s, v, o.v);
  if (carry || s >= f->m_) sub_borrow(s, s, f->m_);
  return Fe{s, f};
}

inline Fe Fe::operator-(const Fe& o) const {
  U256 d;
  if (sub_borrow(d, v, o.v)) add_carry(d, d, f->m_);
  return Fe{d, f};
}

inline Fe Fe::operator*(const Fe& o) const { return f->mont_mul(v, o.v); }

inline uint64_t add_carry(U256& out, const U256& a, const U256& b) {
  using u128 = unsigned __int128;
  u128 c = 0;
  for (int i = 0; i < 4; ++i) {
    c += u128{a.w[i]} + b.w[i];
    out.w[i] = static_cast<uint64_t>(c);
    c >>= 64;
  }
  return static_cast<uint64_t>(c);
}

inline uint64_t sub_borrow(U256& out, const U256& a, const U256& b) {
  using u128 = unsigned __int128;
  uint64_t borrow = 0;
  for (int i = 0; i < 4; ++i) {
    u128 d = u128{a.w[i]} - b.w[i] - borrow;
    out.w[i] = static_cast<uint64_t>(d);
    borrow = static_cast<uint64_t>(d >> 64) & 1;
  }
  return borrow;
}

}  // namespace boomerang
