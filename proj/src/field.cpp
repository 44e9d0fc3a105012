#include "boomerang/field.hpp"

#include <algorithm>
#include <stdexcept>

#include "boomerang/random.hpp"

namespace boomerang {

using u128 = unsigned __int128;

U256 U256::from_be(ByteView be) {
  if (be.size() > 32) throw std::invalid_argument("U256::from_be: more than 32 bytes");
  U256 out;
  for (size_t i = 0; i < be.size(); ++i) {
    size_t bit = 8 * (be.size() - 1 - i);
    out.w[bit / 64] |= uint64_t{be[i]} << (bit % 64);
  }
  return out;
}

U256 U256::from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  std::string padded(hex);
  if (padded.size() % 2) padded.insert(padded.begin(), '0');
  return from_be(boomerang::from_hex(padded));
}

Bytes U256::to_be(size_t len) const {
  if (len < 32) {
    for (size_t bit = 8 * len; bit < 256; ++bit) {
      if (this->bit(bit)) throw std::invalid_argument("U256::to_be: value too wide");
    }
  }
  Bytes out(len, 0);
  for (size_t i = 0; i < len && i < 32; ++i) {
    size_t bit = 8 * i;
    out[len - 1 - i] = static_cast<uint8_t>(w[bit / 64] >> (bit % 64));
  }
  return out;
}

std::string U256::to_hex() const {
  std::string s = boomerang::to_hex(to_be(32));
  size_t nz = s.find_first_not_of('0');
  return nz == std::string::npos ? "0" : s.substr(nz);
}

std::string U256::to_dec() const {
  if (is_zero()) return "0";
  U256 v = *this;
  std::string out;
  while (!v.is_zero()) {
    u128 rem = 0;
    for (int i = 3; i >= 0; --i) {
      u128 cur = (rem << 64) | v.w[i];
      v.w[i] = static_cast<uint64_t>(cur / 10);
      rem = cur % 10;
    }
    out.push_back(static_cast<char>('0' + static_cast<int>(rem)));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

size_t U256::bit_length() const {
  for (int i = 3; i >= 0; --i) {
    if (w[i] != 0) return 64 * i + (64 - __builtin_clzll(w[i]));
  }
  return 0;
}

U256 shr1(const U256& a) {
  U256 out;
  for (int i = 0; i < 4; ++i) {
    out.w[i] = a.w[i] >> 1;
    if (i < 3) out.w[i] |= a.w[i + 1] << 63;
  }
  return out;
}

namespace {

// (2x) mod m for x < m.
U256 double_mod(const U256& x, const U256& m) {
  U256 d;
  uint64_t carry = add_carry(d, x, x);
  if (carry || d >= m) sub_borrow(d, d, m);
  return d;
}

}  // namespace

Field::Field(const U256& modulus) : m_(modulus), bits_(modulus.bit_length()) {
  if ((m_.w[0] & 1) == 0 || bits_ < 2) throw std::invalid_argument("Field: modulus must be odd and >= 3");
  uint64_t inv = 1;
  for (int i = 0; i < 6; ++i) inv *= 2 - m_.w[0] * inv;
  n0_ = ~inv + 1;

  U256 x = U256::from_u64(1);
  if (x >= m_) sub_borrow(x, x, m_);
  for (int i = 0; i < 256; ++i) x = double_mod(x, m_);
  one_ = x;
  for (int i = 0; i < 256; ++i) x = double_mod(x, m_);
  r2_ = x;
  r3_ = mont_mul(r2_, r2_).v;

  U256 m_minus_1;
  sub_borrow(m_minus_1, m_, U256::from_u64(1));
  legendre_exp_ = shr1(m_minus_1);
  odd_part_ = m_minus_1;
  two_adicity_ = 0;
  while (!odd_part_.bit(0)) {
    odd_part_ = shr1(odd_part_);
    ++two_adicity_;
  }
  if (two_adicity_ == 1) {
    U256 t;
    add_carry(t, m_, U256::from_u64(1));
    sqrt_exp_ = shr1(shr1(t));
  } else {
    U256 t;
    add_carry(t, odd_part_, U256::from_u64(1));
    sqrt_exp_ = shr1(t);
    for (uint64_t z = 2;; ++z) {
      Fe fz = from_u64(z);
      if (fz.legendre() == -1) {
        nonresidue_root_ = fz.pow(odd_part_).v;
        break;
      }
    }
  }
}

Fe Field::from_u64(uint64_t v) const { return mont_mul(U256::from_u64(v), r2_); }

Fe Field::from_int(int64_t v) const {
  if (v >= 0) return from_u64(static_cast<uint64_t>(v));
  return -from_u64(static_cast<uint64_t>(-(v + 1)) + 1);
}

Fe Field::from_u256(const U256& v) const { return mont_mul(v, r2_); }

Fe Field::from_bytes_reduce(ByteView be) const {
  Fe acc = zero();
  const Fe shift{r2_, this};  // the value 2^256 mod m
  size_t head = be.size() % 32;
  size_t pos = 0;
  auto absorb = [&](ByteView chunk) { acc = acc * shift + from_u256(U256::from_be(chunk)); };
  if (head != 0) {
    absorb(be.subspan(0, head));
    pos = head;
  }
  for (; pos < be.size(); pos += 32) absorb(be.subspan(pos, 32));
  return acc;
}

std::optional<Fe> Field::from_bytes(ByteView be) const {
  if (be.size() != byte_len()) return std::nullopt;
  U256 v = U256::from_be(be);
  if (v >= m_) return std::nullopt;
  return from_u256(v);
}

Fe Field::decode(Reader& r) const {
  auto fe = from_bytes(r.raw(byte_len()));
  if (!fe) throw DecodeError("field element out of range");
  return *fe;
}

Fe Field::random(RandomSource& rng) const {
  uint8_t buf[64];
  rng.fill(buf);
  return from_bytes_reduce(buf);
}

Fe Field::random_nonzero(RandomSource& rng) const {
  for (;;) {
    Fe x = random(rng);
    if (!x.is_zero()) return x;
  }
}

Fe Fe::operator-() const {
  if (is_zero()) return *this;
  U256 d;
  sub_borrow(d, f->m_, v);
  return Fe{d, f};
}

Fe Fe::pow(const U256& e) const {
  Fe acc = f->one();
  for (size_t i = e.bit_length(); i-- > 0;) {
    acc = acc.sqr();
    if (e.bit(i)) acc = acc * *this;
  }
  return acc;
}

Fe Fe::inv() const {
  U256 e;
  sub_borrow(e, f->m_, U256::from_u64(2));
  return pow(e);
}

int Fe::legendre() const {
  if (is_zero()) return 0;
  return pow(f->legendre_exp_).is_one() ? 1 : -1;
}

std::optional<Fe> Fe::sqrt() const {
  if (is_zero()) return *this;
  if (f->two_adicity_ == 1) {
    Fe r = pow(f->sqrt_exp_);
    if (r.sqr() == *this) return r;
    return std::nullopt;
  }
  Fe x = pow(f->sqrt_exp_);
  Fe b = pow(f->odd_part_);
  Fe g{f->nonresidue_root_, f};
  uint32_t r = f->two_adicity_;
  while (!b.is_one()) {
    uint32_t i = 0;
    Fe t = b;
    while (!t.is_one()) {
      t = t.sqr();
      if (++i == r) return std::nullopt;
    }
    Fe s = g;
    for (uint32_t k = 0; k + i + 1 < r; ++k) s = s.sqr();
    x *= s;
    g = s.sqr();
    b *= g;
    r = i;
  }
  if (x.sqr() != *this) return std::nullopt;
  return x;
}

bool Fe::is_one() const { return v == f->one_; }

U256 Fe::value() const { return f->mont_mul(v, U256::from_u64(1)).v; }

Bytes Fe::to_bytes() const { return value().to_be(f->byte_len()); }

void cswap(Fe& a, Fe& b, uint64_t bit) {
  const uint64_t mask = ~(bit - 1);
  for (int i = 0; i < 4; ++i) {
    uint64_t t = mask & (a.v.w[i] ^ b.v.w[i]);
    a.v.w[i] ^= t;
    b.v.w[i] ^= t;
  }
}

}  // namespace boomerang
