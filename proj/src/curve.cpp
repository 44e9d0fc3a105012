#include "boomerang/curve.hpp"

#include <stdexcept>

#include "boomerang/hash.hpp"

namespace boomerang {

Curve::Curve(std::string name, const Field& base, const Field& scalar, const Fe& a, const Fe& b)
    : name_(std::move(name)), base_(base), scalar_(scalar), a_(a), b_(b), a_zero_(a.is_zero()) {
  if (a.f != &base || b.f != &base) throw std::invalid_argument("Curve: coefficients not in base field");
  G = H = identity();
}

Point Curve::identity() const { return Point{base_.one(), base_.one(), base_.zero(), this}; }

Fe Curve::rhs(const Fe& x) const {
  Fe r = x.sqr() * x + b_;
  if (!a_zero_) r += a_ * x;
  return r;
}

bool Curve::on_curve(const Fe& x, const Fe& y) const {
  return x.f == &base_ && y.f == &base_ && y.sqr() == rhs(x);
}

std::optional<Point> Curve::from_affine(const Fe& x, const Fe& y) const {
  if (!on_curve(x, y)) return std::nullopt;
  return Point{x, y, base_.one(), this};
}

Point Curve::decode(ByteView bytes) const {
  if (bytes.size() != encoded_len()) throw DecodeError("point encoding has wrong length");
  ByteView xb = bytes.subspan(1);
  if (bytes[0] == 0x00) {
    for (uint8_t b : xb) {
      if (b != 0) throw DecodeError("identity encoding has nonzero body");
    }
    return identity();
  }
  if (bytes[0] != 0x02 && bytes[0] != 0x03) throw DecodeError("bad point sign byte");
  auto x = base_.from_bytes(xb);
  if (!x) throw DecodeError("point x out of range");
  auto y = rhs(*x).sqrt();
  if (!y) throw DecodeError("point x not on curve");
  bool want_odd = bytes[0] == 0x03;
  if (y->is_odd() != want_odd) {
    *y = -*y;
    if (y->is_odd() != want_odd) throw DecodeError("bad point sign byte");
  }
  return Point{*x, *y, base_.one(), this};
}

Point Curve::decode(Reader& r) const { return decode(r.raw(encoded_len())); }

Point Curve::hash_to_curve(std::string_view label, uint32_t index) const {
  Sha256 h;
  Writer w;
  w.var16(as_bytes("boomerang/hash-to-curve/v1"));
  w.var16(as_bytes(name_));
  w.var16(base_.modulus().to_be(32));
  w.var16(a_.to_bytes());
  w.var16(b_.to_bytes());
  w.var16(as_bytes(label));
  w.u32(index);
  h.update(w.bytes());
  const size_t width = 2 * base_.byte_len() + 16;
  for (uint32_t ctr = 0;; ++ctr) {
    Sha256 hc(h);
    hc.update_u32(ctr);
    Fe x = base_.from_bytes_reduce(expand(hc, width));
    auto y = rhs(x).sqrt();
    if (!y || y->is_zero()) continue;
    Fe neg = -*y;
    if (neg.value() < y->value()) *y = neg;
    return Point{x, *y, base_.one(), this};
  }
}

std::vector<Point> Curve::derive_generators(size_t count, std::string_view label,
                                            std::span<const Point> exclude) const {
  if (count == 0) throw std::invalid_argument("derive_generators: count must be positive");
  if (label.empty()) throw std::invalid_argument("derive_generators: empty label");
  std::vector<Point> out;
  out.reserve(count);
  for (uint32_t i = 0; out.size() < count; ++i) {
    Point p = hash_to_curve(label, i);
    bool dup = false;
    for (const Point& e : exclude) dup = dup || e == p || e == -p;
    for (const Point& e : out) dup = dup || e == p || e == -p;
    if (!dup) out.push_back(p);
  }
  return out;
}

namespace {

void cswap(Point& a, Point& b, uint64_t bit) {
  boomerang::cswap(a.X, b.X, bit);
  boomerang::cswap(a.Y, b.Y, bit);
  boomerang::cswap(a.Z, b.Z, bit);
}

}  // namespace

Point Curve::mul(const Fe& k, const Point& p, LadderTrace* trace) const {
  if (k.f != &scalar_) throw std::invalid_argument("Curve::mul: scalar from wrong field");
  if (p.c != this) throw std::invalid_argument("Curve::mul: point from wrong curve");
  const U256 e = k.value();
  Point r0 = identity();
  Point r1 = p;
  for (size_t i = scalar_.bits(); i-- > 0;) {
    uint64_t bit = e.bit(i);
    cswap(r0, r1, bit);
    r1 = r0 + r1;
    r0 = r0.dbl();
    if (trace) {
      trace->ops.push_back('a');
      trace->ops.push_back('d');
    }
    cswap(r0, r1, bit);
  }
  return r0;
}

std::span<const Point> Curve::fixed_table(bool blinding) const {
  const int which = blinding ? 1 : 0;
  std::call_once(fixed_once_[which], [&] {
    const size_t windows = (scalar_.bits() + kFixedWindow - 1) / kFixedWindow;
    std::vector<Point> t(windows << kFixedWindow, identity());
    Point base = blinding ? H : G;
    for (size_t i = 0; i < windows; ++i) {
      Point* row = &t[i << kFixedWindow];
      for (size_t d = 1; d < (size_t{1} << kFixedWindow); ++d) row[d] = row[d - 1] + base;
      for (size_t k = 0; k < kFixedWindow; ++k) base = base.dbl();
    }
    fixed_[which] = std::move(t);
  });
  return fixed_[which];
}

Point Curve::mul_vartime(const U256& k, const Point& p) const {
  Point acc = identity();
  for (size_t i = k.bit_length(); i-- > 0;) {
    acc = acc.dbl();
    if (k.bit(i)) acc += p;
  }
  return acc;
}

Point Point::dbl() const {
  if (is_identity() || Y.is_zero()) return c->identity();
  Fe xx = X.sqr();
  Fe yy = Y.sqr();
  Fe yyyy = yy.sqr();
  Fe s = X * yy;
  s = s + s;
  s = s + s;
  Fe m = xx + xx + xx;
  if (!c->a_zero_) {
    Fe zz = Z.sqr();
    m += c->a_ * zz.sqr();
  }
  Fe x3 = m.sqr() - s - s;
  Fe e8 = yyyy + yyyy;
  e8 = e8 + e8;
  e8 = e8 + e8;
  Fe y3 = m * (s - x3) - e8;
  Fe z3 = Y * Z;
  z3 = z3 + z3;
  return Point{x3, y3, z3, c};
}

Point Point::operator+(const Point& o) const {
  if (c != o.c) throw std::invalid_argument("Point: curve mismatch");
  if (is_identity()) return o;
  if (o.is_identity()) return *this;
  Fe z1z1 = Z.sqr();
  Fe z2z2 = o.Z.sqr();
  Fe u1 = X * z2z2;
  Fe u2 = o.X * z1z1;
  Fe s1 = Y * o.Z * z2z2;
  Fe s2 = o.Y * Z * z1z1;
  if (u1 == u2) {
    if (s1 == s2) return dbl();
    return c->identity();
  }
  Fe h = u2 - u1;
  Fe r = s2 - s1;
  Fe hh = h.sqr();
  Fe hhh = h * hh;
  Fe v = u1 * hh;
  Fe x3 = r.sqr() - hhh - v - v;
  Fe y3 = r * (v - x3) - s1 * hhh;
  Fe z3 = Z * o.Z * h;
  return Point{x3, y3, z3, c};
}

Point Point::operator-() const { return Point{X, -Y, Z, c}; }

Point Point::operator-(const Point& o) const { return *this + (-o); }

bool operator==(const Point& a, const Point& b) {
  if (a.c != b.c) return false;
  if (a.is_identity() || b.is_identity()) return a.is_identity() && b.is_identity();
  Fe z1z1 = a.Z.sqr();
  Fe z2z2 = b.Z.sqr();
  if (a.X * z2z2 != b.X * z1z1) return false;
  return a.Y * b.Z * z2z2 == b.Y * a.Z * z1z1;
}

std::pair<Fe, Fe> Point::affine() const {
  if (is_identity()) throw std::domain_error("affine coordinates of the identity");
  Fe zi = Z.inv();
  Fe zi2 = zi.sqr();
  return {X * zi2, Y * zi2 * zi};
}

Bytes Point::encode() const {
  Bytes out(c->encoded_len(), 0);
  if (is_identity()) return out;
  auto [x, y] = affine();
  out[0] = y.is_odd() ? 0x03 : 0x02;
  Bytes xb = x.to_bytes();
  std::copy(xb.begin(), xb.end(), out.begin() + 1);
  return out;
}

std::vector<Affine> batch_affine(std::span<const Point> points) {
  std::vector<Affine> out(points.size());
  if (points.empty()) return out;
  const Field& f = points[0].c->base();
  std::vector<Fe> prefix(points.size());
  Fe acc = f.one();
  for (size_t i = 0; i < points.size(); ++i) {
    prefix[i] = acc;
    if (!points[i].is_identity()) acc *= points[i].Z;
  }
  Fe inv = acc.inv();
  for (size_t i = points.size(); i-- > 0;) {
    const Point& p = points[i];
    if (p.is_identity()) {
      out[i] = Affine{f.zero(), f.zero(), true};
      continue;
    }
    Fe zi = inv * prefix[i];
    inv *= p.Z;
    Fe zi2 = zi.sqr();
    out[i] = Affine{p.X * zi2, p.Y * zi2 * zi, false};
  }
  return out;
}

}  // namespace boomerang
