#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boomerang/bytes.hpp"
#include "boomerang/field.hpp"

namespace boomerang {

class Curve;

// Jacobian point (X/Z^2, Y/Z^3); Z == 0 is the identity.
struct Point {
  Fe X, Y, Z;
  const Curve* c = nullptr;

  bool is_identity() const { return Z.is_zero(); }
  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point operator-() const;
  Point& operator+=(const Point& o) { return *this = *this + o; }
  Point& operator-=(const Point& o) { return *this = *this - o; }
  Point dbl() const;

  // Throws std::domain_error on the identity.
  std::pair<Fe, Fe> affine() const;
  Bytes encode() const;

  friend bool operator==(const Point& a, const Point& b);
};

// Normalized form used for coordinate packing. The identity is (0, 0).
struct Affine {
  Fe x, y;
  bool infinity = false;
};

std::vector<Affine> batch_affine(std::span<const Point> points);

// Records the group operations performed by a ladder, in order.
struct LadderTrace {
  std::vector<char> ops;  // 'a' = add, 'd' = double
};

// Short Weierstrass curve y^2 = x^3 + a x + b of prime order |scalar field|.
class Curve {
 public:
  Curve(std::string name, const Field& base, const Field& scalar, const Fe& a, const Fe& b);
  Curve(const Curve&) = delete;
  Curve& operator=(const Curve&) = delete;

  const std::string& name() const { return name_; }
  const Field& base() const { return base_; }
  const Field& scalar() const { return scalar_; }
  const Fe& a() const { return a_; }
  const Fe& b() const { return b_; }

  Point identity() const;
  bool on_curve(const Fe& x, const Fe& y) const;
  std::optional<Point> from_affine(const Fe& x, const Fe& y) const;
  // Right-hand side x^3 + a x + b.
  Fe rhs(const Fe& x) const;

  size_t encoded_len() const { return 1 + base_.byte_len(); }
  Point decode(ByteView bytes) const;
  Point decode(Reader& r) const;

  // Iterated hash-and-increment; the smaller of the two y values is taken.
  Point hash_to_curve(std::string_view label, uint32_t index) const;
  // Label-separated, distinct, skipping anything in `exclude`.
  std::vector<Point> derive_generators(size_t count, std::string_view label,
                                       std::span<const Point> exclude = {}) const;

  // Fixed-length Montgomery ladder over scalar().bits() bits.
  Point mul(const Fe& k, const Point& p, LadderTrace* trace = nullptr) const;
  // Variable-time double-and-add on an arbitrary 256-bit integer.
  Point mul_vartime(const U256& k, const Point& p) const;

  // System generators: base point G, blinding H, message generators G_1..G_n.
  Point G, H;
  std::vector<Point> gens;

  // d * 16^i * G (or H) at index 16 i + d, built on first use. G and H must be final by then.
  static constexpr size_t kFixedWindow = 4;
  std::span<const Point> fixed_table(bool blinding) const;

 private:
  std::string name_;
  const Field& base_;
  const Field& scalar_;
  Fe a_, b_;
  bool a_zero_;
  mutable std::once_flag fixed_once_[2];
  mutable std::vector<Point> fixed_[2];

  friend struct Point;
};

inline Point operator*(const Fe& k, const Point& p) { return p.c->mul(k, p); }

}  // namespace boomerang
