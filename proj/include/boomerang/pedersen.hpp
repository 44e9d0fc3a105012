#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "boomerang/curve.hpp"

namespace boomerang {

// A message-generator vector plus one blinding generator on a single curve.
struct Generators {
  const Curve* curve = nullptr;
  std::vector<Point> g;
  Point h;

  // G_1..G_n and H of the curve's system parameters.
  static Generators system(const Curve& c);
  // count fresh message generators under `label`, blinding H from the system.
  static Generators derive(const Curve& c, size_t count, std::string_view label);

  size_t size() const { return g.size(); }
};

struct Commitment {
  Point point;

  const Curve& curve() const { return *point.c; }
  Bytes encode() const { return point.encode(); }
  static Commitment decode(const Curve& c, Reader& r) { return {c.decode(r)}; }

  friend bool operator==(const Commitment& a, const Commitment& b) { return a.point == b.point; }
};

struct Opening {
  std::vector<Fe> messages;
  Fe r;
};

// C = r*H + sum m_i*G_i over the first len(messages) generators.
Commitment commit(std::span<const Fe> messages, const Fe& r, const Generators& gens);
inline Commitment commit(const Opening& o, const Generators& gens) { return commit(o.messages, o.r, gens); }

Commitment add(const Commitment& a, const Commitment& b);
Commitment sub(const Commitment& a, const Commitment& b);
inline Commitment operator+(const Commitment& a, const Commitment& b) { return add(a, b); }
inline Commitment operator-(const Commitment& a, const Commitment& b) { return sub(a, b); }

// C + delta*H.
Commitment rerandomize(const Commitment& c, const Fe& delta, const Generators& gens);

// (gamma*z, gamma*C). gamma must be nonzero and z not the identity.
std::pair<Point, Commitment> blind(const Commitment& c, const Fe& gamma, const Point& z);

}  // namespace boomerang
