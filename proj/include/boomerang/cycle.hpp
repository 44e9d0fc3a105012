#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "boomerang/curve.hpp"
#include "boomerang/field.hpp"

namespace boomerang {

inline constexpr size_t kDefaultGenerators = 5;

// A 2-cycle: E1 over F_p has q points, E2 over F_q has p points.
struct CycleParams {
  std::string name;
  unsigned security_bits = 0;
  std::unique_ptr<Field> fp, fq;
  std::unique_ptr<Curve> e1, e2;

  const Curve& E1() const { return *e1; }
  const Curve& E2() const { return *e2; }
  // The curve whose base field is the scalar field of `c`.
  const Curve& partner(const Curve& c) const { return &c == e1.get() ? *e2 : *e1; }
};

using Cycle = std::shared_ptr<const CycleParams>;

struct CurveSpec {
  U256 a, b;
  std::optional<std::pair<U256, U256>> generator;  // derived when absent
};

// Builds fields, curves and system generators (G, H, G_1..G_n) for both curves.
Cycle make_cycle(std::string name, unsigned security_bits, const U256& p, const U256& q,
                 const CurveSpec& e1, const CurveSpec& e2, size_t n_gens = kDefaultGenerators);

// secp256k1 over F_p and secq256k1 over F_n. Built once.
Cycle secp_secq();

class ToyCycleNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ToyCycleDescription {
  uint64_t p, q, b1, b2;  // E1: y^2 = x^3 + b1 over F_p, E2: y^2 = x^3 + b2 over F_q
};

// Exhaustive search over j = 0 curves with p <= max_prime, largest p first.
ToyCycleDescription find_toy_cycle_description(uint64_t max_prime);
Cycle find_toy_cycle(uint64_t max_prime);
Cycle make_toy_cycle(const ToyCycleDescription& d);

// A fixed ~2^20 toy cycle, large enough that small generator relations are absent.
ToyCycleDescription mid_toy_description();
Cycle mid_toy_cycle();

// #E(F_p) for y^2 = x^3 + a x + b by enumerating every x (p < 2^32).
uint64_t count_points_exhaustive(uint64_t p, uint64_t a, uint64_t b);
bool is_prime_u64(uint64_t n);

}  // namespace boomerang
