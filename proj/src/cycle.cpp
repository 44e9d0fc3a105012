#include "boomerang/cycle.hpp"

#include <set>

namespace boomerang {
namespace {

using u128 = unsigned __int128;

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) { return static_cast<uint64_t>(u128{a} * b % m); }

uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  for (; e; e >>= 1) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
  }
  return r;
}

int jacobi(uint64_t a, uint64_t n) {
  a %= n;
  int result = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      uint64_t r = n & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

void fill_generators(Curve& c, const std::optional<std::pair<U256, U256>>& g, size_t n_gens) {
  if (g) {
    auto p = c.from_affine(c.base().from_u256(g->first), c.base().from_u256(g->second));
    if (!p) throw std::invalid_argument("make_cycle: generator not on curve");
    c.G = *p;
  } else {
    c.G = c.derive_generators(1, "G")[0];
  }
  c.H = c.derive_generators(1, "H", std::span<const Point>(&c.G, 1))[0];
  const Point fixed[] = {c.G, c.H};
  c.gens = c.derive_generators(n_gens, "pedersen", fixed);
}

}  // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

uint64_t count_points_exhaustive(uint64_t p, uint64_t a, uint64_t b) {
  if (p >= (uint64_t{1} << 32)) throw std::invalid_argument("count_points_exhaustive: p too large");
  int64_t sum = 0;
  for (uint64_t x = 0; x < p; ++x) {
    uint64_t r = (x * x % p * x + a % p * x + b) % p;
    sum += jacobi(r, p);
  }
  return static_cast<uint64_t>(static_cast<int64_t>(p) + 1 + sum);
}

Cycle make_cycle(std::string name, unsigned security_bits, const U256& p, const U256& q,
                 const CurveSpec& e1, const CurveSpec& e2, size_t n_gens) {
  auto c = std::make_shared<CycleParams>();
  c->name = std::move(name);
  c->security_bits = security_bits;
  c->fp = std::make_unique<Field>(p);
  c->fq = std::make_unique<Field>(q);
  c->e1 = std::make_unique<Curve>(c->name + "/E1", *c->fp, *c->fq, c->fp->from_u256(e1.a),
                                  c->fp->from_u256(e1.b));
  c->e2 = std::make_unique<Curve>(c->name + "/E2", *c->fq, *c->fp, c->fq->from_u256(e2.a),
                                  c->fq->from_u256(e2.b));
  fill_generators(*c->e1, e1.generator, n_gens);
  fill_generators(*c->e2, e2.generator, n_gens);
  return c;
}

Cycle secp_secq() {
  static const Cycle cycle = [] {
    const U256 p = U256::from_hex("FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F");
    const U256 n = U256::from_hex("FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141");
    CurveSpec secp{U256{}, U256::from_u64(7),
                   std::pair{U256::from_hex("79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798"),
                             U256::from_hex("483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8")}};
    CurveSpec secq{U256{}, U256::from_u64(7), std::nullopt};
    return make_cycle("secp256k1-secq256k1", 128, p, n, secp, secq);
  }();
  return cycle;
}

ToyCycleDescription find_toy_cycle_description(uint64_t max_prime) {
  if (max_prime >= (uint64_t{1} << 32)) throw std::invalid_argument("find_toy_cycle: bound too large");
  for (uint64_t p = max_prime; p >= 7; --p) {
    if (p % 3 != 1 || !is_prime_u64(p)) continue;
    std::set<uint64_t> seen;
    for (uint64_t b = 1; b < p && seen.size() < 6; ++b) {
      uint64_t q = count_points_exhaustive(p, 0, b);
      if (!seen.insert(q).second) continue;
      if (q == p || q < 7 || q > max_prime || !is_prime_u64(q)) continue;
      std::set<uint64_t> seen2;
      for (uint64_t b2 = 1; b2 < q && seen2.size() < 6; ++b2) {
        uint64_t n2 = count_points_exhaustive(q, 0, b2);
        if (!seen2.insert(n2).second) continue;
        if (n2 == p) return ToyCycleDescription{p, q, b, b2};
      }
    }
  }
  throw ToyCycleNotFound("no prime-order 2-cycle with primes <= " + std::to_string(max_prime));
}

Cycle make_toy_cycle(const ToyCycleDescription& d) {
  std::string name = "toy-" + std::to_string(d.p) + "-" + std::to_string(d.q);
  return make_cycle(name, 0, U256::from_u64(d.p), U256::from_u64(d.q),
                    CurveSpec{U256{}, U256::from_u64(d.b1), std::nullopt},
                    CurveSpec{U256{}, U256::from_u64(d.b2), std::nullopt});
}

Cycle find_toy_cycle(uint64_t max_prime) { return make_toy_cycle(find_toy_cycle_description(max_prime)); }

ToyCycleDescription mid_toy_description() { return {1048573, 1049791, 2, 12}; }

Cycle mid_toy_cycle() {
  static const Cycle cycle = make_toy_cycle(mid_toy_description());
  return cycle;
}

}  // namespace boomerang
