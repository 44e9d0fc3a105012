#include <doctest.h>
#include <gmpxx.h>

#include <map>
#include <set>

#include "boomerang/cycle.hpp"
#include "boomerang/msm.hpp"
#include "boomerang/random.hpp"

using namespace boomerang;

namespace {

mpz_class to_mpz(const U256& v) {
  mpz_class r;
  mpz_set_str(r.get_mpz_t(), v.to_hex().c_str(), 16);
  return r;
}

mpz_class to_mpz(const Fe& v) { return to_mpz(v.value()); }

const Cycle& tiny() {
  static const Cycle c = find_toy_cycle(1000);
  return c;
}

struct NaivePoint {
  bool inf = true;
  uint64_t x = 0, y = 0;
  bool operator==(const NaivePoint&) const = default;
};

uint64_t inv_mod(uint64_t a, uint64_t p) {
  mpz_class r, aa(static_cast<unsigned long>(a)), pp(static_cast<unsigned long>(p));
  mpz_invert(r.get_mpz_t(), aa.get_mpz_t(), pp.get_mpz_t());
  return r.get_ui();
}

// Affine chord-and-tangent over a small prime, a = 0.
NaivePoint naive_add(NaivePoint P, NaivePoint Q, uint64_t p) {
  if (P.inf) return Q;
  if (Q.inf) return P;
  uint64_t l;
  if (P.x == Q.x) {
    if ((P.y + Q.y) % p == 0) return {};
    l = 3 * P.x % p * P.x % p * inv_mod(2 * P.y % p, p) % p;
  } else {
    l = (Q.y + p - P.y) % p * inv_mod((Q.x + p - P.x) % p, p) % p;
  }
  uint64_t x = (l * l % p + 2 * p - P.x - Q.x) % p;
  uint64_t y = (l * ((P.x + p - x) % p) % p + p - P.y) % p;
  return {false, x, y};
}

NaivePoint to_naive(const Point& P) {
  if (P.is_identity()) return {};
  auto [x, y] = P.affine();
  return {false, x.low_u64(), y.low_u64()};
}

std::vector<Point> all_points(const Curve& c) {
  std::vector<Point> out{c.identity()};
  const uint64_t p = c.base().modulus().w[0];
  for (uint64_t x = 0; x < p; ++x) {
    for (uint64_t y = 0; y < p; ++y) {
      if (auto pt = c.from_affine(c.base().from_u64(x), c.base().from_u64(y))) out.push_back(*pt);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("field arithmetic matches GMP on production and toy moduli") {
  DeterministicRandom rng(1);
  auto cyc = secp_secq();
  for (const Field* f : {cyc->fp.get(), cyc->fq.get(), tiny()->fp.get(), mid_toy_cycle()->fq.get()}) {
    mpz_class m = to_mpz(f->modulus());
    for (int i = 0; i < 300; ++i) {
      Fe a = f->random(rng);
      Fe b = f->random(rng);
      mpz_class A = to_mpz(a), B = to_mpz(b);
      CHECK(to_mpz(a + b) == (A + B) % m);
      CHECK(to_mpz(a - b) == ((A - B) % m + m) % m);
      CHECK(to_mpz(a * b) == (A * B) % m);
      CHECK(to_mpz(-a) == (m - A) % m);
      if (!a.is_zero()) {
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), A.get_mpz_t(), m.get_mpz_t());
        CHECK(to_mpz(a.inv()) == inv);
      }
      Fe sq = a.sqr();
      auto r = sq.sqrt();
      REQUIRE(r.has_value());
      CHECK(r->sqr() == sq);
      int leg = mpz_legendre(A.get_mpz_t(), m.get_mpz_t());
      CHECK(a.legendre() == leg);
      CHECK(a.sqrt().has_value() == (leg >= 0));
    }
  }
}

TEST_CASE("wide reduction matches GMP") {
  DeterministicRandom rng(2);
  auto cyc = secp_secq();
  for (const Field* f : {cyc->fp.get(), cyc->fq.get(), tiny()->fq.get()}) {
    mpz_class m = to_mpz(f->modulus());
    for (size_t len : {1u, 17u, 32u, 33u, 64u, 80u}) {
      Bytes buf(len);
      rng.fill(buf);
      mpz_class v;
      mpz_set_str(v.get_mpz_t(), ("0" + to_hex(buf)).c_str(), 16);
      CHECK(to_mpz(f->from_bytes_reduce(buf)) == v % m);
    }
  }
}

TEST_CASE("canonical field decoding rejects out-of-range values") {
  auto cyc = secp_secq();
  const Field& f = *cyc->fp;
  CHECK_FALSE(f.from_bytes(f.modulus().to_be(32)).has_value());
  CHECK_FALSE(f.from_bytes(Bytes(31, 0)).has_value());
  CHECK(f.from_bytes(Bytes(32, 0)).value().is_zero());
  CHECK(f.from_int(-1) == -f.one());
}

TEST_CASE("secp256k1 known multiples and both cycle orders on production") {
  auto cyc = secp_secq();
  const Curve& e1 = cyc->E1();
  const Curve& e2 = cyc->E2();
  Point two = e1.mul(e1.scalar().from_u64(2), e1.G);
  auto [x, y] = two.affine();
  CHECK(x.value() == U256::from_hex("C6047F9441ED7D6D3045406E95C07CD85C778E4B8CEF3CA7ABAC09B95C709EE5"));
  CHECK(y.value() == U256::from_hex("1AE168FEA63DC339A3C58419466CEAEEF7F632653266D0E1236431A950CFE52A"));
  CHECK(e1.mul_vartime(cyc->fq->modulus(), e1.G).is_identity());
  CHECK(e2.mul_vartime(cyc->fp->modulus(), e2.G).is_identity());
  CHECK(e2.mul_vartime(cyc->fp->modulus(), e2.H).is_identity());
  CHECK(e1.mul(e1.scalar().zero(), e1.G).is_identity());
  CHECK(e1.mul(e1.scalar().one(), e1.G) == e1.G);
  CHECK(e1.mul(e1.scalar().from_u256(cyc->fq->modulus()), e1.G).is_identity());
}

TEST_CASE("group laws on the toy curve against naive affine formulas") {
  const Curve& c = tiny()->E1();
  const uint64_t p = c.base().modulus().w[0];
  auto pts = all_points(c);
  CHECK(pts.size() == c.scalar().modulus().w[0]);
  DeterministicRandom rng(3);
  for (int i = 0; i < 2000; ++i) {
    const Point& a = pts[rng.uniform(pts.size())];
    const Point& b = pts[rng.uniform(pts.size())];
    const Point& d = pts[rng.uniform(pts.size())];
    CHECK(to_naive(a + b) == naive_add(to_naive(a), to_naive(b), p));
    CHECK(to_naive(a.dbl()) == naive_add(to_naive(a), to_naive(a), p));
    CHECK(a + b == b + a);
    CHECK((a + b) + d == a + (b + d));
    CHECK((a - a).is_identity());
    CHECK(a + c.identity() == a);
  }
}

TEST_CASE("scalar_mul equals repeated addition on the toy curve") {
  const Curve& c = tiny()->E1();
  DeterministicRandom rng(4);
  const uint64_t q = c.scalar().modulus().w[0];
  for (int i = 0; i < 50; ++i) {
    uint64_t k = rng.uniform(q);
    Point acc = c.identity();
    for (uint64_t j = 0; j < k; ++j) acc += c.G;
    CHECK(c.mul(c.scalar().from_u64(k), c.G) == acc);
  }
  CHECK(c.mul(c.scalar().zero(), c.G).is_identity());
  CHECK(c.mul_vartime(c.scalar().modulus(), c.G).is_identity());
}

TEST_CASE("ladder performs the same operation sequence for every scalar") {
  auto cyc = secp_secq();
  const Curve& c = cyc->E1();
  DeterministicRandom rng(5);
  LadderTrace ref;
  c.mul(c.scalar().zero(), c.G, &ref);
  CHECK(ref.ops.size() == 2 * c.scalar().bits());
  for (int i = 0; i < 20; ++i) {
    LadderTrace t;
    c.mul(c.scalar().random(rng), c.G, &t);
    CHECK(t.ops == ref.ops);
  }
  LadderTrace ones;
  c.mul(-c.scalar().one(), c.G, &ones);
  CHECK(ones.ops == ref.ops);
}

TEST_CASE("point encoding round-trips exhaustively on the toy curve and is injective") {
  for (const Curve* c : {&tiny()->E1(), &tiny()->E2()}) {
    std::set<Bytes> seen;
    for (const Point& p : all_points(*c)) {
      Bytes enc = p.encode();
      CHECK(enc.size() == c->encoded_len());
      CHECK(c->decode(enc) == p);
      seen.insert(enc);
    }
    CHECK(seen.size() == c->scalar().modulus().w[0]);
  }
}

TEST_CASE("point encoding on the production curve") {
  auto cyc = secp_secq();
  DeterministicRandom rng(6);
  for (const Curve* c : {&cyc->E1(), &cyc->E2()}) {
    for (int i = 0; i < 1000; ++i) {
      Point p = c->mul(c->scalar().random(rng), c->G);
      CHECK(c->decode(p.encode()) == p);
    }
    Bytes id = c->identity().encode();
    CHECK(id.size() == 33);
    CHECK(id == Bytes(33, 0));
    CHECK(c->decode(id).is_identity());
    Bytes g = c->G.encode();
    CHECK_THROWS_AS(c->decode(ByteView(g).first(32)), DecodeError);
    Bytes bad = g;
    bad[0] = 0x04;
    CHECK_THROWS_AS(c->decode(bad), DecodeError);
    Bytes nonzero_id(33, 0);
    nonzero_id[5] = 1;
    CHECK_THROWS_AS(c->decode(nonzero_id), DecodeError);
    // Find an x with no point above it.
    for (uint64_t x = 1;; ++x) {
      Fe fx = c->base().from_u64(x);
      if (c->rhs(fx).legendre() == -1) {
        Bytes off(1, 0x02);
        Bytes xb = fx.to_bytes();
        off.insert(off.end(), xb.begin(), xb.end());
        CHECK_THROWS_AS(c->decode(off), DecodeError);
        break;
      }
    }
  }
}

TEST_CASE("generator derivation is deterministic and label-separated") {
  auto cyc = secp_secq();
  const Curve& c = cyc->E1();
  auto a = c.derive_generators(2, "pedersen");
  auto b = c.derive_generators(2, "pedersen");
  REQUIRE(a.size() == 2);
  CHECK(a[0].encode() == b[0].encode());
  CHECK(a[1].encode() == b[1].encode());
  CHECK(a[0] != a[1]);
  CHECK(!a[0].is_identity());
  CHECK(c.derive_generators(1, "H")[0] != c.derive_generators(1, "G")[0]);
  CHECK_THROWS_AS(c.derive_generators(0, "x"), std::invalid_argument);
  for (const Curve* cv : {&cyc->E1(), &cyc->E2(), &tiny()->E1(), &tiny()->E2()}) {
    std::set<Bytes> all{cv->G.encode(), cv->H.encode()};
    for (const Point& g : cv->gens) all.insert(g.encode());
    CHECK(all.size() == 2 + cv->gens.size());
    CHECK(cv->gens.size() == kDefaultGenerators);
    for (const Point& g : cv->gens) {
      auto [x, y] = g.affine();
      CHECK(y.value() <= (-y).value());
    }
  }
}

TEST_CASE("find_toy_cycle(1000) satisfies the cycle condition by exhaustive recount") {
  auto d = find_toy_cycle_description(1000);
  CHECK(d.p <= 1000);
  CHECK(d.q <= 1000);
  auto naive_count = [](uint64_t p, uint64_t b) {
    std::map<uint64_t, uint64_t> squares;
    for (uint64_t y = 0; y < p; ++y) squares[y * y % p]++;
    uint64_t n = 1;
    for (uint64_t x = 0; x < p; ++x) n += squares[(x * x % p * x + b) % p];
    return n;
  };
  CHECK(naive_count(d.p, d.b1) == d.q);
  CHECK(naive_count(d.q, d.b2) == d.p);
  CHECK(mpz_probab_prime_p(mpz_class(static_cast<unsigned long>(d.p)).get_mpz_t(), 30) > 0);
  CHECK(mpz_probab_prime_p(mpz_class(static_cast<unsigned long>(d.q)).get_mpz_t(), 30) > 0);
  CHECK_THROWS_AS(find_toy_cycle(4), ToyCycleNotFound);
}

TEST_CASE("mid toy cycle is a genuine 2-cycle") {
  auto d = mid_toy_description();
  auto legendre_count = [](uint64_t p, uint64_t b) {
    mpz_class m(static_cast<unsigned long>(p));
    long n = static_cast<long>(p) + 1;
    mpz_class v;
    for (uint64_t x = 0; x < p; ++x) {
      v = static_cast<unsigned long>((x * x % p * x + b) % p);
      n += mpz_legendre(v.get_mpz_t(), m.get_mpz_t());
    }
    return static_cast<uint64_t>(n);
  };
  CHECK(legendre_count(d.p, d.b1) == d.q);
  CHECK(legendre_count(d.q, d.b2) == d.p);
  CHECK(count_points_exhaustive(d.p, 0, d.b1) == d.q);
  auto c = mid_toy_cycle();
  CHECK(c->E1().mul_vartime(c->fq->modulus(), c->E1().G).is_identity());
  CHECK(c->E2().mul_vartime(c->fp->modulus(), c->E2().G).is_identity());
}

TEST_CASE("msm kernels agree with the naive sum") {
  DeterministicRandom rng(7);
  for (const Cycle& cyc : {secp_secq(), tiny()}) {
    const Curve& c = cyc->E1();
    for (size_t n : {0u, 1u, 5u, 97u, 300u}) {
      std::vector<Fe> ks;
      std::vector<Point> ps;
      for (size_t i = 0; i < n; ++i) {
        ks.push_back(c.scalar().random(rng));
        ps.push_back(c.mul(c.scalar().random(rng), c.G));
      }
      if (n > 2) ks[1] = c.scalar().zero();
      if (n > 3) ps[2] = c.G, ps[3] = c.H;
      Point ref = msm_naive(c, ks, ps);
      CHECK(msm_serial(c, ks, ps) == ref);
      CHECK(msm_parallel(c, ks, ps) == ref);
      CHECK(msm(c, ks, ps).encode() == ref.encode());
    }
  }
}

TEST_CASE("fixed-base terms on G and H match the ladder") {
  DeterministicRandom rng(9);
  for (const Cycle& cyc : {secp_secq(), tiny()}) {
    for (const Curve* c : {&cyc->E1(), &cyc->E2()}) {
      const Field& f = c->scalar();
      for (int i = 0; i < 20; ++i) {
        const Fe a = i == 0 ? f.zero() : i == 1 ? -f.one() : f.random(rng);
        const Fe b = f.random(rng);
        const Fe ks[] = {a, b};
        const Point ps[] = {c->G, c->H};
        CHECK(msm(*c, ks, ps) == c->mul(a, c->G) + c->mul(b, c->H));
      }
    }
  }
}

TEST_CASE("batch normalization matches per-point affine") {
  auto cyc = secp_secq();
  const Curve& c = cyc->E2();
  DeterministicRandom rng(8);
  std::vector<Point> ps;
  for (int i = 0; i < 20; ++i) ps.push_back(c.mul(c.scalar().random(rng), c.G));
  ps[3] = c.identity();
  auto aff = batch_affine(ps);
  for (size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].is_identity()) {
      CHECK(aff[i].infinity);
      CHECK(aff[i].x.is_zero());
      continue;
    }
    auto [x, y] = ps[i].affine();
    CHECK(aff[i].x == x);
    CHECK(aff[i].y == y);
  }
}
