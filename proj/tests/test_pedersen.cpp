#include <doctest.h>

#include <map>

#include "boomerang/cycle.hpp"
#include "boomerang/pedersen.hpp"
#include "boomerang/random.hpp"

using namespace boomerang;

namespace {

const Cycle& toy() {
  static const Cycle c = mid_toy_cycle();
  return c;
}

std::vector<Fe> random_messages(const Field& f, size_t n, RandomSource& rng) {
  std::vector<Fe> m;
  for (size_t i = 0; i < n; ++i) m.push_back(f.random(rng));
  return m;
}

}  // namespace

TEST_CASE("homomorphism over 1000 random tuples") {
  DeterministicRandom rng(11);
  for (const Curve* curve : {&toy()->E1(), &toy()->E2()}) {
    const Field& f = curve->scalar();
    Generators gens = Generators::system(*curve);
    for (int trial = 0; trial < 1000; ++trial) {
      size_t n = 1 + rng.uniform(gens.size());
      auto m1 = random_messages(f, n, rng);
      auto m2 = random_messages(f, n, rng);
      Fe r1 = f.random(rng), r2 = f.random(rng);
      std::vector<Fe> sum, diff;
      for (size_t i = 0; i < n; ++i) {
        sum.push_back(m1[i] + m2[i]);
        diff.push_back(m1[i] - m2[i]);
      }
      Commitment a = commit(m1, r1, gens), b = commit(m2, r2, gens);
      REQUIRE(a + b == commit(sum, r1 + r2, gens));
      REQUIRE(a - b == commit(diff, r1 - r2, gens));
    }
  }
}

TEST_CASE("binding: no second opening inside a 16x16 box") {
  // One message slot and blinding restricted to [0, 16).
  const Curve& curve = toy()->E1();
  Generators gens = Generators::system(curve);
  std::map<Bytes, std::pair<int, int>> seen;
  for (int m = 0; m < 16; ++m) {
    for (int r = 0; r < 16; ++r) {
      const Fe msg[] = {curve.scalar().from_u64(m)};
      Bytes enc = commit(msg, curve.scalar().from_u64(r), gens).encode();
      auto [it, fresh] = seen.emplace(enc, std::pair{m, r});
      CHECK_MESSAGE(fresh, "collision (", m, ",", r, ") vs (", it->second.first, ",", it->second.second, ")");
    }
  }
  CHECK(seen.size() == 256);
}

TEST_CASE("hiding: a fixed message under fresh blinding spreads over the group") {
  // On the small curve of the tiny cycle, every blinding gives a distinct commitment.
  Cycle tiny = find_toy_cycle(1000);
  const Curve& curve = tiny->E1();
  const Field& f = curve.scalar();
  Generators gens = Generators::system(curve);
  const Fe msg[] = {f.from_u64(3), f.from_u64(5)};
  std::map<Bytes, int> hits;
  for (uint64_t r = 0; r < f.modulus().w[0]; ++r) hits[commit(msg, f.from_u64(r), gens).encode()]++;
  CHECK(hits.size() == f.modulus().w[0]);
}

TEST_CASE("rerandomize and blind") {
  DeterministicRandom rng(5);
  const Curve& curve = toy()->E2();
  const Field& f = curve.scalar();
  Generators gens = Generators::system(curve);
  auto m = random_messages(f, 3, rng);
  Fe r = f.random(rng), d = f.random(rng);
  Commitment c = commit(m, r, gens);
  CHECK(rerandomize(c, d, gens) == commit(m, r + d, gens));

  Fe gamma = f.random_nonzero(rng);
  Point z = curve.mul(f.random_nonzero(rng), curve.G);
  auto [gz, gc] = blind(c, gamma, z);
  CHECK(gz == curve.mul(gamma, z));
  CHECK(gc.point == curve.mul(gamma, c.point));
  CHECK_THROWS_AS((void)blind(c, f.zero(), z), std::invalid_argument);
  CHECK_THROWS_AS((void)blind(c, gamma, curve.identity()), std::invalid_argument);
}

TEST_CASE("commit rejects bad lengths and mixed curves") {
  const Curve& e1 = toy()->E1();
  const Curve& e2 = toy()->E2();
  Generators gens = Generators::system(e1);
  std::vector<Fe> none;
  std::vector<Fe> too_many(gens.size() + 1, e1.scalar().one());
  CHECK_THROWS_AS((void)commit(none, e1.scalar().one(), gens), std::invalid_argument);
  CHECK_THROWS_AS((void)commit(too_many, e1.scalar().one(), gens), std::invalid_argument);
  Commitment a{e1.G}, b{e2.G};
  CHECK_THROWS_AS((void)(a + b), std::invalid_argument);
}

TEST_CASE("derived generators are independent of the system ones") {
  const Curve& curve = toy()->E1();
  Generators d = Generators::derive(curve, 8, "test-gens");
  CHECK(d.size() == 8);
  CHECK(d.h == curve.H);
  for (const Point& g : d.g) {
    CHECK_FALSE(g == curve.G);
    CHECK_FALSE(g == curve.H);
    CHECK_FALSE(g.is_identity());
  }
}
