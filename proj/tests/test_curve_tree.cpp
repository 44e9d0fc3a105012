#include <doctest.h>

#include "boomerang/curve_tree.hpp"
#include "boomerang/random.hpp"

using namespace boomerang;

namespace {

std::vector<Point> random_leaves(const Curve& c, size_t n, RandomSource& rng) {
  std::vector<Point> out;
  for (size_t i = 0; i < n; ++i) out.push_back(c.mul(c.scalar().random_nonzero(rng), c.G));
  return out;
}

// Bottom-up fold with plain ladder multiplications and affine coordinates.
Point naive_root(std::vector<Point> level, const CurveTreeParams& p) {
  level.resize(p.capacity(), p.cycle->E1().identity());
  for (unsigned k = 1; k <= p.depth; ++k) {
    const Curve& c = p.curve_at(k);
    const Generators& g = p.gens_at(k);
    std::vector<Point> up;
    for (size_t i = 0; i < level.size(); i += p.branching) {
      Point acc = c.identity();
      for (size_t j = 0; j < p.branching; ++j) {
        const Point& child = level[i + j];
        if (child.is_identity()) continue;
        auto [x, y] = child.affine();
        acc = acc + c.mul(c.scalar().from_u256(x.value()), g.g[2 * j]) +
              c.mul(c.scalar().from_u256(y.value()), g.g[2 * j + 1]);
      }
      up.push_back(acc);
    }
    level = std::move(up);
  }
  return level[0];
}

bool member(const CurveTree& tree, size_t i, RandomSource& rng) {
  Transcript t("tree"), v("tree");
  Membership m = prove_membership(tree, i, t, rng);
  return m.rerandomized_leaf == tree.leaf(i) + m.delta * tree.params.cycle->E1().H &&
         verify_membership(tree.root(), m.rerandomized_leaf, m.proof, tree.params, v);
}

// Claims `fake` sits at index i of `tree` without updating the path above it.
bool forged_member(const CurveTree& tree, size_t i, const Point& fake, RandomSource& rng) {
  CurveTree lie = tree;
  lie.levels[0][i] = fake;
  Transcript t("tree"), v("tree");
  Membership m = prove_membership(lie, i, t, rng);
  return verify_membership(tree.root(), m.rerandomized_leaf, m.proof, tree.params, v);
}

}  // namespace

TEST_CASE("one leaf, depth one, branching one") {
  Cycle c = mid_toy_cycle();
  CurveTreeParams p = CurveTreeParams::make(c, 1, 1);
  DeterministicRandom rng(1);
  auto leaves = random_leaves(c->E1(), 1, rng);
  CurveTree t = CurveTree::build(leaves, p);
  auto [x, y] = leaves[0].affine();
  const Curve& e2 = c->E2();
  Point expect = e2.mul(e2.scalar().from_u256(x.value()), p.gens->e2.g[0]) +
                 e2.mul(e2.scalar().from_u256(y.value()), p.gens->e2.g[1]);
  CHECK(t.root() == expect);
  CHECK(t.root().c == &e2);
  CHECK(member(t, 0, rng));
}

TEST_CASE("1024 leaves, D=2, branching 32 on the production cycle") {
  CurveTreeParams p = CurveTreeParams::make(secp_secq(), 2, 32);
  DeterministicRandom rng(1024);
  auto leaves = random_leaves(p.cycle->E1(), 1024, rng);
  CurveTree t = CurveTree::build(leaves, p);
  CHECK(t.root() == naive_root(leaves, p));
  CHECK(t.root() == CurveTree::build(leaves, p).root());
  for (int i = 0; i < 3; ++i) CHECK(member(t, rng.uniform(1024), rng));
  Point outsider = p.cycle->E1().mul(p.cycle->E1().scalar().random(rng), p.cycle->E1().G);
  CHECK_FALSE(forged_member(t, rng.uniform(1024), outsider, rng));
}

TEST_CASE("replace_leaf matches a full rebuild") {
  Cycle c = mid_toy_cycle();
  CurveTreeParams p = CurveTreeParams::make(c, 3, 4);
  DeterministicRandom rng(2);
  auto leaves = random_leaves(c->E1(), 50, rng);
  for (ByteView key : {ByteView{}, as_bytes("k")}) {
    CurveTree t = CurveTree::build(leaves, p, key);
    CHECK(t.replace_leaf(7, leaves[7]).root() == t.root());
    Point fresh = random_leaves(c->E1(), 1, rng)[0];
    CurveTree u = t.replace_leaf(7, fresh);
    CHECK_FALSE(u.root() == t.root());
    CHECK(u.replace_leaf(7, leaves[7]).root() == t.root());
    auto updated = leaves;
    updated[7] = fresh;
    CHECK(u.levels == CurveTree::build(updated, p, key).levels);
    CHECK_THROWS_AS(t.replace_leaf(50, fresh), TreeError);
  }
}

TEST_CASE("serial and parallel level kernels agree") {
  CurveTreeParams p = CurveTreeParams::make(secp_secq(), 2, 8);
  DeterministicRandom rng(3);
  auto kids = random_leaves(p.cycle->E1(), 64, rng);
  kids[9] = p.cycle->E1().identity();
  for (size_t i = 16; i < 24; ++i) kids[i] = p.cycle->E1().identity();
  std::vector<Fe> blind;
  for (int i = 0; i < 8; ++i) blind.push_back(p.cycle->E2().scalar().random(rng));
  auto a = tree_level_serial(kids, p, 1, blind);
  auto b = tree_level_parallel(kids, p, 1, blind);
  CHECK(a == b);
  CHECK(a[2].is_identity());
  CHECK(tree_level_serial(kids, p, 1, {}) == tree_level_parallel(kids, p, 1, {}));
}

TEST_CASE("root binding over 1000 random one-leaf changes") {
  Cycle c = mid_toy_cycle();
  CurveTreeParams p = CurveTreeParams::make(c, 2, 4);
  DeterministicRandom rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    size_t n = 1 + rng.uniform(16);
    auto leaves = random_leaves(c->E1(), n, rng);
    CurveTree t = CurveTree::build(leaves, p);
    size_t i = rng.uniform(n);
    Point next = leaves[i];
    while (next == leaves[i]) next = random_leaves(c->E1(), 1, rng)[0];
    REQUIRE_FALSE(t.replace_leaf(i, next).root() == t.root());
  }
}

TEST_CASE("membership on every small tree shape") {
  Cycle c = mid_toy_cycle();
  DeterministicRandom rng(5);
  for (auto [d, l] : {std::pair{1u, 2u}, {2u, 4u}, {3u, 2u}}) {
    CurveTreeParams p = CurveTreeParams::make(c, d, l);
    for (size_t n = 1; n <= p.capacity(); ++n) {
      auto leaves = random_leaves(c->E1(), n, rng);
      CurveTree t = CurveTree::build(leaves, p);
      for (size_t i = 0; i < n; ++i) {
        REQUIRE(member(t, i, rng));
        REQUIRE_FALSE(forged_member(t, i, random_leaves(c->E1(), 1, rng)[0], rng));
      }
    }
  }
}

TEST_CASE("hiding trees still prove membership") {
  Cycle c = mid_toy_cycle();
  CurveTreeParams p = CurveTreeParams::make(c, 2, 4);
  DeterministicRandom rng(6);
  auto leaves = random_leaves(c->E1(), 11, rng);
  CurveTree plain = CurveTree::build(leaves, p);
  CurveTree hidden = CurveTree::build(leaves, p, as_bytes("secret"));
  CHECK_FALSE(plain.root() == hidden.root());
  for (size_t i = 0; i < 11; ++i) CHECK(member(hidden, i, rng));
  // A proof against the hiding root does not verify against the plain one.
  Transcript t("tree"), v("tree");
  Membership m = prove_membership(hidden, 3, t, rng);
  CHECK_FALSE(verify_membership(plain.root(), m.rerandomized_leaf, m.proof, p, v));
}

TEST_CASE("proof serialization round-trips and rejects tampering") {
  Cycle c = mid_toy_cycle();
  CurveTreeParams p = CurveTreeParams::make(c, 2, 4);
  DeterministicRandom rng(7);
  CurveTree t = CurveTree::build(random_leaves(c->E1(), 16, rng), p);
  Transcript pt("tree");
  Membership m = prove_membership(t, 9, pt, rng);
  Bytes enc = m.proof.encode();
  Reader r(enc);
  MembershipProof back = MembershipProof::decode(p, r);
  r.expect_done();
  Transcript v("tree");
  CHECK(verify_membership(t.root(), m.rerandomized_leaf, back, p, v));
  for (int i = 0; i < 200; ++i) {
    Bytes bad = enc;
    size_t bit = rng.uniform(bad.size() * 8);
    bad[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    bool ok = false;
    try {
      Reader rr(bad);
      MembershipProof q = MembershipProof::decode(p, rr);
      rr.expect_done();
      Transcript vv("tree");
      ok = verify_membership(t.root(), m.rerandomized_leaf, q, p, vv);
    } catch (const DecodeError&) {
    }
    REQUIRE_FALSE(ok);
  }
}

TEST_CASE("rerandomized leaves from two indices look alike") {
  Cycle c = mid_toy_cycle();
  CurveTreeParams p = CurveTreeParams::make(c, 1, 4);
  DeterministicRandom rng(8);
  CurveTree t = CurveTree::build(random_leaves(c->E1(), 4, rng), p);
  constexpr int kBuckets = 16, kSamples = 3000;
  int a[kBuckets] = {}, b[kBuckets] = {};
  for (int s = 0; s < kSamples; ++s) {
    Transcript t1("tree"), t2("tree");
    a[prove_membership(t, 0, t1, rng).rerandomized_leaf.affine().first.low_u64() % kBuckets]++;
    b[prove_membership(t, 3, t2, rng).rerandomized_leaf.affine().first.low_u64() % kBuckets]++;
  }
  double chi = 0;
  for (int i = 0; i < kBuckets; ++i) {
    double d = a[i] - b[i];
    if (a[i] + b[i] > 0) chi += d * d / (a[i] + b[i]);
  }
  // 15 degrees of freedom, alpha = 0.01.
  CHECK(chi < 30.58);
}

TEST_CASE("tree errors") {
  Cycle c = mid_toy_cycle();
  CurveTreeParams p = CurveTreeParams::make(c, 2, 2);
  DeterministicRandom rng(9);
  CHECK_THROWS_AS(CurveTree::build(random_leaves(c->E1(), 5, rng), p), TreeError);
  std::vector<Point> wrong = {c->E2().G};
  CHECK_THROWS_AS(CurveTree::build(wrong, p), TreeError);
  CurveTree t = CurveTree::build(random_leaves(c->E1(), 2, rng), p);
  Transcript tr("tree");
  CHECK_THROWS_AS(prove_membership(t, 2, tr, rng), TreeError);
  CHECK_THROWS_AS(CurveTreeParams::make(c, 0, 2), TreeError);
}
