#include <doctest.h>

#include <functional>

#include "boomerang/cycle.hpp"
#include "boomerang/sigma.hpp"

using namespace boomerang;

namespace {

const Cycle& toy() {
  static const Cycle c = mid_toy_cycle();
  return c;
}

// One honest proof bundled with its verifier over the serialized form.
struct Case {
  Bytes proof;
  std::function<bool(ByteView)> verify;
};

template <class P, class V>
std::function<bool(ByteView)> decoding(const Curve& curve, V v) {
  return [&curve, v](ByteView bytes) {
    try {
      Reader r(bytes);
      P p = P::decode(curve, r);
      r.expect_done();
      return v(p);
    } catch (const DecodeError&) {
      return false;
    }
  };
}

Transcript fresh() { return Transcript("sigma-test"); }

Case open_case(const Curve& curve, RandomSource& rng) {
  const Field& f = curve.scalar();
  Generators gens = Generators::system(curve);
  Opening o;
  size_t n = 1 + rng.uniform(gens.size());
  for (size_t i = 0; i < n; ++i) o.messages.push_back(f.random(rng));
  o.r = f.random(rng);
  Commitment C = commit(o, gens);
  Transcript t = fresh();
  OpenProof p = prove_open(o, C, gens, t, rng);
  return {p.encode(), decoding<OpenProof>(curve, [C, gens](const OpenProof& q) {
            Transcript v = fresh();
            return verify_open(q, C, gens, v);
          })};
}

Case issue_case(const Curve& curve, RandomSource& rng) {
  const Field& f = curve.scalar();
  Generators gens = Generators::system(curve);
  Fe sk = f.random(rng), j = f.random(rng);
  Opening o{{f.random(rng), f.zero(), sk, f.random(rng), j}, f.random(rng)};
  IssueStatement st{commit(o, gens), curve.mul(sk, curve.G), j};
  Transcript t = fresh();
  IssueProof p = prove_issue(o, st, gens, t, rng);
  return {p.encode(), decoding<IssueProof>(curve, [st, gens](const IssueProof& q) {
            Transcript v = fresh();
            return verify_issue(q, st, gens, v);
          })};
}

Case add_case(const Curve& curve, RandomSource& rng) {
  const Field& f = curve.scalar();
  PedersenPair a{f.random(rng), f.random(rng)}, b{f.random(rng), f.random(rng)};
  AddStatement st = add_statement(curve, a, b, rng.uniform(2) == 1);
  Transcript t = fresh();
  AddProof p = prove_add(a, b, st, t, rng);
  return {p.encode(), decoding<AddProof>(curve, [st](const AddProof& q) {
            Transcript v = fresh();
            return verify_add(q, st, v);
          })};
}

MulWitness random_mul(const Field& f, RandomSource& rng) {
  return {f.random(rng), f.random(rng), f.random(rng), f.random(rng), f.random(rng)};
}

Case mul_case(const Curve& curve, RandomSource& rng) {
  MulWitness w = random_mul(curve.scalar(), rng);
  MulStatement st = mul_statement(curve, w);
  Transcript t = fresh();
  MulProof p = prove_mul(w, st, t, rng);
  return {p.encode(), decoding<MulProof>(curve, [st](const MulProof& q) {
            Transcript v = fresh();
            return verify_mul(q, st, v);
          })};
}

AddMulWitness random_add_mul(const Field& f, RandomSource& rng) {
  AddMulWitness w;
  for (Fe* x : {&w.x, &w.y, &w.z, &w.r1, &w.r2, &w.r3, &w.r4}) *x = f.random(rng);
  return w;
}

Case add_mul_case(const Curve& curve, RandomSource& rng) {
  AddMulWitness w = random_add_mul(curve.scalar(), rng);
  AddMulStatement st = add_mul_statement(curve, w);
  Transcript t = fresh();
  AddMulProof p = prove_add_mul(w, st, t, rng);
  return {p.encode(), decoding<AddMulProof>(curve, [st](const AddMulProof& q) {
            Transcript v = fresh();
            return verify_add_mul(q, st, v);
          })};
}

struct OrEqInstance {
  Point c_star;
  std::vector<Point> children;
  size_t index;
  Fe delta;
};

OrEqInstance random_or_eq(const Curve& curve, RandomSource& rng, size_t n) {
  const Field& f = curve.scalar();
  OrEqInstance in;
  for (size_t i = 0; i < n; ++i) in.children.push_back(curve.mul(f.random_nonzero(rng), curve.G));
  in.index = rng.uniform(n);
  in.delta = f.random(rng);
  in.c_star = in.children[in.index] + curve.mul(in.delta, curve.H);
  return in;
}

Case or_eq_case(const Curve& curve, RandomSource& rng) {
  OrEqInstance in = random_or_eq(curve, rng, 1 + rng.uniform(6));
  Transcript t = fresh();
  OrEqProof p = prove_or_eq(in.c_star, in.children, in.index, in.delta, curve.H, t, rng);
  return {p.encode(), decoding<OrEqProof>(curve, [in, &curve](const OrEqProof& q) {
            Transcript v = fresh();
            return verify_or_eq(q, in.c_star, in.children, curve.H, v);
          })};
}

struct DlogInstance {
  std::vector<Point> bases, points;
  Fe w;
};

DlogInstance random_dlog(const Curve& curve, RandomSource& rng, size_t n) {
  const Field& f = curve.scalar();
  DlogInstance in{{}, {}, f.random(rng)};
  for (size_t i = 0; i < n; ++i) {
    in.bases.push_back(curve.mul(f.random_nonzero(rng), curve.G));
    in.points.push_back(curve.mul(in.w, in.bases.back()));
  }
  return in;
}

Case dlog_eq_case(const Curve& curve, RandomSource& rng) {
  DlogInstance in = random_dlog(curve, rng, 1 + rng.uniform(4));
  Transcript t = fresh();
  DlogEqProof p = prove_dlog_eq(in.bases, in.points, in.w, t, rng);
  return {p.encode(), decoding<DlogEqProof>(curve, [in](const DlogEqProof& q) {
            Transcript v = fresh();
            return verify_dlog_eq(q, in.bases, in.points, v);
          })};
}

using Maker = Case (*)(const Curve&, RandomSource&);

const std::pair<const char*, Maker> kKinds[] = {
    {"open", open_case},     {"issue", issue_case}, {"add", add_case},         {"mul", mul_case},
    {"add-mul", add_mul_case}, {"or-eq", or_eq_case}, {"dlog-eq", dlog_eq_case},
};

}  // namespace

TEST_CASE("honest proofs verify and single-bit flips reject") {
  DeterministicRandom rng(2024);
  for (auto [name, make] : kKinds) {
    CAPTURE(name);
    for (const Curve* curve : {&toy()->E1(), &toy()->E2()}) {
      for (int i = 0; i < 200; ++i) {
        Case c = make(*curve, rng);
        REQUIRE(c.verify(c.proof));
        Bytes bad = c.proof;
        size_t bit = rng.uniform(bad.size() * 8);
        bad[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        REQUIRE_FALSE(c.verify(bad));
      }
    }
  }
}

TEST_CASE("honest proofs verify on the production cycle") {
  DeterministicRandom rng(7);
  for (auto [name, make] : kKinds) {
    CAPTURE(name);
    for (const Curve* curve : {&secp_secq()->E1(), &secp_secq()->E2()}) {
      Case c = make(*curve, rng);
      CHECK(c.verify(c.proof));
      Bytes bad = c.proof;
      bad[bad.size() / 2] ^= 0x10;
      CHECK_FALSE(c.verify(bad));
    }
  }
}

TEST_CASE("simulated transcripts pass the interactive checks") {
  DeterministicRandom rng(99);
  const Curve& curve = toy()->E1();
  const Field& f = curve.scalar();
  Generators gens = Generators::system(curve);
  for (int i = 0; i < 100; ++i) {
    Fe c = f.random_nonzero(rng);
    Commitment C{curve.mul(f.random(rng), curve.G)};
    CHECK(check_open(simulate_open(C, c, gens, 3, rng), C, gens));

    IssueStatement ist{C, curve.mul(f.random(rng), curve.G), f.random(rng)};
    CHECK(check_issue(simulate_issue(ist, c, gens, rng), ist, gens));

    AddStatement ast = add_statement(curve, {f.random(rng), f.random(rng)}, {f.random(rng), f.random(rng)}, i % 2);
    CHECK(check_add(simulate_add(ast, c, rng), ast));

    // Mul and add-mul simulators also work for false statements.
    MulStatement mst = mul_statement(curve, random_mul(f, rng));
    mst.C3 = C;
    CHECK(check_mul(simulate_mul(mst, c, rng), mst));

    AddMulStatement amst = add_mul_statement(curve, random_add_mul(f, rng));
    CHECK(check_add_mul(simulate_add_mul(amst, c, rng), amst));

    OrEqInstance oin = random_or_eq(curve, rng, 5);
    OrEqProof op = simulate_or_eq(curve.G, oin.children, curve.H, c, rng);
    CHECK(check_or_eq(op, curve.G, oin.children, curve.H, c));

    DlogInstance din = random_dlog(curve, rng, 3);
    din.points[0] = curve.G;
    CHECK(check_dlog_eq(simulate_dlog_eq(din.bases, din.points, c, rng), din.bases, din.points));
  }
}

TEST_CASE("simulator and prover distributions agree on a tiny curve") {
  // Fixed statement and challenge; histogram s_x of real and simulated open proofs.
  Cycle tiny = find_toy_cycle(1000);
  const Curve& curve = tiny->E1();
  const Field& f = curve.scalar();
  Generators gens = Generators::system(curve);
  DeterministicRandom rng(3);
  Opening o{{f.from_u64(4)}, f.from_u64(9)};
  Commitment C = commit(o, gens);
  Fe c = f.from_u64(17);
  constexpr int kBuckets = 8, kSamples = 8000;
  int real[kBuckets] = {}, sim[kBuckets] = {};
  const uint64_t q = f.modulus().w[0];
  for (int i = 0; i < kSamples; ++i) {
    OpenProof pr = OpenProver(o, gens, rng).respond(c);
    OpenProof ps = simulate_open(C, c, gens, 1, rng);
    REQUIRE(check_open(pr, C, gens));
    real[pr.s_x.low_u64() * kBuckets / q]++;
    sim[ps.s_x.low_u64() * kBuckets / q]++;
  }
  double chi = 0;
  for (int b = 0; b < kBuckets; ++b) {
    double d = real[b] - sim[b];
    chi += d * d / (real[b] + sim[b]);
  }
  // 7 degrees of freedom; 24.3 is the 0.999 quantile.
  CHECK(chi < 24.3);
}

TEST_CASE("rewinding extracts open and mul witnesses") {
  DeterministicRandom rng(31);
  for (const Curve* curve : {&toy()->E1(), &toy()->E2()}) {
    const Field& f = curve->scalar();
    Generators gens = Generators::system(*curve);
    for (int i = 0; i < 200; ++i) {
      Opening o;
      for (int k = 0; k < 4; ++k) o.messages.push_back(f.random(rng));
      o.r = f.random(rng);
      Commitment C = commit(o, gens);
      OpenProver prover(o, gens, rng);
      Fe c1 = f.random_nonzero(rng), c2 = c1 + f.one();
      OpenProof a = prover.respond(c1), b = prover.respond(c2);
      REQUIRE(check_open(a, C, gens));
      REQUIRE(check_open(b, C, gens));
      Opening e = extract_open(a, b);
      CHECK(e.messages == o.messages);
      CHECK(e.r == o.r);

      MulWitness w = random_mul(f, rng);
      MulStatement st = mul_statement(*curve, w);
      MulProver mp(w, st, rng);
      MulProof ma = mp.respond(c1), mb = mp.respond(c2);
      REQUIRE(check_mul(ma, st));
      REQUIRE(check_mul(mb, st));
      MulWitness x = extract_mul(ma, mb);
      CHECK(x.x == w.x);
      CHECK(x.y == w.y);
      CHECK(x.r1 == w.r1);
      CHECK(x.r2 == w.r2);
      CHECK(x.r3 == w.r3);
    }
  }
}

TEST_CASE("false statements do not verify") {
  DeterministicRandom rng(8);
  const Curve& curve = toy()->E2();
  const Field& f = curve.scalar();
  Generators gens = Generators::system(curve);

  SUBCASE("issue with a nonzero second slot") {
    Fe sk = f.random(rng), j = f.random(rng);
    Opening o{{f.random(rng), f.one(), sk, f.random(rng), j}, f.random(rng)};
    IssueStatement st{commit(o, gens), curve.mul(sk, curve.G), j};
    Transcript t = fresh(), v = fresh();
    CHECK_FALSE(verify_issue(prove_issue(o, st, gens, t, rng), st, gens, v));
  }
  SUBCASE("issue with a mismatched public key") {
    Fe sk = f.random(rng), j = f.random(rng);
    Opening o{{f.random(rng), f.zero(), sk, f.random(rng), j}, f.random(rng)};
    IssueStatement st{commit(o, gens), curve.mul(sk + f.one(), curve.G), j};
    Transcript t = fresh(), v = fresh();
    CHECK_FALSE(verify_issue(prove_issue(o, st, gens, t, rng), st, gens, v));
  }
  SUBCASE("mul with a wrong product") {
    MulWitness w = random_mul(f, rng);
    MulStatement st = mul_statement(curve, w);
    st.C3 = {st.C3.point + curve.G};
    Transcript t = fresh(), v = fresh();
    CHECK_FALSE(verify_mul(prove_mul(w, st, t, rng), st, v));
  }
  SUBCASE("add-mul with C5 off by G") {
    AddMulWitness w = random_add_mul(f, rng);
    AddMulStatement st = add_mul_statement(curve, w);
    st.C5 = {st.C5.point + curve.G};
    Transcript t = fresh(), v = fresh();
    CHECK_FALSE(verify_add_mul(prove_add_mul(w, st, t, rng), st, v));
  }
  SUBCASE("add with a wrong sum") {
    PedersenPair a{f.random(rng), f.random(rng)}, b{f.random(rng), f.random(rng)};
    AddStatement st = add_statement(curve, a, b, false);
    st.C3 = {st.C3.point + curve.G};
    Transcript t = fresh(), v = fresh();
    CHECK_FALSE(verify_add(prove_add(a, b, st, t, rng), st, v));
  }
  SUBCASE("or-eq for a non-member") {
    OrEqInstance in = random_or_eq(curve, rng, 4);
    in.c_star = in.c_star + curve.G;
    Transcript t = fresh(), v = fresh();
    OrEqProof p = prove_or_eq(in.c_star, in.children, in.index, in.delta, curve.H, t, rng);
    CHECK_FALSE(verify_or_eq(p, in.c_star, in.children, curve.H, v));
  }
  SUBCASE("dlog-eq with unequal logs") {
    DlogInstance in = random_dlog(curve, rng, 3);
    in.points[2] = in.points[2] + in.bases[2];
    Transcript t = fresh(), v = fresh();
    CHECK_FALSE(verify_dlog_eq(prove_dlog_eq(in.bases, in.points, in.w, t, rng), in.bases, in.points, v));
  }
  SUBCASE("a proof does not transfer to another transcript domain") {
    Opening o{{f.random(rng)}, f.random(rng)};
    Commitment C = commit(o, gens);
    Transcript t = fresh(), v("other");
    CHECK_FALSE(verify_open(prove_open(o, C, gens, t, rng), C, gens, v));
  }
}

TEST_CASE("nonce presets link responses across proofs") {
  DeterministicRandom rng(12);
  const Curve& curve = toy()->E1();
  const Field& f = curve.scalar();
  Generators gens = Generators::system(curve);
  Opening a{{f.random(rng), f.random(rng)}, f.random(rng)};
  Opening b{{f.random(rng), a.messages[1]}, f.random(rng)};
  OpenProver pa(a, gens, rng);
  std::optional<Fe> presets[] = {std::nullopt, pa.nonce(1)};
  OpenProver pb(b, gens, rng, presets);
  Fe c = f.random_nonzero(rng);
  CHECK(pa.respond(c).s[1] == pb.respond(c).s[1]);
  CHECK(pa.respond(c).s[0] != pb.respond(c).s[0]);
}
