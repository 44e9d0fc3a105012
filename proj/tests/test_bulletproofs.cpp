#include <doctest.h>

#include "boomerang/bulletproofs.hpp"
#include "boomerang/cycle.hpp"
#include "boomerang/msm.hpp"

using namespace boomerang;

namespace {

const Curve& curve() { return secp_secq()->E1(); }

const IpaGens& gens() {
  static const IpaGens g = IpaGens::derive(curve(), 256);
  return g;
}

std::vector<Fe> small_vec(std::initializer_list<uint64_t> xs) {
  std::vector<Fe> out;
  for (uint64_t x : xs) out.push_back(curve().scalar().from_u64(x));
  return out;
}

Point commit_value(const Fe& v, const Fe& gamma) {
  return msm(curve(), std::vector<Fe>{v, gamma}, std::vector<Point>{curve().G, curve().H});
}

RangeParams params_for(unsigned bits) {
  RangeParams p;
  p.bits = bits;
  return p;
}

struct IpaCase {
  std::vector<Point> g, h;
  Point P;
};

IpaCase ipa_case(std::span<const Fe> a, std::span<const Fe> b, const Point& U) {
  size_t n = a.size();
  IpaCase c{{gens().g.begin(), gens().g.begin() + static_cast<long>(n)},
            {gens().h.begin(), gens().h.begin() + static_cast<long>(n)},
            {}};
  Fe ab = curve().scalar().zero();
  for (size_t i = 0; i < n; ++i) ab += a[i] * b[i];
  c.P = msm(curve(), a, c.g) + msm(curve(), b, c.h) + curve().mul(ab, U);
  return c;
}

}  // namespace

TEST_CASE("inner-product argument") {
  const Point& U = gens().u;
  SUBCASE("length one needs no rounds") {
    auto a = small_vec({7}), b = small_vec({6});
    IpaCase c = ipa_case(a, b, U);
    Transcript t("ipa"), v("ipa");
    IpaProof p = prove_ipa(a, b, c.g, c.h, U, t);
    CHECK(p.rounds() == 0);
    CHECK(verify_ipa(p, c.g, c.h, U, c.P, v));
  }
  SUBCASE("length four, dot product 20") {
    auto a = small_vec({1, 2, 3, 4}), b = small_vec({4, 3, 2, 1});
    IpaCase c = ipa_case(a, b, U);
    Transcript t("ipa");
    IpaProof p = prove_ipa(a, b, c.g, c.h, U, t);
    CHECK(p.rounds() == 2);
    Transcript v("ipa");
    CHECK(verify_ipa(p, c.g, c.h, U, c.P, v));

    IpaProof bad = p;
    bad.L[0] = bad.L[0] + curve().G;
    Transcript v2("ipa");
    CHECK_FALSE(verify_ipa(bad, c.g, c.h, U, c.P, v2));

    Transcript v3("ipa");
    CHECK_FALSE(verify_ipa(p, c.g, c.h, U, c.P + U, v3));
  }
  SUBCASE("non power of two is refused") {
    auto a = small_vec({1, 2, 3}), b = small_vec({1, 2, 3});
    Transcript t("ipa");
    std::vector<Point> g(gens().g.begin(), gens().g.begin() + 3), h(gens().h.begin(), gens().h.begin() + 3);
    CHECK_THROWS_AS(prove_ipa(a, b, g, h, U, t), std::invalid_argument);
  }
}

TEST_CASE("range proof boundaries") {
  DeterministicRandom rng(16);
  const Field& f = curve().scalar();
  RangeParams p16 = params_for(16);
  for (uint64_t v : {uint64_t{0}, uint64_t{1}, uint64_t{12345}, (uint64_t{1} << 16) - 1}) {
    CAPTURE(v);
    Fe gamma = f.random(rng);
    Transcript t("range"), u("range");
    RangeProof pr = prove_range(f.from_u64(v), gamma, p16, gens(), t, rng);
    CHECK(verify_range(pr, commit_value(f.from_u64(v), gamma), p16, gens(), u));
  }
  Transcript t("range");
  CHECK_THROWS_AS(prove_range(f.from_u64(1 << 16), f.one(), p16, gens(), t, rng), RangeError);
  CHECK_THROWS_AS(prove_range(-f.one(), f.one(), p16, gens(), t, rng), RangeError);
}

TEST_CASE("range soundness boundary for l in {8, 16, 32}") {
  DeterministicRandom rng(32);
  const Field& f = curve().scalar();
  for (unsigned l : {8u, 16u, 32u}) {
    CAPTURE(l);
    RangeParams params = params_for(l);
    Fe top = f.from_u64((uint64_t{1} << l) - 1), over = f.from_u64(uint64_t{1} << l);
    for (int i = 0; i < 5; ++i) {
      Fe gamma = f.random(rng);
      Transcript t("range"), v("range");
      RangeProof ok = prove_range(top, gamma, params, gens(), t, rng);
      CHECK(verify_range(ok, commit_value(top, gamma), params, gens(), v));
      Transcript t2("range"), v2("range");
      RangeProof forged = prove_range(f.zero(), gamma, params, gens(), t2, rng);
      CHECK_FALSE(verify_range(forged, commit_value(over, gamma), params, gens(), v2));
    }
  }
}

TEST_CASE("range proof rejects single-bit flips") {
  DeterministicRandom rng(3);
  const Field& f = curve().scalar();
  RangeParams params = params_for(16);
  Fe v = f.from_u64(999), gamma = f.random(rng);
  Point V = commit_value(v, gamma);
  Transcript t("range");
  Bytes enc = prove_range(v, gamma, params, gens(), t, rng).encode();
  CHECK(enc.size() == 4 * 33 + 3 * 32 + 1 + 2 * 4 * 33 + 2 * 32);
  for (int i = 0; i < 40; ++i) {
    Bytes bad = enc;
    size_t bit = rng.uniform(bad.size() * 8);
    bad[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    bool accepted = false;
    try {
      Reader r(bad);
      RangeProof p = RangeProof::decode(curve(), r);
      r.expect_done();
      Transcript u("range");
      accepted = verify_range(p, V, params, gens(), u);
    } catch (const DecodeError&) {
    }
    CHECK_FALSE(accepted);
  }
}

TEST_CASE("range width must fit the group") {
  Cycle tiny = find_toy_cycle(1000);
  RangeParams p = params_for(16);
  CHECK_THROWS_AS(p.validate(tiny->E1().scalar()), std::invalid_argument);
  CHECK_NOTHROW(params_for(8).validate(tiny->E1().scalar()));
  CHECK_THROWS_AS(params_for(12).validate(curve().scalar()), std::invalid_argument);
}

namespace {

RewardResult reward_for(std::span<const Fe> spend, std::span<const Fe> policy, RandomSource& rng) {
  static const IpaGens range_gens = IpaGens::derive(curve(), 16, "reward-range");
  Transcript t("reward");
  return prove_reward(spend, policy, params_for(16), gens(), range_gens, t, rng);
}

bool check_reward(const Fe& reward, std::span<const Fe> spend, std::span<const Fe> policy, const RewardProof& p) {
  static const IpaGens range_gens = IpaGens::derive(curve(), 16, "reward-range");
  Transcript t("reward");
  return verify_reward(reward, commit_policy(policy, gens()), commit_spend(spend, gens()), spend.size(), p,
                       params_for(16), gens(), range_gens, t);
}

}  // namespace

TEST_CASE("reward of the worked example is 26") {
  DeterministicRandom rng(26);
  auto spend = small_vec({0, 1, 3, 5, 0, 0}), policy = small_vec({3, 5, 2, 3, 3, 2});
  RewardResult r = reward_for(spend, policy, rng);
  CHECK(r.reward == curve().scalar().from_u64(26));
  CHECK(check_reward(r.reward, spend, policy, r.proof));
  CHECK_FALSE(check_reward(r.reward + curve().scalar().one(), spend, policy, r.proof));
  CHECK_FALSE(check_reward(r.reward, small_vec({0, 1, 3, 5, 0, 1}), policy, r.proof));
}

TEST_CASE("all-zero spend earns nothing") {
  DeterministicRandom rng(0);
  auto spend = small_vec({0, 0, 0, 0}), policy = small_vec({1, 2, 3, 4});
  RewardResult r = reward_for(spend, policy, rng);
  CHECK(r.reward.is_zero());
  CHECK(check_reward(r.reward, spend, policy, r.proof));
}

TEST_CASE("random length-64 rewards match the schoolbook dot product") {
  DeterministicRandom rng(64);
  const Field& f = curve().scalar();
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Fe> spend, policy;
    uint64_t oracle = 0;
    for (int i = 0; i < 64; ++i) {
      uint64_t s = rng.uniform(8), p = rng.uniform(8);
      oracle += s * p;
      spend.push_back(f.from_u64(s));
      policy.push_back(f.from_u64(p));
    }
    RewardResult r = reward_for(spend, policy, rng);
    CHECK(r.reward == f.from_u64(oracle));
    CHECK(check_reward(r.reward, spend, policy, r.proof));
  }
}

TEST_CASE("reward limits and length mismatch") {
  DeterministicRandom rng(5);
  auto spend = small_vec({200, 1}), policy = small_vec({200, 1});
  CHECK_THROWS_AS(reward_for(spend, policy, rng), RangeError);
  auto shorter = small_vec({1});
  CHECK_THROWS_AS(reward_for(spend, shorter, rng), std::invalid_argument);
}

TEST_CASE("IPA size grows by one round per catalogue doubling") {
  DeterministicRandom rng(1);
  const Field& f = curve().scalar();
  std::vector<size_t> sizes;
  for (size_t k : {64u, 128u, 256u}) {
    std::vector<Fe> spend(k, f.zero()), policy(k, f.one());
    spend[0] = f.one();
    sizes.push_back(reward_for(spend, policy, rng).proof.ipa.encode().size());
  }
  CHECK(sizes[1] - sizes[0] == sizes[2] - sizes[1]);
  CHECK(sizes[1] - sizes[0] == 2 * curve().encoded_len());
}
