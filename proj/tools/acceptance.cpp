// Acceptance run: one PASS/FAIL line per criterion, with its measured time and limit.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "boomerang/ats.hpp"
#include "boomerang/msm.hpp"
#include "boomerang/wire.hpp"

using namespace boomerang;

namespace {

// Pinned limits and tolerances.
constexpr double kRewardLimitS = 1;
constexpr double kE2eToyLimitS = 30;
constexpr double kE2eProdLimitS = 5;
constexpr double kDoubleSpendLimitS = 10;
constexpr double kSigmaLimitS = 300;
constexpr double kRangeLimitS = 60;
constexpr double kTreeLimitS = 300;
constexpr double kAclLimitS = 120;
constexpr double kHomLimitS = 10;
constexpr double kGrowthLimitS = 600;
constexpr double kOrderingLimitS = 300;
constexpr double kToyCycleLimitS = 120;

constexpr int kSigmaHonest = 10000;
constexpr int kSigmaTampered = 1000;
constexpr int kSigmaSimulated = 100;
constexpr int kSigmaExtract = 100;
constexpr int kRangeRuns = 100;
constexpr size_t kTreeLeaves = 1024;
constexpr int kTreeProbes = 50;
constexpr size_t kSmallTreeMax = 64;
constexpr int kAclRuns = 1000;
constexpr int kHomTuples = 1000;
constexpr double kUserRatioLo = 5, kUserRatioHi = 20;
constexpr double kPerUserSpread = 2;
constexpr int kOrderingReps = 10, kOrderingNeeded = 9;

using Clock = std::chrono::steady_clock;

RangeParams range_bits(unsigned bits) {
  RangeParams p;
  p.bits = bits;
  return p;
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Check {
  Outcome* out;
  void operator()(bool cond, const std::string& what) {
    if (!cond && out->ok) {
      out->ok = false;
      out->detail = "failed: " + what;
    }
  }
};

// ---------------------------------------------------------------------------
// 1

Outcome reward_example() {
  Outcome o;
  Check check{&o};
  const Curve& c = secp_secq()->E1();
  const Field& f = c.scalar();
  DeterministicRandom rng(26);
  std::vector<Fe> spend, policy;
  for (uint64_t x : {0, 1, 3, 5, 0, 0}) spend.push_back(f.from_u64(x));
  for (uint64_t x : {3, 5, 2, 3, 3, 2}) policy.push_back(f.from_u64(x));
  IpaGens gens = IpaGens::derive(c, next_pow2(spend.size()), "reward");
  IpaGens range_gens = IpaGens::derive(c, 16);
  RangeParams params = range_bits(16);
  Transcript t("acceptance/reward");
  RewardResult r = prove_reward(spend, policy, params, gens, range_gens, t, rng);
  Transcript v("acceptance/reward");
  const bool verified = verify_reward(r.reward, commit_policy(policy, gens), commit_spend(spend, gens), spend.size(),
                                      r.proof, params, gens, range_gens, v);
  check(scalar_to_int(r.reward) == 26, "reward != 26");
  check(verified, "reward proof rejected");
  o.detail = o.ok ? "reward=26, proof verifies" : o.detail;
  return o;
}

// ---------------------------------------------------------------------------
// 2

Outcome e2e(Cycle cycle) {
  Outcome o;
  Check check{&o};
  DeterministicRandom rng(2);
  ParamsPtr P = AtsParams::make(cycle, 1);
  IssuerState issuer(P, rng);
  ClientState client = ClientState::setup(P, issuer.public_info(), rng);
  auto fe = [&](int64_t v) { return P->scalar().from_int(v); };
  issuance(client, issuer, 0, rng);
  for (int i = 0; i < 10; ++i) collection(client, issuer, 0, fe(5), rng);
  check(scalar_to_int(client.balance(0)) == 50, "balance after collections != 50");
  spend(client, issuer, 0, fe(30), rng);
  check(scalar_to_int(client.balance(0)) == 20, "balance after spend(30) != 20");
  AtsCode code = AtsCode::Ok;
  SpendOptions forge;
  forge.forge_sub = true;
  try {
    spend(client, issuer, 0, fe(25), rng, forge);
  } catch (const AtsError& e) {
    code = e.code();
  }
  check(code == AtsCode::SubProof, std::string("spend(25) result: ") + std::string(code_name(code)));
  check(scalar_to_int(client.balance(0)) == 20, "balance changed by rejected spend");
  if (o.ok) o.detail = "balance 20 after spend(30); spend(25) rejected at range proof";
  return o;
}

// ---------------------------------------------------------------------------
// 3

Outcome double_spend() {
  Outcome o;
  Check check{&o};
  DeterministicRandom rng(3);
  ParamsPtr P = AtsParams::make(secp_secq(), 1);
  auto fe = [&](int64_t v) { return P->scalar().from_int(v); };
  const Curve& c = P->curve();

  IssuerState issuer(P, rng);
  ClientState client = ClientState::setup(P, issuer.public_info(), rng);
  issuance(client, issuer, 0, rng);
  collection(client, issuer, 0, fe(5), rng);
  Bytes snap = client.snapshot();
  collection(client, issuer, 0, fe(5), rng);
  ClientState replay = ClientState::restore(P, snap);
  try {
    collection(replay, issuer, 0, fe(5), rng);
  } catch (const AtsError&) {
  }
  DetectReport rep = detect_double_spend(issuer.db().snapshot(), c, rng);
  check(rep.culprits.size() == 1, "culprits=" + std::to_string(rep.culprits.size()));
  if (rep.culprits.size() == 1) {
    const Culprit& k = rep.culprits[0];
    check(c.mul(k.sk, c.G) == k.pk, "sk*G != recovered pk");
    check(k.pk == client.pk(), "recovered pk is not the adversary's");
    check(verify_culprit(k, c), "culprit proof rejected");
  }

  IssuerState honest_issuer(P, rng);
  ClientState honest = ClientState::setup(P, honest_issuer.public_info(), rng);
  issuance(honest, honest_issuer, 0, rng);
  for (int i = 0; i < 10; ++i) collection(honest, honest_issuer, 0, fe(3), rng);
  for (int i = 0; i < 5; ++i) spend(honest, honest_issuer, 0, fe(2), rng);
  DetectReport control = detect_double_spend(honest_issuer.db().snapshot(), c, rng);
  check(control.culprits.empty(), "honest control flagged a culprit");
  if (o.ok) o.detail = "one culprit, sk*G = pk; honest run of 15 tags clean";
  return o;
}

// ---------------------------------------------------------------------------
// 4

struct SigmaCase {
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

// Test data only: variable-time, through the MSM tables.
Point smul(const Curve& c, const Fe& k, const Point& p) {
  const Fe ks[] = {k};
  const Point ps[] = {p};
  return msm(c, ks, ps);
}

Transcript sigma_t() { return Transcript("acceptance/sigma"); }

SigmaCase open_case(const Curve& curve, const Generators& gens, RandomSource& rng) {
  const Field& f = curve.scalar();
  Opening o;
  for (size_t i = 0; i < gens.size(); ++i) o.messages.push_back(f.random(rng));
  o.r = f.random(rng);
  Commitment C = commit(o, gens);
  Transcript t = sigma_t();
  OpenProof p = prove_open(o, C, gens, t, rng);
  return {p.encode(), decoding<OpenProof>(curve, [C, &gens](const OpenProof& q) {
            Transcript v = sigma_t();
            return verify_open(q, C, gens, v);
          })};
}

SigmaCase issue_case(const Curve& curve, const Generators& gens, RandomSource& rng) {
  const Field& f = curve.scalar();
  Fe sk = f.random(rng), j = f.random(rng);
  Opening o{{f.random(rng), f.zero(), sk, f.random(rng), j}, f.random(rng)};
  IssueStatement st{commit(o, gens), smul(curve, sk, curve.G), j};
  Transcript t = sigma_t();
  IssueProof p = prove_issue(o, st, gens, t, rng);
  return {p.encode(), decoding<IssueProof>(curve, [st, &gens](const IssueProof& q) {
            Transcript v = sigma_t();
            return verify_issue(q, st, gens, v);
          })};
}

SigmaCase add_case(const Curve& curve, const Generators&, RandomSource& rng) {
  const Field& f = curve.scalar();
  PedersenPair a{f.random(rng), f.random(rng)}, b{f.random(rng), f.random(rng)};
  AddStatement st = add_statement(curve, a, b, rng.uniform(2) == 1);
  Transcript t = sigma_t();
  AddProof p = prove_add(a, b, st, t, rng);
  return {p.encode(), decoding<AddProof>(curve, [st](const AddProof& q) {
            Transcript v = sigma_t();
            return verify_add(q, st, v);
          })};
}

MulWitness random_mul(const Field& f, RandomSource& rng) {
  return {f.random(rng), f.random(rng), f.random(rng), f.random(rng), f.random(rng)};
}

SigmaCase mul_case(const Curve& curve, const Generators&, RandomSource& rng) {
  MulWitness w = random_mul(curve.scalar(), rng);
  MulStatement st = mul_statement(curve, w);
  Transcript t = sigma_t();
  MulProof p = prove_mul(w, st, t, rng);
  return {p.encode(), decoding<MulProof>(curve, [st](const MulProof& q) {
            Transcript v = sigma_t();
            return verify_mul(q, st, v);
          })};
}

AddMulWitness random_add_mul(const Field& f, RandomSource& rng) {
  AddMulWitness w;
  for (Fe* x : {&w.x, &w.y, &w.z, &w.r1, &w.r2, &w.r3, &w.r4}) *x = f.random(rng);
  return w;
}

SigmaCase add_mul_case(const Curve& curve, const Generators&, RandomSource& rng) {
  AddMulWitness w = random_add_mul(curve.scalar(), rng);
  AddMulStatement st = add_mul_statement(curve, w);
  Transcript t = sigma_t();
  AddMulProof p = prove_add_mul(w, st, t, rng);
  return {p.encode(), decoding<AddMulProof>(curve, [st](const AddMulProof& q) {
            Transcript v = sigma_t();
            return verify_add_mul(q, st, v);
          })};
}

SigmaCase or_eq_case(const Curve& curve, const Generators&, RandomSource& rng) {
  const Field& f = curve.scalar();
  std::vector<Point> children;
  const size_t n = 2 + rng.uniform(4);
  for (size_t i = 0; i < n; ++i) children.push_back(smul(curve, f.random_nonzero(rng), curve.G));
  const size_t index = rng.uniform(n);
  const Fe delta = f.random(rng);
  const Point c_star = children[index] + smul(curve, delta, curve.H);
  Transcript t = sigma_t();
  OrEqProof p = prove_or_eq(c_star, children, index, delta, curve.H, t, rng);
  return {p.encode(), decoding<OrEqProof>(curve, [c_star, children, &curve](const OrEqProof& q) {
            Transcript v = sigma_t();
            return verify_or_eq(q, c_star, children, curve.H, v);
          })};
}

SigmaCase dlog_eq_case(const Curve& curve, const Generators&, RandomSource& rng) {
  const Field& f = curve.scalar();
  std::vector<Point> bases, points;
  const Fe w = f.random(rng);
  const size_t n = 1 + rng.uniform(3);
  for (size_t i = 0; i < n; ++i) {
    bases.push_back(smul(curve, f.random_nonzero(rng), curve.G));
    points.push_back(smul(curve, w, bases.back()));
  }
  Transcript t = sigma_t();
  DlogEqProof p = prove_dlog_eq(bases, points, w, t, rng);
  return {p.encode(), decoding<DlogEqProof>(curve, [bases, points](const DlogEqProof& q) {
            Transcript v = sigma_t();
            return verify_dlog_eq(q, bases, points, v);
          })};
}

Outcome sigma_suite() {
  Outcome o;
  Check check{&o};
  using Maker = SigmaCase (*)(const Curve&, const Generators&, RandomSource&);
  const std::pair<const char*, Maker> kinds[] = {{"open", open_case},       {"issue", issue_case},
                                                 {"add", add_case},         {"mul", mul_case},
                                                 {"add-mul", add_mul_case}, {"or-eq", or_eq_case},
                                                 {"dlog-eq", dlog_eq_case}};
  DeterministicRandom rng(4);
  const Curve& prod = secp_secq()->E1();
  Generators gens = Generators::system(prod);
  std::ostringstream counts;
  for (auto [name, make] : kinds) {
    const auto t0 = Clock::now();
    int honest = 0, rejected = 0;
    for (int i = 0; i < kSigmaHonest; ++i) {
      SigmaCase c = make(prod, gens, rng);
      honest += c.verify(c.proof);
      if (i < kSigmaTampered) {
        Bytes bad = c.proof;
        const size_t bit = rng.uniform(bad.size() * 8);
        bad[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        rejected += !c.verify(bad);
      }
    }
    check(honest == kSigmaHonest, std::string(name) + " honest " + std::to_string(honest));
    check(rejected == kSigmaTampered, std::string(name) + " tampered rejects " + std::to_string(rejected));
    counts << " " << name << " " << static_cast<int>(std::chrono::duration<double>(Clock::now() - t0).count()) << "s";
  }

  // Simulators on the production curve.
  const Field& f = prod.scalar();
  int sims = 0;
  for (int i = 0; i < kSigmaSimulated; ++i) {
    Fe c = f.random_nonzero(rng);
    Commitment C{smul(prod, f.random(rng), prod.G)};
    sims += check_open(simulate_open(C, c, gens, 3, rng), C, gens);
    IssueStatement ist{C, smul(prod, f.random(rng), prod.G), f.random(rng)};
    sims += check_issue(simulate_issue(ist, c, gens, rng), ist, gens);
    AddStatement ast = add_statement(prod, {f.random(rng), f.random(rng)}, {f.random(rng), f.random(rng)}, i % 2);
    sims += check_add(simulate_add(ast, c, rng), ast);
    MulStatement mst = mul_statement(prod, random_mul(f, rng));
    sims += check_mul(simulate_mul(mst, c, rng), mst);
    AddMulStatement amst = add_mul_statement(prod, random_add_mul(f, rng));
    sims += check_add_mul(simulate_add_mul(amst, c, rng), amst);
    std::vector<Point> children;
    for (int k = 0; k < 4; ++k) children.push_back(smul(prod, f.random_nonzero(rng), prod.G));
    sims += check_or_eq(simulate_or_eq(prod.G, children, prod.H, c, rng), prod.G, children, prod.H, c);
    std::vector<Point> bases = {prod.G, prod.H}, pts = {smul(prod, f.random(rng), prod.G), prod.G};
    sims += check_dlog_eq(simulate_dlog_eq(bases, pts, c, rng), bases, pts);
  }
  check(sims == 7 * kSigmaSimulated, "simulated transcripts verified " + std::to_string(sims));

  // Rewinding on the toy cycle.
  Cycle toy = mid_toy_cycle();
  int extracted = 0;
  for (const Curve* curve : {&toy->E1(), &toy->E2()}) {
    const Field& g = curve->scalar();
    Generators tg = Generators::system(*curve);
    for (int i = 0; i < kSigmaExtract; ++i) {
      Opening op;
      for (size_t k = 0; k < tg.size(); ++k) op.messages.push_back(g.random(rng));
      op.r = g.random(rng);
      Commitment C = commit(op, tg);
      OpenProver prover(op, tg, rng);
      Fe c1 = g.random_nonzero(rng), c2 = c1 + g.one();
      OpenProof a = prover.respond(c1), b = prover.respond(c2);
      Opening e = extract_open(a, b);
      extracted += check_open(a, C, tg) && check_open(b, C, tg) && e.messages == op.messages && e.r == op.r;

      MulWitness w = random_mul(g, rng);
      MulStatement st = mul_statement(*curve, w);
      MulProver mp(w, st, rng);
      MulProof ma = mp.respond(c1), mb = mp.respond(c2);
      MulWitness x = extract_mul(ma, mb);
      extracted += check_mul(ma, st) && check_mul(mb, st) && x.x == w.x && x.y == w.y && x.r1 == w.r1 &&
                   x.r2 == w.r2 && x.r3 == w.r3;
    }
  }
  check(extracted == 4 * kSigmaExtract, "extractions " + std::to_string(extracted));
  if (o.ok) {
    o.detail = "7 kinds x " + std::to_string(kSigmaHonest) + " honest, " + std::to_string(kSigmaTampered) +
               " flips; simulators and extraction ok;" + counts.str();
  }
  return o;
}

// ---------------------------------------------------------------------------
// 5

Outcome range_boundaries() {
  Outcome o;
  Check check{&o};
  const Curve& c = secp_secq()->E1();
  const Field& f = c.scalar();
  DeterministicRandom rng(5);
  IpaGens gens = IpaGens::derive(c, 32);
  auto commit_v = [&](const Fe& v, const Fe& g) {
    return msm(c, std::vector<Fe>{v, g}, std::vector<Point>{c.G, c.H});
  };
  for (unsigned l : {8u, 16u, 32u}) {
    RangeParams params = range_bits(l);
    const Fe top = f.from_u64((uint64_t{1} << l) - 1);
    int accepted = 0, rejected = 0;
    for (int i = 0; i < kRangeRuns; ++i) {
      Fe gamma = f.random(rng);
      Transcript t("acceptance/range"), v("acceptance/range");
      RangeProof ok = prove_range(top, gamma, params, gens, t, rng);
      accepted += verify_range(ok, commit_v(top, gamma), params, gens, v);

      // Out-of-range claims: 2^l + k, or a negative value, proved with an in-range witness.
      Fe over = i % 4 == 3 ? -f.from_u64(1 + rng.uniform(1000)) : f.from_u64((uint64_t{1} << l) + rng.uniform(1000));
      Fe inside = f.from_u64(rng.uniform(uint64_t{1} << l));
      Transcript t2("acceptance/range"), v2("acceptance/range");
      RangeProof forged = prove_range(inside, gamma, params, gens, t2, rng);
      rejected += !verify_range(forged, commit_v(over, gamma), params, gens, v2);
    }
    check(accepted == kRangeRuns, "l=" + std::to_string(l) + " accepted " + std::to_string(accepted));
    check(rejected == kRangeRuns, "l=" + std::to_string(l) + " forgeries rejected " + std::to_string(rejected));
  }
  if (o.ok) o.detail = "l=8,16,32: 2^l-1 accepted and forgeries rejected, 100/100 each";
  return o;
}

// ---------------------------------------------------------------------------
// 6

// Bottom-up fold with ladder multiplications, independent of the tree kernels.
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

bool tree_member(const CurveTree& tree, const Point& root, size_t i, RandomSource& rng) {
  Transcript t("acceptance/tree"), v("acceptance/tree");
  Membership m = prove_membership(tree, i, t, rng);
  return verify_membership(root, m.rerandomized_leaf, m.proof, tree.params, v);
}

bool tree_forged(const CurveTree& tree, size_t i, const Point& fake, RandomSource& rng) {
  CurveTree lie = tree;
  lie.levels[0][i] = fake;
  Transcript t("acceptance/tree"), v("acceptance/tree");
  Membership m = prove_membership(lie, i, t, rng);
  return verify_membership(tree.root(), m.rerandomized_leaf, m.proof, tree.params, v);
}

std::vector<Point> random_points(const Curve& c, size_t n, RandomSource& rng) {
  std::vector<Point> out;
  for (size_t i = 0; i < n; ++i) out.push_back(smul(c, c.scalar().random_nonzero(rng), c.G));
  return out;
}

Outcome curve_tree() {
  Outcome o;
  Check check{&o};
  DeterministicRandom rng(6);
  CurveTreeParams p = CurveTreeParams::make(secp_secq(), 2, 32);
  auto leaves = random_points(p.cycle->E1(), kTreeLeaves, rng);
  CurveTree tree = CurveTree::build(leaves, p);
  const Point root = naive_root(leaves, p);
  check(tree.root() == root, "root differs from independent recomputation");
  int members = 0, outsiders = 0;
  for (int i = 0; i < kTreeProbes; ++i) {
    members += tree_member(tree, root, rng.uniform(kTreeLeaves), rng);
    Point fake = random_points(p.cycle->E1(), 1, rng)[0];
    outsiders += !tree_forged(tree, rng.uniform(kTreeLeaves), fake, rng);
  }
  check(members == kTreeProbes, "members accepted " + std::to_string(members));
  check(outsiders == kTreeProbes, "non-members rejected " + std::to_string(outsiders));

  // Every leaf count up to 64 under depths 1, 2 and 3 on the toy cycle.
  Cycle toy = mid_toy_cycle();
  size_t shapes = 0, probes = 0, failures = 0;
  for (size_t n = 1; n <= kSmallTreeMax; ++n) {
    for (unsigned d : {1u, 2u, 3u}) {
      unsigned b = 1;
      while (std::pow(static_cast<double>(b), d) < static_cast<double>(n)) ++b;
      CurveTreeParams tp = CurveTreeParams::make(toy, d, b);
      auto ls = random_points(toy->E1(), n, rng);
      CurveTree t = CurveTree::build(ls, tp);
      const Point r = naive_root(ls, tp);
      if (!(t.root() == r)) ++failures;
      for (size_t i = 0; i < n; ++i) {
        if (!tree_member(t, r, i, rng)) ++failures;
        if (tree_forged(t, i, random_points(toy->E1(), 1, rng)[0], rng)) ++failures;
        probes += 2;
      }
      ++shapes;
    }
  }
  check(failures == 0, std::to_string(failures) + " small-tree failures");
  if (o.ok) {
    o.detail = "1024 leaves: 50/50 members, 50/50 outsiders; " + std::to_string(shapes) + " toy trees, " +
               std::to_string(probes) + " probes";
  }
  return o;
}

// ---------------------------------------------------------------------------
// 7

RevealMask mask_of(const std::vector<Fe>& l, unsigned bits) {
  RevealMask m(l.size());
  for (size_t i = 0; i < l.size(); ++i) {
    if (bits >> i & 1) m[i] = l[i];
  }
  return m;
}

Outcome acl() {
  Outcome o;
  Check check{&o};
  DeterministicRandom rng(7);
  {
    const Curve& c = secp_secq()->E1();
    const Field& f = c.scalar();
    AclParams params = AclParams::make(Generators::derive(c, 4, "acceptance/acl"));
    SignerKeys keys = acl_keygen(params, rng);
    std::set<Bytes> zetas, zeta1s;
    int ok = 0;
    for (int i = 0; i < kAclRuns; ++i) {
      std::vector<Fe> l;
      for (int k = 0; k < 4; ++k) l.push_back(f.random(rng));
      Fe m = f.random(rng);
      Transcript t("acceptance/acl-reg");
      Registration reg = acl_reg_user(params, l, t, rng);
      SignerSession signer(params, keys, reg.C, rng);
      UserSession user(params, keys.pk, reg.C, m, rng);
      Fe e = user.challenge(signer.commitment());
      auto [sig, open] = user.finish(signer.respond(e));
      ok += acl_verify(params, keys.pk, sig, m);
      zetas.insert(sig.zeta.encode());
      zeta1s.insert(sig.zeta1.encode());
    }
    check(ok == kAclRuns, "round trips verified " + std::to_string(ok));
    check(zetas.size() == kAclRuns && zeta1s.size() == kAclRuns, "repeated zeta or zeta1 across sessions");
  }

  // Show: all of [0,4)^4, every reveal subset, every claim over the revealed positions.
  Cycle toy = mid_toy_cycle();
  const Curve& c = toy->E1();
  const Field& f = c.scalar();
  AclParams params = AclParams::make(Generators::derive(c, 4, "acceptance/acl"));
  SignerKeys keys = acl_keygen(params, rng);
  size_t claims = 0, wrong = 0;
  for (unsigned code = 0; code < 256; ++code) {
    std::vector<Fe> l;
    for (int i = 0; i < 4; ++i) l.push_back(f.from_u64(code >> (2 * i) & 3));
    Transcript t("acceptance/acl-reg");
    Registration reg = acl_reg_user(params, l, t, rng);
    SignerSession signer(params, keys, reg.C, rng);
    const Fe m = f.from_u64(code);
    UserSession user(params, keys.pk, reg.C, m, rng);
    Fe e = user.challenge(signer.commitment());
    auto [sig, open] = user.finish(signer.respond(e));
    for (unsigned bits = 0; bits < 16; ++bits) {
      Transcript p("acceptance/show");
      ShowBundle b = acl_show(params, keys.pk, sig, open, reg.opening, mask_of(l, bits), p, rng);
      const unsigned revealed = static_cast<unsigned>(__builtin_popcount(bits));
      for (unsigned claim = 0; claim < (1u << (2 * revealed)); ++claim) {
        RevealMask mk(4);
        bool truthful = true;
        unsigned k = 0;
        for (unsigned i = 0; i < 4; ++i) {
          if (!(bits >> i & 1)) continue;
          mk[i] = f.from_u64(claim >> (2 * k++) & 3);
          truthful = truthful && *mk[i] == l[i];
        }
        Transcript v("acceptance/show");
        if (acl_show_verify(params, keys.pk, sig, mk, b, v) != truthful) ++wrong;
        ++claims;
      }
    }
  }
  check(wrong == 0, std::to_string(wrong) + " show verdicts wrong");
  if (o.ok) o.detail = "1000 round trips, distinct (zeta, zeta1); " + std::to_string(claims) + " show claims exact";
  return o;
}

// ---------------------------------------------------------------------------
// 8

Outcome homomorphism() {
  Outcome o;
  Check check{&o};
  DeterministicRandom rng(8);
  const Curve& c = secp_secq()->E1();
  const Field& f = c.scalar();
  Generators gens = Generators::system(c);
  int equal = 0;
  for (int i = 0; i < kHomTuples; ++i) {
    std::vector<Fe> a, b, ab;
    const size_t n = 1 + rng.uniform(gens.size());
    for (size_t k = 0; k < n; ++k) {
      a.push_back(f.random(rng));
      b.push_back(f.random(rng));
      ab.push_back(a.back() + b.back());
    }
    Fe r = f.random(rng), s = f.random(rng);
    equal += commit(a, r, gens) + commit(b, s, gens) == commit(ab, r + s, gens);
  }
  check(equal == kHomTuples, "equalities " + std::to_string(equal));
  if (o.ok) o.detail = "1000/1000 exact equalities";
  return o;
}

// ---------------------------------------------------------------------------
// 9, 10

BenchResult run_bench(size_t users, size_t catalogue, size_t reps) {
  BenchConfig cfg;
  cfg.users = users;
  cfg.catalogue = catalogue;
  cfg.reps = reps;
  return bench(cfg);
}

double median_total(const BenchResult& r) {
  std::vector<double> xs = r.total_ms;
  std::sort(xs.begin(), xs.end());
  return xs[xs.size() / 2];
}

Outcome growth() {
  Outcome o;
  Check check{&o};
  // Reward-proof size: Spending-Verify M3 minus Spending M3.
  std::vector<long> sizes;
  for (size_t k : {64u, 128u, 256u}) {
    BenchResult r = run_bench(1, k, 1);
    sizes.push_back(static_cast<long>(r.procs[3].message_bytes.at(3)) -
                    static_cast<long>(r.procs[2].message_bytes.at(3)));
  }
  const long d1 = sizes[1] - sizes[0], d2 = sizes[2] - sizes[1];
  check(d1 > 0 && d1 == d2, "reward proof sizes " + std::to_string(sizes[0]) + "/" + std::to_string(sizes[1]) +
                                "/" + std::to_string(sizes[2]));

  const double t1 = median_total(run_bench(1, 1, 3));
  const double t10 = median_total(run_bench(10, 1, 3));
  const double t100 = median_total(run_bench(100, 1, 1));
  const double ratio = t10 / t1;
  const double per10 = t10 / 10, per100 = t100 / 100;
  const double spread = std::max(per10, per100) / std::min(per10, per100);
  check(ratio >= kUserRatioLo && ratio <= kUserRatioHi, "users 1->10 ratio " + std::to_string(ratio));
  check(spread <= kPerUserSpread, "per-user spread 10 vs 100 users " + std::to_string(spread));
  check(t1 < t10 && t10 < t100, "total time not monotone");
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "reward proof " << sizes[0] << "/" << sizes[1] << "/" << sizes[2] << " B (+" << d1 << ", +" << d2
     << "); users 1->10 ratio " << ratio << "; per-user 10 vs 100 spread " << spread;
  if (o.ok) o.detail = os.str();
  return o;
}

Outcome ordering() {
  Outcome o;
  Check check{&o};
  BenchResult r = run_bench(1, 1, kOrderingReps);
  int good = 0;
  for (const auto& m : r.rep_ms) good += m[0] < m[1] && m[1] < m[2] && m[2] < m[3];
  check(good >= kOrderingNeeded, "ordered in " + std::to_string(good) + " of " + std::to_string(kOrderingReps));
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "ordered in " << good << "/" << kOrderingReps << " reps; means";
  for (const ProcSummary& s : r.procs) os << " " << s.mean_ms;
  os << " ms";
  if (o.ok) o.detail = os.str();
  return o;
}

// ---------------------------------------------------------------------------
// 11

Outcome toy_cycle() {
  Outcome o;
  Check check{&o};
  ToyCycleDescription d = find_toy_cycle_description(1000);
  Cycle c = find_toy_cycle(1000);
  const uint64_t n1 = count_points_exhaustive(d.p, 0, d.b1), n2 = count_points_exhaustive(d.q, 0, d.b2);
  check(is_prime_u64(d.p) && is_prime_u64(d.q), "p or q not prime");
  check(n1 == d.q, "#E1 != q");
  check(n2 == d.p, "#E2 != p");
  check(c->fp->modulus() == U256::from_u64(d.p) && c->fq->modulus() == U256::from_u64(d.q),
        "built cycle differs from the description");
  if (o.ok) {
    o.detail = "p=" + std::to_string(d.p) + " q=" + std::to_string(d.q) + ", #E1=" + std::to_string(n1) +
               " #E2=" + std::to_string(n2);
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "reward example", kRewardLimitS, reward_example},
      {2, "e2e flow (toy)", kE2eToyLimitS, [] { return e2e(mid_toy_cycle()); }},
      {2, "e2e flow (production)", kE2eProdLimitS, [] { return e2e(secp_secq()); }},
      {3, "double-spend detection", kDoubleSpendLimitS, double_spend},
      {4, "sigma suite", kSigmaLimitS, sigma_suite},
      {5, "range proof boundaries", kRangeLimitS, range_boundaries},
      {6, "curve tree", kTreeLimitS, curve_tree},
      {7, "ACL", kAclLimitS, acl},
      {8, "homomorphism", kHomLimitS, homomorphism},
      {9, "growth properties", kGrowthLimitS, growth},
      {10, "procedure ordering", kOrderingLimitS, ordering},
      {11, "toy-cycle oracle", kToyCycleLimitS, toy_cycle},
  };
  secp_secq();  // curve constants are built once, outside any timing

  int failed = 0, ran = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = o.ok && s < c.limit_s;
    if (o.ok && !pass) o.detail += "; over time limit";
    failed += !pass;
    ++ran;
    std::printf("%s  %2d  %-24s %8.2f s / %4.0f s  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, s, c.limit_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
