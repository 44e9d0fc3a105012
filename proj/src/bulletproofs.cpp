#include "boomerang/bulletproofs.hpp"

#include <string>

#include "boomerang/msm.hpp"
#include "boomerang/sigma.hpp"

namespace boomerang {

namespace {

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

unsigned log2_exact(size_t n) {
  unsigned k = 0;
  while ((size_t{1} << k) < n) ++k;
  return k;
}

Fe inner(std::span<const Fe> a, std::span<const Fe> b) {
  Fe acc = a[0].f->zero();
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::vector<Fe> powers(const Fe& x, size_t n) {
  std::vector<Fe> out;
  Fe p = x.f->one();
  for (size_t i = 0; i < n; ++i) {
    out.push_back(p);
    p *= x;
  }
  return out;
}

Point fold_point(const Curve& c, const Fe& x, const Point& lo, const Fe& y, const Point& hi) {
  const Fe ks[] = {x, y};
  const Point ps[] = {lo, hi};
  return msm(c, ks, ps);
}

// Challenges of each round plus the per-index products s_i.
struct IpaChallenges {
  std::vector<Fe> x, x_inv, s;
};

IpaChallenges replay_ipa(const IpaProof& proof, size_t n, const Field& f, Transcript& t) {
  IpaChallenges ch;
  t.absorb_u64("ipa/n", n);
  for (size_t j = 0; j < proof.rounds(); ++j) {
    t.absorb("ipa/L", proof.L[j]);
    t.absorb("ipa/R", proof.R[j]);
    ch.x.push_back(t.challenge_scalar("ipa/x", f));
    ch.x_inv.push_back(ch.x.back().inv());
  }
  const size_t k = proof.rounds();
  ch.s.assign(n, f.one());
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < k; ++j) {
      bool hi = (i >> (k - 1 - j)) & 1;
      ch.s[i] *= hi ? ch.x[j] : ch.x_inv[j];
    }
  }
  return ch;
}

// Appends the terms of
//   P + sum(x^2 L + x^-2 R) - a*sum(s g) - b*sum(s^-1 hscale h) - ab*U
// except P itself. The sum is the identity for a valid proof.
bool append_ipa_terms(const IpaProof& proof, std::span<const Point> g, std::span<const Point> h,
                      std::span<const Fe> hscale, const Point& U, Transcript& t, std::vector<Fe>& ks,
                      std::vector<Point>& ps) {
  const size_t n = g.size();
  if (!is_pow2(n) || h.size() != n || proof.rounds() != log2_exact(n) || proof.R.size() != proof.L.size()) {
    return false;
  }
  IpaChallenges ch = replay_ipa(proof, n, U.c->scalar(), t);
  for (size_t j = 0; j < proof.rounds(); ++j) {
    ks.push_back(ch.x[j] * ch.x[j]);
    ps.push_back(proof.L[j]);
    ks.push_back(ch.x_inv[j] * ch.x_inv[j]);
    ps.push_back(proof.R[j]);
  }
  // s_i^-1 is s of the mirrored index.
  for (size_t i = 0; i < n; ++i) {
    ks.push_back(-(proof.a * ch.s[i]));
    ps.push_back(g[i]);
    Fe hb = proof.b * ch.s[n - 1 - i];
    if (!hscale.empty()) hb *= hscale[i];
    ks.push_back(-hb);
    ps.push_back(h[i]);
  }
  ks.push_back(-(proof.a * proof.b));
  ps.push_back(U);
  return true;
}

void check_gens_cover(const IpaGens& gens, size_t n) {
  if (gens.size() < n) throw std::invalid_argument("IpaGens too small");
}

}  // namespace

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

IpaGens IpaGens::derive(const Curve& c, size_t n, std::string_view label) {
  const Point fixed[] = {c.G, c.H};
  std::string l(label);
  IpaGens out{&c, c.derive_generators(n, l + "/g", fixed), c.derive_generators(n, l + "/h", fixed), {}};
  out.u = c.derive_generators(1, l + "/u", fixed)[0];
  return out;
}

Bytes IpaProof::encode() const {
  Writer w;
  w.u8(static_cast<uint8_t>(L.size()));
  for (size_t j = 0; j < L.size(); ++j) {
    write_point(w, L[j]);
    write_point(w, R[j]);
  }
  write_scalar(w, a);
  write_scalar(w, b);
  return std::move(w).bytes();
}

IpaProof IpaProof::decode(const Curve& curve, Reader& r) {
  IpaProof p;
  size_t k = r.u8();
  if (k > 32) throw DecodeError("ipa: too many rounds");
  for (size_t j = 0; j < k; ++j) {
    p.L.push_back(read_point(curve, r));
    p.R.push_back(read_point(curve, r));
  }
  p.a = read_scalar(curve, r);
  p.b = read_scalar(curve, r);
  return p;
}

IpaProof prove_ipa(std::vector<Fe> a, std::vector<Fe> b, std::vector<Point> g, std::vector<Point> h,
                   const Point& U, Transcript& t) {
  size_t n = a.size();
  if (!is_pow2(n) || b.size() != n || g.size() != n || h.size() != n) {
    throw std::invalid_argument("prove_ipa: lengths must be equal powers of two");
  }
  const Curve& curve = *U.c;
  IpaProof p;
  t.absorb_u64("ipa/n", n);
  while (n > 1) {
    const size_t m = n / 2;
    std::span<const Fe> a_lo(a.data(), m), a_hi(a.data() + m, m), b_lo(b.data(), m), b_hi(b.data() + m, m);
    std::vector<Fe> ks;
    std::vector<Point> ps;
    for (size_t i = 0; i < m; ++i) {
      ks.push_back(a_lo[i]);
      ps.push_back(g[m + i]);
      ks.push_back(b_hi[i]);
      ps.push_back(h[i]);
    }
    ks.push_back(inner(a_lo, b_hi));
    ps.push_back(U);
    Point L = msm(curve, ks, ps);
    ks.clear();
    ps.clear();
    for (size_t i = 0; i < m; ++i) {
      ks.push_back(a_hi[i]);
      ps.push_back(g[i]);
      ks.push_back(b_lo[i]);
      ps.push_back(h[m + i]);
    }
    ks.push_back(inner(a_hi, b_lo));
    ps.push_back(U);
    Point R = msm(curve, ks, ps);

    t.absorb("ipa/L", L);
    t.absorb("ipa/R", R);
    Fe x = t.challenge_scalar("ipa/x", curve.scalar());
    Fe xi = x.inv();
    for (size_t i = 0; i < m; ++i) {
      a[i] = x * a[i] + xi * a[m + i];
      b[i] = xi * b[i] + x * b[m + i];
      g[i] = fold_point(curve, xi, g[i], x, g[m + i]);
      h[i] = fold_point(curve, x, h[i], xi, h[m + i]);
    }
    a.resize(m);
    b.resize(m);
    g.resize(m);
    h.resize(m);
    p.L.push_back(L);
    p.R.push_back(R);
    n = m;
  }
  p.a = a[0];
  p.b = b[0];
  return p;
}

bool verify_ipa(const IpaProof& proof, std::span<const Point> g, std::span<const Point> h, const Point& U,
                const Point& P, Transcript& t) {
  std::vector<Fe> ks;
  std::vector<Point> ps;
  if (!append_ipa_terms(proof, g, h, {}, U, t, ks, ps)) return false;
  ks.push_back(U.c->scalar().one());
  ps.push_back(P);
  return msm(*U.c, ks, ps).is_identity();
}

// ---------------------------------------------------------------------------

void RangeParams::validate(const Field& order) const {
  if (bits == 0 || bits > 64 || !is_pow2(bits)) throw std::invalid_argument("range bits must be a power of two");
  if (order.bits() <= bits + 1) throw std::invalid_argument("group order too small for range width");
}

Bytes RangeProof::encode() const {
  Writer w;
  for (const Point* p : {&A, &S, &T1, &T2}) write_point(w, *p);
  for (const Fe* x : {&tau_x, &mu, &t_hat}) write_scalar(w, *x);
  w.raw(ipa.encode());
  return std::move(w).bytes();
}

RangeProof RangeProof::decode(const Curve& curve, Reader& r) {
  RangeProof p;
  for (Point* x : {&p.A, &p.S, &p.T1, &p.T2}) *x = read_point(curve, r);
  for (Fe* x : {&p.tau_x, &p.mu, &p.t_hat}) *x = read_scalar(curve, r);
  p.ipa = IpaProof::decode(curve, r);
  return p;
}

namespace {

struct RangeChallenges {
  Fe y, z, x, w;
};

void absorb_range_head(Transcript& t, const Point& V, unsigned bits, const RangeProof& p, RangeChallenges& ch) {
  const Field& f = V.c->scalar();
  t.absorb_u64("range/bits", bits);
  t.absorb("range/V", V);
  t.absorb("range/A", p.A);
  t.absorb("range/S", p.S);
  ch.y = t.challenge_scalar("range/y", f);
  ch.z = t.challenge_scalar("range/z", f);
}

void absorb_range_t(Transcript& t, const RangeProof& p, RangeChallenges& ch) {
  const Field& f = p.T1.c->scalar();
  t.absorb("range/T1", p.T1);
  t.absorb("range/T2", p.T2);
  ch.x = t.challenge_scalar("range/x", f);
}

void absorb_range_tail(Transcript& t, const RangeProof& p, RangeChallenges& ch) {
  const Field& f = p.T1.c->scalar();
  t.absorb("range/tau_x", p.tau_x);
  t.absorb("range/mu", p.mu);
  t.absorb("range/t_hat", p.t_hat);
  ch.w = t.challenge_scalar("range/w", f);
}

}  // namespace

RangeProof prove_range(const Fe& value, const Fe& gamma, const RangeParams& params, const IpaGens& gens,
                       Transcript& t, RandomSource& rng) {
  const Curve& curve = *gens.curve;
  const Field& f = curve.scalar();
  params.validate(f);
  const size_t n = params.bits;
  check_gens_cover(gens, n);
  if (value.value().bit_length() > n) throw RangeError("prove_range: value outside [0, 2^bits)");

  std::vector<Fe> aL, aR, sL, sR;
  for (size_t i = 0; i < n; ++i) {
    aL.push_back(value.value().bit(i) ? f.one() : f.zero());
    aR.push_back(aL.back() - f.one());
    sL.push_back(f.random(rng));
    sR.push_back(f.random(rng));
  }
  std::span<const Point> G(gens.g.data(), n), Hv(gens.h.data(), n);
  Fe alpha = f.random(rng), rho = f.random(rng);
  auto vec_commit = [&](const Fe& blind, std::span<const Fe> l, std::span<const Fe> r) {
    std::vector<Fe> ks(l.begin(), l.end());
    ks.insert(ks.end(), r.begin(), r.end());
    ks.push_back(blind);
    std::vector<Point> ps(G.begin(), G.end());
    ps.insert(ps.end(), Hv.begin(), Hv.end());
    ps.push_back(curve.H);
    return msm(curve, ks, ps);
  };

  RangeProof p;
  Point V = msm(curve, std::vector<Fe>{value, gamma}, std::vector<Point>{curve.G, curve.H});
  p.A = vec_commit(alpha, aL, aR);
  p.S = vec_commit(rho, sL, sR);
  RangeChallenges ch;
  absorb_range_head(t, V, params.bits, p, ch);

  const Fe z2 = ch.z * ch.z;
  std::vector<Fe> yn = powers(ch.y, n), twon = powers(f.from_u64(2), n);
  std::vector<Fe> l0(n), l1 = sL, r0(n), r1(n);
  for (size_t i = 0; i < n; ++i) {
    l0[i] = aL[i] - ch.z;
    r0[i] = yn[i] * (aR[i] + ch.z) + z2 * twon[i];
    r1[i] = yn[i] * sR[i];
  }
  Fe t1 = inner(l0, r1) + inner(l1, r0);
  Fe t2 = inner(l1, r1);
  Fe tau1 = f.random(rng), tau2 = f.random(rng);
  p.T1 = msm(curve, std::vector<Fe>{t1, tau1}, std::vector<Point>{curve.G, curve.H});
  p.T2 = msm(curve, std::vector<Fe>{t2, tau2}, std::vector<Point>{curve.G, curve.H});
  absorb_range_t(t, p, ch);

  std::vector<Fe> l(n), r(n);
  for (size_t i = 0; i < n; ++i) {
    l[i] = l0[i] + l1[i] * ch.x;
    r[i] = r0[i] + r1[i] * ch.x;
  }
  p.t_hat = inner(l, r);
  p.tau_x = tau2 * ch.x * ch.x + tau1 * ch.x + z2 * gamma;
  p.mu = alpha + rho * ch.x;
  absorb_range_tail(t, p, ch);

  Fe y_inv = ch.y.inv();
  std::vector<Fe> yinv = powers(y_inv, n);
  std::vector<Point> hprime;
  for (size_t i = 0; i < n; ++i) hprime.push_back(curve.mul_vartime(yinv[i].value(), Hv[i]));
  p.ipa = prove_ipa(l, r, std::vector<Point>(G.begin(), G.end()), hprime, curve.mul(ch.w, gens.u), t);
  return p;
}

bool verify_range(const RangeProof& p, const Point& V, const RangeParams& params, const IpaGens& gens,
                  Transcript& t) {
  const Curve& curve = *gens.curve;
  const Field& f = curve.scalar();
  params.validate(f);
  const size_t n = params.bits;
  if (gens.size() < n) return false;
  RangeChallenges ch;
  absorb_range_head(t, V, params.bits, p, ch);
  absorb_range_t(t, p, ch);
  absorb_range_tail(t, p, ch);

  const Fe z = ch.z, z2 = z * z, z3 = z2 * z;
  std::vector<Fe> yn = powers(ch.y, n), twon = powers(f.from_u64(2), n), yinv = powers(ch.y.inv(), n);
  Fe sum_y = f.zero(), sum_2 = f.zero();
  for (size_t i = 0; i < n; ++i) {
    sum_y += yn[i];
    sum_2 += twon[i];
  }
  Fe delta = (z - z2) * sum_y - z3 * sum_2;
  // t_hat*G + tau_x*H == z^2 V + delta G + x T1 + x^2 T2
  const Fe ks_t[] = {p.t_hat - delta, p.tau_x, -z2, -ch.x, -(ch.x * ch.x)};
  const Point ps_t[] = {curve.G, curve.H, V, p.T1, p.T2};
  if (!msm(curve, ks_t, ps_t).is_identity()) return false;

  std::span<const Point> G(gens.g.data(), n), Hv(gens.h.data(), n);
  Point U = curve.mul(ch.w, gens.u);
  std::vector<Fe> ks;
  std::vector<Point> ps;
  if (!append_ipa_terms(p.ipa, G, Hv, yinv, U, t, ks, ps)) return false;
  // P = A + xS - z<1,G> + sum (z + z^2 2^i y^-i) H_i - mu H + t_hat U
  ks.push_back(f.one());
  ps.push_back(p.A);
  ks.push_back(ch.x);
  ps.push_back(p.S);
  for (size_t i = 0; i < n; ++i) {
    ks.push_back(-z);
    ps.push_back(G[i]);
    ks.push_back(z + z2 * twon[i] * yinv[i]);
    ps.push_back(Hv[i]);
  }
  ks.push_back(-p.mu);
  ps.push_back(curve.H);
  ks.push_back(p.t_hat);
  ps.push_back(U);
  return msm(curve, ks, ps).is_identity();
}

// ---------------------------------------------------------------------------

Point commit_spend(std::span<const Fe> spend, const IpaGens& gens) {
  check_gens_cover(gens, spend.size());
  return msm(*gens.curve, spend, std::span<const Point>(gens.g.data(), spend.size()));
}

Point commit_policy(std::span<const Fe> policy, const IpaGens& gens) {
  check_gens_cover(gens, policy.size());
  return msm(*gens.curve, policy, std::span<const Point>(gens.h.data(), policy.size()));
}

Bytes RewardProof::encode() const {
  Writer w;
  w.raw(ipa.encode());
  write_point(w, slack);
  write_scalar(w, slack_blind);
  w.raw(range.encode());
  return std::move(w).bytes();
}

RewardProof RewardProof::decode(const Curve& curve, Reader& r) {
  RewardProof p;
  p.ipa = IpaProof::decode(curve, r);
  p.slack = read_point(curve, r);
  p.slack_blind = read_scalar(curve, r);
  p.range = RangeProof::decode(curve, r);
  return p;
}

namespace {

Point absorb_reward(Transcript& t, const Fe& reward, const Point& policy_c, const Point& spend_c, size_t k,
                    const RangeParams& params, const IpaGens& gens) {
  t.absorb_u64("reward/k", k);
  t.absorb("reward/limit", as_bytes(params.limit.to_hex()));
  t.absorb("reward/policy", policy_c);
  t.absorb("reward/spend", spend_c);
  t.absorb("reward/value", reward);
  return gens.curve->mul(t.challenge_scalar("reward/w", gens.curve->scalar()), gens.u);
}

}  // namespace

RewardResult prove_reward(std::span<const Fe> spend, std::span<const Fe> policy, const RangeParams& params,
                          const IpaGens& ipa_gens, const IpaGens& range_gens, Transcript& t,
                          RandomSource& rng) {
  if (spend.size() != policy.size() || spend.empty()) {
    throw std::invalid_argument("prove_reward: spend and policy lengths differ");
  }
  const Curve& curve = *ipa_gens.curve;
  const Field& f = curve.scalar();
  const size_t k = spend.size(), n = next_pow2(k);
  check_gens_cover(ipa_gens, n);
  Fe reward = inner(spend, policy);
  Fe limit = f.from_u256(params.limit);
  if (!(reward.value() < params.limit)) throw RangeError("prove_reward: reward not below limit");

  std::vector<Fe> a(spend.begin(), spend.end()), b(policy.begin(), policy.end());
  a.resize(n, f.zero());
  b.resize(n, f.zero());
  Point U = absorb_reward(t, reward, commit_policy(policy, ipa_gens), commit_spend(spend, ipa_gens), k, params,
                          ipa_gens);
  RewardResult out{reward, {}};
  out.proof.ipa = prove_ipa(a, b, std::vector<Point>(ipa_gens.g.begin(), ipa_gens.g.begin() + static_cast<long>(n)),
                            std::vector<Point>(ipa_gens.h.begin(), ipa_gens.h.begin() + static_cast<long>(n)), U, t);
  Fe slack = limit - f.one() - reward;
  out.proof.slack_blind = f.random(rng);
  out.proof.slack = msm(curve, std::vector<Fe>{slack, out.proof.slack_blind}, std::vector<Point>{curve.G, curve.H});
  t.absorb("reward/slack", out.proof.slack);
  out.proof.range = prove_range(slack, out.proof.slack_blind, params, range_gens, t, rng);
  return out;
}

bool verify_reward(const Fe& reward, const Point& policy_commitment, const Point& spend_commitment,
                   size_t catalogue, const RewardProof& proof, const RangeParams& params,
                   const IpaGens& ipa_gens, const IpaGens& range_gens, Transcript& t) {
  const Curve& curve = *ipa_gens.curve;
  const Field& f = curve.scalar();
  const size_t n = next_pow2(catalogue);
  if (catalogue == 0 || ipa_gens.size() < n) return false;
  Point U = absorb_reward(t, reward, policy_commitment, spend_commitment, catalogue, params, ipa_gens);
  Point P = policy_commitment + spend_commitment + curve.mul(reward, U);
  if (!verify_ipa(proof.ipa, std::span<const Point>(ipa_gens.g.data(), n),
                  std::span<const Point>(ipa_gens.h.data(), n), U, P, t)) {
    return false;
  }
  // slack + reward*G == (limit - 1)*G + slack_blind*H
  Fe bound = f.from_u256(params.limit) - f.one();
  const Fe ks[] = {f.one(), reward - bound, -proof.slack_blind};
  const Point ps[] = {proof.slack, curve.G, curve.H};
  if (!msm(curve, ks, ps).is_identity()) return false;
  t.absorb("reward/slack", proof.slack);
  return verify_range(proof.range, proof.slack, params, range_gens, t);
}

}  // namespace boomerang
