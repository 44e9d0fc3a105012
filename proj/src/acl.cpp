#include "boomerang/acl.hpp"

#include <string>

#include "boomerang/msm.hpp"

namespace boomerang {

AclParams AclParams::make(const Generators& attrs) {
  const Curve& c = *attrs.curve;
  std::vector<Point> fixed = attrs.g;
  fixed.push_back(c.G);
  fixed.push_back(attrs.h);
  return AclParams{&c, attrs, c.derive_generators(1, "acl-crs", fixed)[0]};
}

Point acl_tag_key(const AclParams& params, const Point& y) {
  const Curve& c = *params.curve;
  std::string label = "acl-z/" + to_hex(c.G.encode()) + to_hex(y.encode()) + to_hex(params.h.encode());
  return c.hash_to_curve(label, 0);
}

SignerKeys acl_keygen(const AclParams& params, RandomSource& rng) {
  const Curve& c = *params.curve;
  SignerKeys k;
  k.x = c.scalar().random_nonzero(rng);
  k.pk.y = c.mul(k.x, c.G);
  k.pk.z = acl_tag_key(params, k.pk.y);
  return k;
}

Registration acl_reg_user(const AclParams& params, std::vector<Fe> attributes, Transcript& t, RandomSource& rng) {
  Registration reg;
  reg.opening.messages = std::move(attributes);
  reg.opening.r = params.curve->scalar().random(rng);
  reg.C = commit(reg.opening, params.attrs);
  reg.proof = prove_open(reg.opening, reg.C, params.attrs, t, rng);
  return reg;
}

bool acl_reg_signer(const AclParams& params, const Commitment& C, const OpenProof& proof, Transcript& t) {
  return proof.s.size() == params.attribute_count() && verify_open(proof, C, params.attrs, t);
}

// ---------------------------------------------------------------------------

Bytes SignerCommit::encode() const {
  Writer w;
  write_scalar(w, rand);
  for (const Point* p : {&a, &a1, &a2}) write_point(w, *p);
  return std::move(w).bytes();
}

SignerCommit SignerCommit::decode(const Curve& curve, Reader& r) {
  SignerCommit R;
  R.rand = read_scalar(curve, r);
  for (Point* p : {&R.a, &R.a1, &R.a2}) *p = read_point(curve, r);
  return R;
}

Bytes SignerResponse::encode() const {
  Writer w;
  for (const Fe* x : {&ch, &c, &r, &r1, &r2}) write_scalar(w, *x);
  return std::move(w).bytes();
}

SignerResponse SignerResponse::decode(const Curve& curve, Reader& r) {
  SignerResponse S;
  for (Fe* x : {&S.ch, &S.c, &S.r, &S.r1, &S.r2}) *x = read_scalar(curve, r);
  return S;
}

Bytes BlindSignature::encode() const {
  Writer w;
  write_point(w, zeta1);
  write_point(w, zeta);
  for (const Fe* x : {&rho, &omega, &rho1, &rho2, &nu, &omega1}) write_scalar(w, *x);
  return std::move(w).bytes();
}

BlindSignature BlindSignature::decode(const Curve& curve, Reader& r) {
  BlindSignature s;
  s.zeta1 = read_point(curve, r);
  s.zeta = read_point(curve, r);
  for (Fe* x : {&s.rho, &s.omega, &s.rho1, &s.rho2, &s.nu, &s.omega1}) *x = read_scalar(curve, r);
  return s;
}

namespace {

Point lin2(const Curve& c, const Fe& a, const Point& P, const Fe& b, const Point& Q) {
  const Fe ks[] = {a, b};
  const Point ps[] = {P, Q};
  return msm(c, ks, ps);
}

Fe acl_hash(const Curve& c, const Point& zeta, const Point& zeta1, const Point& alpha, const Point& alpha1,
            const Point& alpha2, const Point& mu, const Fe& m) {
  Transcript t("acl-sign");
  t.absorb("zeta", zeta);
  t.absorb("zeta1", zeta1);
  t.absorb("alpha", alpha);
  t.absorb("alpha1", alpha1);
  t.absorb("alpha2", alpha2);
  t.absorb("mu", mu);
  t.absorb("m", m);
  return t.challenge_scalar("epsilon", c.scalar());
}

Fe signature_hash(const AclParams& params, const AclPublicKey& pk, const BlindSignature& s, const Fe& m) {
  const Curve& c = *params.curve;
  Point zeta2 = s.zeta - s.zeta1;
  return acl_hash(c, s.zeta, s.zeta1, lin2(c, s.rho, c.G, s.omega, pk.y), lin2(c, s.rho1, c.G, s.omega1, s.zeta1),
                  lin2(c, s.rho2, params.h, s.omega1, zeta2), lin2(c, s.nu, pk.z, s.omega1, s.zeta), m);
}

}  // namespace

SignerSession::SignerSession(const AclParams& params, const SignerKeys& keys, const Commitment& C,
                             RandomSource& rng)
    : params_(&params), x_(keys.x) {
  const Curve& c = *params.curve;
  const Field& f = c.scalar();
  R_.rand = f.random_nonzero(rng);
  u_ = f.random(rng);
  r1_ = f.random(rng);
  r2_ = f.random(rng);
  c_ = f.random(rng);
  Point z1 = C.point + c.mul(R_.rand, c.G);
  Point z2 = keys.pk.z - z1;
  R_.a = c.mul(u_, c.G);
  R_.a1 = lin2(c, r1_, c.G, c_, z1);
  R_.a2 = lin2(c, r2_, params.h, c_, z2);
}

SignerResponse SignerSession::respond(const Fe& e) {
  if (answered_) throw AclAbort("signer session already answered");
  answered_ = true;
  SignerResponse S;
  S.ch = e - c_;
  S.c = c_;
  S.r = u_ - S.ch * x_;
  S.r1 = r1_;
  S.r2 = r2_;
  return S;
}

UserSession::UserSession(const AclParams& params, const AclPublicKey& pk, const Commitment& C, const Fe& m,
                         RandomSource& rng)
    : params_(&params), pk_(pk), C_(C), m_(m), rng_(&rng) {}

Fe UserSession::challenge(const SignerCommit& R) {
  const Curve& c = *params_->curve;
  const Field& f = c.scalar();
  if (R.rand.is_zero()) throw AclAbort("signer sent rand = 0");
  for (const Point* p : {&R.a, &R.a1, &R.a2}) {
    if (p->c != &c || p->is_identity()) throw AclAbort("signer commitment not in the group");
  }
  rand_ = R.rand;
  gamma_ = f.random_nonzero(*rng_);
  tau_ = f.random(*rng_);
  for (Fe& ti : t_) ti = f.random(*rng_);
  Point z1 = C_.point + c.mul(R.rand, c.G);
  zeta_ = c.mul(gamma_, pk_.z);
  zeta1_ = c.mul(gamma_, z1);
  zeta2_ = zeta_ - zeta1_;
  Point mu = c.mul(tau_, pk_.z);
  const Fe ka[] = {f.one(), t_[0], t_[1]};
  const Point pa[] = {R.a, c.G, pk_.y};
  Point alpha = msm(c, ka, pa);
  const Fe ka1[] = {gamma_, t_[2], t_[3]};
  const Point pa1[] = {R.a1, c.G, zeta1_};
  Point alpha1 = msm(c, ka1, pa1);
  const Fe ka2[] = {gamma_, t_[4], t_[3]};
  const Point pa2[] = {R.a2, params_->h, zeta2_};
  Point alpha2 = msm(c, ka2, pa2);
  Fe eps = acl_hash(c, zeta_, zeta1_, alpha, alpha1, alpha2, mu, m_);
  challenged_ = true;
  return eps - t_[1] - t_[3];
}

std::pair<BlindSignature, SignatureOpening> UserSession::finish(const SignerResponse& S) const {
  if (!challenged_) throw AclAbort("finish before challenge");
  BlindSignature s;
  s.zeta1 = zeta1_;
  s.zeta = zeta_;
  s.rho = S.r + t_[0];
  s.omega = S.ch + t_[1];
  s.rho1 = gamma_ * S.r1 + t_[2];
  s.rho2 = gamma_ * S.r2 + t_[4];
  s.omega1 = S.c + t_[3];
  s.nu = tau_ - s.omega1 * gamma_;
  if (s.omega + s.omega1 != signature_hash(*params_, pk_, s, m_)) throw AclAbort("signature identity fails");
  return {s, SignatureOpening{gamma_, rand_}};
}

bool acl_verify(const AclParams& params, const AclPublicKey& pk, const BlindSignature& sig, const Fe& m) {
  const Curve& c = *params.curve;
  if (sig.zeta.c != &c || sig.zeta1.c != &c || sig.zeta.is_identity()) return false;
  return sig.omega + sig.omega1 == signature_hash(params, pk, sig, m);
}

// ---------------------------------------------------------------------------

Bytes ShowBundle::encode() const {
  Writer w;
  write_point(w, Gamma);
  w.count16(h_prime.size());
  for (const Point& p : h_prime) write_point(w, p);
  w.raw(eq.encode());
  w.raw(open.encode());
  return std::move(w).bytes();
}

ShowBundle ShowBundle::decode(const Curve& curve, size_t attributes, Reader& r) {
  ShowBundle b;
  b.Gamma = read_point(curve, r);
  size_t n = r.count16(attributes + 1);
  for (size_t i = 0; i < n; ++i) b.h_prime.push_back(read_point(curve, r));
  b.eq = DlogEqProof::decode(curve, r);
  b.open = OpenProof::decode(curve, r);
  return b;
}

std::optional<size_t> show_slot(const RevealMask& revealed, size_t attribute) {
  if (attribute >= revealed.size() || revealed[attribute]) return std::nullopt;
  size_t slot = 1;
  for (size_t i = 0; i < attribute; ++i) slot += revealed[i] ? 0 : 1;
  return slot;
}

namespace {

std::vector<Point> eq_bases(const AclParams& params, const AclPublicKey& pk) {
  std::vector<Point> b = {pk.z, params.curve->G, params.attrs.h};
  b.insert(b.end(), params.attrs.g.begin(), params.attrs.g.end());
  return b;
}

std::vector<Point> eq_points(const ShowBundle& bundle, const BlindSignature& sig) {
  std::vector<Point> p = {sig.zeta, bundle.Gamma};
  p.insert(p.end(), bundle.h_prime.begin(), bundle.h_prime.end());
  return p;
}

// zeta'_1 = zeta_1 - sum revealed l_i*h'_i and the bases of the hidden part.
ShowStatement derive_statement(const Curve& c, const BlindSignature& sig, const RevealMask& revealed,
                               const ShowBundle& b) {
  ShowStatement st{{sig.zeta1}, Generators{&c, {b.h_prime[0]}, b.Gamma}};
  std::vector<Fe> ks;
  std::vector<Point> ps;
  for (size_t i = 0; i < revealed.size(); ++i) {
    if (revealed[i]) {
      ks.push_back(*revealed[i]);
      ps.push_back(b.h_prime[i + 1]);
    } else {
      st.bases.g.push_back(b.h_prime[i + 1]);
    }
  }
  if (!ks.empty()) st.target.point = st.target.point - msm(c, ks, ps);
  return st;
}

void absorb_show(Transcript& t, const BlindSignature& sig, const RevealMask& revealed) {
  t.absorb("show/sig", sig.encode());
  for (size_t i = 0; i < revealed.size(); ++i) {
    if (revealed[i]) {
      t.absorb_u64("show/revealed", i);
      t.absorb("show/value", *revealed[i]);
    }
  }
}

}  // namespace

ShowProver::ShowProver(const AclParams& params, const AclPublicKey& pk, const BlindSignature& sig,
                       const SignatureOpening& sopen, const Opening& attrs, const RevealMask& revealed,
                       Transcript& t, RandomSource& rng, std::span<const std::optional<Fe>> attr_presets) {
  const Curve& c = *params.curve;
  const size_t n = params.attribute_count();
  if (attrs.messages.size() != n || revealed.size() != n) throw std::invalid_argument("show: attribute count");
  for (size_t i = 0; i < n; ++i) {
    if (revealed[i] && *revealed[i] != attrs.messages[i]) throw std::invalid_argument("show: revealed value differs");
  }
  absorb_show(t, sig, revealed);
  bundle_.Gamma = c.mul(sopen.gamma, c.G);
  bundle_.h_prime.push_back(c.mul(sopen.gamma, params.attrs.h));
  for (const Point& g : params.attrs.g) bundle_.h_prime.push_back(c.mul(sopen.gamma, g));
  bundle_.eq = prove_dlog_eq(eq_bases(params, pk), eq_points(bundle_, sig), sopen.gamma, t, rng);

  ShowStatement st = derive_statement(c, sig, revealed, bundle_);
  target_ = st.target;
  bases_ = st.bases;
  Opening w{{attrs.r}, sopen.rand};
  std::vector<std::optional<Fe>> presets(1);
  for (size_t i = 0; i < n; ++i) {
    if (revealed[i]) continue;
    w.messages.push_back(attrs.messages[i]);
    presets.push_back(i < attr_presets.size() ? attr_presets[i] : std::nullopt);
  }
  prover_.emplace(std::move(w), bases_, rng, presets);
}

ShowBundle ShowProver::respond(const Fe& c) const {
  ShowBundle b = bundle_;
  b.open = prover_->respond(c);
  return b;
}

std::optional<ShowStatement> acl_show_statement(const AclParams& params, const AclPublicKey& pk,
                                                const BlindSignature& sig, const RevealMask& revealed,
                                                const ShowBundle& bundle, Transcript& t) {
  const Curve& c = *params.curve;
  const size_t n = params.attribute_count();
  if (revealed.size() != n || bundle.h_prime.size() != n + 1) return std::nullopt;
  if (bundle.Gamma.c != &c || bundle.Gamma.is_identity()) return std::nullopt;
  absorb_show(t, sig, revealed);
  if (!verify_dlog_eq(bundle.eq, eq_bases(params, pk), eq_points(bundle, sig), t)) return std::nullopt;
  return derive_statement(c, sig, revealed, bundle);
}

ShowBundle acl_show(const AclParams& params, const AclPublicKey& pk, const BlindSignature& sig,
                    const SignatureOpening& sopen, const Opening& attrs, const RevealMask& revealed, Transcript& t,
                    RandomSource& rng) {
  ShowProver p(params, pk, sig, sopen, attrs, revealed, t, rng);
  absorb_open(t, p.target(), p.bases(), p.t1());
  return p.respond(t.challenge_scalar("show/c", params.curve->scalar()));
}

bool acl_show_verify(const AclParams& params, const AclPublicKey& pk, const BlindSignature& sig,
                     const RevealMask& revealed, const ShowBundle& bundle, Transcript& t) {
  auto st = acl_show_statement(params, pk, sig, revealed, bundle, t);
  if (!st || bundle.open.s.size() != st->bases.size()) return false;
  absorb_open(t, st->target, st->bases, bundle.open.t1);
  Fe c = t.challenge_scalar("show/c", params.curve->scalar());
  return c == bundle.open.c && check_open(bundle.open, st->target, st->bases);
}

}  // namespace boomerang
