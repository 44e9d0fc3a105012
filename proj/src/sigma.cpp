#include "boomerang/sigma.hpp"

#include <stdexcept>

#include "boomerang/msm.hpp"

namespace boomerang {

void write_point(Writer& w, const Point& p) { w.raw(p.encode()); }
void write_scalar(Writer& w, const Fe& x) { w.raw(x.to_bytes()); }
Point read_point(const Curve& curve, Reader& r) { return curve.decode(r); }
Fe read_scalar(const Curve& curve, Reader& r) { return curve.scalar().decode(r); }

bool linear_check(const Curve& curve, std::span<const Fe> s, std::span<const Point> bases, const Point& t,
                  const Fe& c, const Point& target) {
  if (s.size() != bases.size()) return false;
  std::vector<Fe> ks(s.begin(), s.end());
  std::vector<Point> ps(bases.begin(), bases.end());
  ks.push_back(-c);
  ps.push_back(target);
  ks.push_back(-curve.scalar().one());
  ps.push_back(t);
  return msm(curve, ks, ps).is_identity();
}

namespace {

Fe pick_nonce(const Field& f, RandomSource& rng, NoncePresets presets, size_t k) {
  if (k < presets.size() && presets[k]) return *presets[k];
  return f.random_nonzero(rng);
}

}  // namespace

// ---------------------------------------------------------------------------

Bytes OpenProof::encode() const {
  Writer w;
  write_point(w, t1);
  write_scalar(w, c);
  w.count16(s.size());
  for (const Fe& x : s) write_scalar(w, x);
  write_scalar(w, s_x);
  return std::move(w).bytes();
}

OpenProof OpenProof::decode(const Curve& curve, Reader& r) {
  OpenProof p;
  p.t1 = read_point(curve, r);
  p.c = read_scalar(curve, r);
  size_t n = r.count16(kMaxProofVector);
  for (size_t i = 0; i < n; ++i) p.s.push_back(read_scalar(curve, r));
  p.s_x = read_scalar(curve, r);
  return p;
}

OpenProver::OpenProver(Opening witness, const Generators& gens, RandomSource& rng, NoncePresets presets)
    : w_(std::move(witness)) {
  const size_t n = w_.messages.size();
  if (n == 0 || n > gens.size()) throw std::invalid_argument("OpenProver: bad message count");
  const Field& f = gens.curve->scalar();
  for (size_t k = 0; k <= n; ++k) alpha_.push_back(pick_nonce(f, rng, presets, k));
  std::vector<Point> bases(gens.g.begin(), gens.g.begin() + static_cast<long>(n));
  bases.push_back(gens.h);
  t1_ = msm(*gens.curve, alpha_, bases);
}

OpenProof OpenProver::respond(const Fe& c) const {
  OpenProof p{t1_, c, {}, c * w_.r + alpha_.back()};
  for (size_t k = 0; k < w_.messages.size(); ++k) p.s.push_back(c * w_.messages[k] + alpha_[k]);
  return p;
}

bool check_open(const OpenProof& proof, const Commitment& C, const Generators& gens) {
  const size_t n = proof.s.size();
  if (n == 0 || n > gens.size()) return false;
  std::vector<Fe> s = proof.s;
  s.push_back(proof.s_x);
  std::vector<Point> bases(gens.g.begin(), gens.g.begin() + static_cast<long>(n));
  bases.push_back(gens.h);
  return linear_check(*gens.curve, s, bases, proof.t1, proof.c, C.point);
}

void absorb_open(Transcript& t, const Commitment& C, const Generators& gens, const Point& t1) {
  t.absorb("open/C", C.point);
  t.absorb("open/H", gens.h);
  t.absorb_u64("open/n", gens.size());
  for (const Point& g : gens.g) t.absorb("open/G", g);
  t.absorb("open/t1", t1);
}

OpenProof prove_open(const Opening& opening, const Commitment& C, const Generators& gens, Transcript& t,
                     RandomSource& rng) {
  OpenProver prover(opening, gens, rng);
  absorb_open(t, C, gens, prover.t1());
  return prover.respond(t.challenge_scalar("open/c", gens.curve->scalar()));
}

bool verify_open(const OpenProof& proof, const Commitment& C, const Generators& gens, Transcript& t) {
  absorb_open(t, C, gens, proof.t1);
  Fe c = t.challenge_scalar("open/c", gens.curve->scalar());
  return c == proof.c && check_open(proof, C, gens);
}

OpenProof simulate_open(const Commitment& C, const Fe& c, const Generators& gens, size_t n, RandomSource& rng) {
  if (n == 0 || n > gens.size()) throw std::invalid_argument("simulate_open: bad message count");
  const Field& f = gens.curve->scalar();
  OpenProof p;
  p.c = c;
  std::vector<Fe> ks;
  std::vector<Point> ps;
  for (size_t k = 0; k < n; ++k) {
    p.s.push_back(f.random(rng));
    ks.push_back(p.s.back());
    ps.push_back(gens.g[k]);
  }
  p.s_x = f.random(rng);
  ks.push_back(p.s_x);
  ps.push_back(gens.h);
  ks.push_back(-c);
  ps.push_back(C.point);
  p.t1 = msm(*gens.curve, ks, ps);
  return p;
}

Opening extract_open(const OpenProof& a, const OpenProof& b) {
  if (a.c == b.c || a.s.size() != b.s.size()) throw std::invalid_argument("extract_open: need distinct challenges");
  Fe inv = (a.c - b.c).inv();
  Opening o;
  for (size_t k = 0; k < a.s.size(); ++k) o.messages.push_back((a.s[k] - b.s[k]) * inv);
  o.r = (a.s_x - b.s_x) * inv;
  return o;
}

// ---------------------------------------------------------------------------

Bytes IssueProof::encode() const {
  Writer w;
  write_point(w, t1);
  write_point(w, t2);
  write_scalar(w, c);
  for (const Fe* x : {&s1, &s3, &s4, &s5}) write_scalar(w, *x);
  return std::move(w).bytes();
}

IssueProof IssueProof::decode(const Curve& curve, Reader& r) {
  IssueProof p;
  p.t1 = read_point(curve, r);
  p.t2 = read_point(curve, r);
  p.c = read_scalar(curve, r);
  for (Fe* x : {&p.s1, &p.s3, &p.s4, &p.s5}) *x = read_scalar(curve, r);
  return p;
}

namespace {

void require_token_gens(const Generators& gens) {
  if (gens.size() < 5) throw std::invalid_argument("issue proof needs five message generators");
}

void absorb_issue(Transcript& t, const IssueStatement& st, const Generators& gens, const IssueProof& p) {
  t.absorb("issue/C", st.C.point);
  t.absorb("issue/pk", st.pk);
  t.absorb("issue/j", st.j);
  t.absorb("issue/G", gens.curve->G);
  t.absorb("issue/H", gens.h);
  for (const Point& g : gens.g) t.absorb("issue/Gk", g);
  t.absorb("issue/t1", p.t1);
  t.absorb("issue/t2", p.t2);
}

}  // namespace

IssueProof prove_issue(const Opening& token, const IssueStatement& st, const Generators& gens, Transcript& t,
                       RandomSource& rng) {
  require_token_gens(gens);
  if (token.messages.size() != 5) throw std::invalid_argument("prove_issue: token must have five messages");
  const Curve& curve = *gens.curve;
  const Field& f = curve.scalar();
  Fe a1 = f.random_nonzero(rng), a3 = f.random_nonzero(rng), a4 = f.random_nonzero(rng),
     a5 = f.random_nonzero(rng);
  IssueProof p;
  p.t1 = curve.mul(a3, curve.G);
  const Fe ks[] = {a5, a1, a3, a4};
  const Point ps[] = {gens.h, gens.g[0], gens.g[2], gens.g[3]};
  p.t2 = msm(curve, ks, ps);
  absorb_issue(t, st, gens, p);
  p.c = t.challenge_scalar("issue/c", f);
  p.s1 = p.c * token.messages[0] + a1;
  p.s3 = p.c * token.messages[2] + a3;
  p.s4 = p.c * token.messages[3] + a4;
  p.s5 = p.c * token.r + a5;
  return p;
}

bool check_issue(const IssueProof& p, const IssueStatement& st, const Generators& gens) {
  require_token_gens(gens);
  const Curve& curve = *gens.curve;
  const Fe s_pk[] = {p.s3};
  const Point b_pk[] = {curve.G};
  if (!linear_check(curve, s_pk, b_pk, p.t1, p.c, st.pk)) return false;
  const Fe s_c[] = {p.s5, p.s1, p.s3, p.s4};
  const Point b_c[] = {gens.h, gens.g[0], gens.g[2], gens.g[3]};
  Point target = st.C.point - curve.mul(st.j, gens.g[4]);
  return linear_check(curve, s_c, b_c, p.t2, p.c, target);
}

bool verify_issue(const IssueProof& p, const IssueStatement& st, const Generators& gens, Transcript& t) {
  absorb_issue(t, st, gens, p);
  Fe c = t.challenge_scalar("issue/c", gens.curve->scalar());
  return c == p.c && check_issue(p, st, gens);
}

IssueProof simulate_issue(const IssueStatement& st, const Fe& c, const Generators& gens, RandomSource& rng) {
  require_token_gens(gens);
  const Curve& curve = *gens.curve;
  const Field& f = curve.scalar();
  IssueProof p;
  p.c = c;
  p.s1 = f.random(rng);
  p.s3 = f.random(rng);
  p.s4 = f.random(rng);
  p.s5 = f.random(rng);
  p.t1 = curve.mul(p.s3, curve.G) - curve.mul(c, st.pk);
  Point target = st.C.point - curve.mul(st.j, gens.g[4]);
  const Fe ks[] = {p.s5, p.s1, p.s3, p.s4, -c};
  const Point ps[] = {gens.h, gens.g[0], gens.g[2], gens.g[3], target};
  p.t2 = msm(curve, ks, ps);
  return p;
}

// ---------------------------------------------------------------------------

namespace {

Point pedersen_gh(const Curve& curve, const Fe& v, const Fe& r) {
  const Fe ks[] = {v, r};
  const Point ps[] = {curve.G, curve.H};
  return msm(curve, ks, ps);
}

bool gh_check(const Curve& curve, const Fe& sv, const Fe& sr, const Point& t, const Fe& c, const Point& target) {
  const Fe s[] = {sv, sr};
  const Point b[] = {curve.G, curve.H};
  return linear_check(curve, s, b, t, c, target);
}

}  // namespace

Bytes AddProof::encode() const {
  Writer w;
  for (const Point* p : {&t1, &t2, &t3, &t4}) write_point(w, *p);
  write_scalar(w, c);
  for (const Fe* x : {&s1, &s2, &s3, &s4, &s5, &s6}) write_scalar(w, *x);
  return std::move(w).bytes();
}

AddProof AddProof::decode(const Curve& curve, Reader& r) {
  AddProof p;
  for (Point* x : {&p.t1, &p.t2, &p.t3, &p.t4}) *x = read_point(curve, r);
  p.c = read_scalar(curve, r);
  for (Fe* x : {&p.s1, &p.s2, &p.s3, &p.s4, &p.s5, &p.s6}) *x = read_scalar(curve, r);
  return p;
}

AddStatement add_statement(const Curve& curve, const PedersenPair& a, const PedersenPair& b, bool subtract) {
  AddStatement st;
  st.C1 = {pedersen_gh(curve, a.value, a.blind)};
  st.C2 = {pedersen_gh(curve, b.value, b.blind)};
  st.C3 = subtract ? st.C1 - st.C2 : st.C1 + st.C2;
  st.subtract = subtract;
  return st;
}

namespace {

void absorb_add(Transcript& t, const AddStatement& st, const AddProof& p) {
  t.absorb_u64("add/sub", st.subtract ? 1 : 0);
  t.absorb("add/C1", st.C1.point);
  t.absorb("add/C2", st.C2.point);
  t.absorb("add/C3", st.C3.point);
  for (const Point* x : {&p.t1, &p.t2, &p.t3, &p.t4}) t.absorb("add/t", *x);
}

}  // namespace

AddProof prove_add(const PedersenPair& a, const PedersenPair& b, const AddStatement& st, Transcript& t,
                   RandomSource& rng) {
  const Curve& curve = st.C1.curve();
  const Field& f = curve.scalar();
  Fe al[6];
  for (Fe& x : al) x = f.random_nonzero(rng);
  AddProof p;
  p.t1 = curve.mul(al[0], curve.G);
  p.t2 = curve.mul(al[1], curve.H);
  p.t3 = pedersen_gh(curve, al[2], al[3]);
  p.t4 = pedersen_gh(curve, al[4], al[5]);
  absorb_add(t, st, p);
  p.c = t.challenge_scalar("add/c", f);
  Fe v3 = st.subtract ? a.value - b.value : a.value + b.value;
  Fe r3 = st.subtract ? a.blind - b.blind : a.blind + b.blind;
  p.s1 = p.c * v3 + al[0];
  p.s2 = p.c * r3 + al[1];
  p.s3 = p.c * a.value + al[2];
  p.s4 = p.c * a.blind + al[3];
  p.s5 = p.c * b.value + al[4];
  p.s6 = p.c * b.blind + al[5];
  return p;
}

bool check_add(const AddProof& p, const AddStatement& st) {
  const Curve& curve = st.C1.curve();
  Commitment expect = st.subtract ? st.C1 - st.C2 : st.C1 + st.C2;
  if (!(expect == st.C3)) return false;
  return gh_check(curve, p.s3, p.s4, p.t3, p.c, st.C1.point) &&
         gh_check(curve, p.s5, p.s6, p.t4, p.c, st.C2.point) &&
         gh_check(curve, p.s1, p.s2, p.t1 + p.t2, p.c, st.C3.point);
}

bool verify_add(const AddProof& p, const AddStatement& st, Transcript& t) {
  absorb_add(t, st, p);
  Fe c = t.challenge_scalar("add/c", st.C1.curve().scalar());
  return c == p.c && check_add(p, st);
}

AddProof simulate_add(const AddStatement& st, const Fe& c, RandomSource& rng) {
  const Curve& curve = st.C1.curve();
  const Field& f = curve.scalar();
  AddProof p;
  p.c = c;
  for (Fe* x : {&p.s1, &p.s2, &p.s3, &p.s4, &p.s5, &p.s6}) *x = f.random(rng);
  p.t3 = pedersen_gh(curve, p.s3, p.s4) - curve.mul(c, st.C1.point);
  p.t4 = pedersen_gh(curve, p.s5, p.s6) - curve.mul(c, st.C2.point);
  p.t2 = curve.mul(f.random(rng), curve.H);
  p.t1 = pedersen_gh(curve, p.s1, p.s2) - curve.mul(c, st.C3.point) - p.t2;
  return p;
}

// ---------------------------------------------------------------------------

Bytes MulProof::encode() const {
  Writer w;
  for (const Point* p : {&t1, &t2, &t3}) write_point(w, *p);
  write_scalar(w, c);
  for (const Fe* x : {&s1, &s2, &s3, &s4, &s5}) write_scalar(w, *x);
  return std::move(w).bytes();
}

MulProof MulProof::decode(const Curve& curve, Reader& r) {
  MulProof p;
  for (Point* x : {&p.t1, &p.t2, &p.t3}) *x = read_point(curve, r);
  p.c = read_scalar(curve, r);
  for (Fe* x : {&p.s1, &p.s2, &p.s3, &p.s4, &p.s5}) *x = read_scalar(curve, r);
  return p;
}

MulStatement mul_statement(const Curve& curve, const MulWitness& w) {
  return MulStatement{{pedersen_gh(curve, w.x, w.r1)}, {pedersen_gh(curve, w.y, w.r2)},
                      {pedersen_gh(curve, w.x * w.y, w.r3)}};
}

MulProver::MulProver(const MulWitness& w, const MulStatement& st, RandomSource& rng) : w_(w) {
  const Curve& curve = st.C1.curve();
  for (Fe& x : a_) x = curve.scalar().random_nonzero(rng);
  first_.t1 = pedersen_gh(curve, a_[0], a_[1]);
  first_.t2 = pedersen_gh(curve, a_[2], a_[3]);
  const Fe ks[] = {a_[2], a_[4]};
  const Point ps[] = {st.C1.point, curve.H};
  first_.t3 = msm(curve, ks, ps);
}

MulProof MulProver::respond(const Fe& c) const {
  MulProof p = first_;
  p.c = c;
  p.s1 = c * w_.x + a_[0];
  p.s2 = c * w_.r1 + a_[1];
  p.s3 = c * w_.y + a_[2];
  p.s4 = c * w_.r2 + a_[3];
  p.s5 = c * (w_.r3 - w_.r1 * w_.y) + a_[4];
  return p;
}

namespace {

void absorb_mul(Transcript& t, const MulStatement& st, const MulProof& p) {
  t.absorb("mul/C1", st.C1.point);
  t.absorb("mul/C2", st.C2.point);
  t.absorb("mul/C3", st.C3.point);
  for (const Point* x : {&p.t1, &p.t2, &p.t3}) t.absorb("mul/t", *x);
}

}  // namespace

MulProof prove_mul(const MulWitness& w, const MulStatement& st, Transcript& t, RandomSource& rng) {
  MulProver prover(w, st, rng);
  absorb_mul(t, st, prover.first_message());
  return prover.respond(t.challenge_scalar("mul/c", st.C1.curve().scalar()));
}

bool check_mul(const MulProof& p, const MulStatement& st) {
  const Curve& curve = st.C1.curve();
  const Fe s3[] = {p.s3, p.s5};
  const Point b3[] = {st.C1.point, curve.H};
  return gh_check(curve, p.s1, p.s2, p.t1, p.c, st.C1.point) &&
         gh_check(curve, p.s3, p.s4, p.t2, p.c, st.C2.point) &&
         linear_check(curve, s3, b3, p.t3, p.c, st.C3.point);
}

bool verify_mul(const MulProof& p, const MulStatement& st, Transcript& t) {
  absorb_mul(t, st, p);
  Fe c = t.challenge_scalar("mul/c", st.C1.curve().scalar());
  return c == p.c && check_mul(p, st);
}

MulProof simulate_mul(const MulStatement& st, const Fe& c, RandomSource& rng) {
  const Curve& curve = st.C1.curve();
  const Field& f = curve.scalar();
  MulProof p;
  p.c = c;
  for (Fe* x : {&p.s1, &p.s2, &p.s3, &p.s4, &p.s5}) *x = f.random(rng);
  p.t1 = pedersen_gh(curve, p.s1, p.s2) - curve.mul(c, st.C1.point);
  p.t2 = pedersen_gh(curve, p.s3, p.s4) - curve.mul(c, st.C2.point);
  const Fe ks[] = {p.s3, p.s5, -c};
  const Point ps[] = {st.C1.point, curve.H, st.C3.point};
  p.t3 = msm(curve, ks, ps);
  return p;
}

MulWitness extract_mul(const MulProof& a, const MulProof& b) {
  if (a.c == b.c) throw std::invalid_argument("extract_mul: need distinct challenges");
  Fe inv = (a.c - b.c).inv();
  MulWitness w;
  w.x = (a.s1 - b.s1) * inv;
  w.r1 = (a.s2 - b.s2) * inv;
  w.y = (a.s3 - b.s3) * inv;
  w.r2 = (a.s4 - b.s4) * inv;
  w.r3 = (a.s5 - b.s5) * inv + w.r1 * w.y;
  return w;
}

// ---------------------------------------------------------------------------

Bytes AddMulProof::encode() const {
  Writer w;
  for (const Point* p : {&t1, &t2, &t3, &t4, &t5, &t6}) write_point(w, *p);
  write_scalar(w, c);
  for (const Fe* x : {&s1, &s2, &s3, &s4, &s5, &s6, &s7, &s8, &s9}) write_scalar(w, *x);
  return std::move(w).bytes();
}

AddMulProof AddMulProof::decode(const Curve& curve, Reader& r) {
  AddMulProof p;
  for (Point* x : {&p.t1, &p.t2, &p.t3, &p.t4, &p.t5, &p.t6}) *x = read_point(curve, r);
  p.c = read_scalar(curve, r);
  for (Fe* x : {&p.s1, &p.s2, &p.s3, &p.s4, &p.s5, &p.s6, &p.s7, &p.s8, &p.s9}) *x = read_scalar(curve, r);
  return p;
}

AddMulStatement add_mul_statement(const Curve& curve, const AddMulWitness& w) {
  AddMulStatement st;
  st.C1 = {pedersen_gh(curve, w.x, w.r1)};
  st.C2 = {pedersen_gh(curve, w.y, w.r2)};
  st.C3 = {pedersen_gh(curve, w.z, w.r3)};
  st.C4 = {pedersen_gh(curve, w.x * w.y, w.r4)};
  st.C5 = {pedersen_gh(curve, w.x * w.y + w.z, w.r4 + w.r3)};
  return st;
}

AddMulProver::AddMulProver(const AddMulWitness& w, const AddMulStatement& st, RandomSource& rng,
                           std::optional<Fe> preset_x, std::optional<Fe> preset_z)
    : w_(w) {
  const Curve& curve = st.C1.curve();
  for (Fe& x : a_) x = curve.scalar().random_nonzero(rng);
  if (preset_x) a_[0] = *preset_x;
  if (preset_z) a_[4] = *preset_z;
  first_.t1 = pedersen_gh(curve, a_[0], a_[1]);
  first_.t2 = pedersen_gh(curve, a_[2], a_[3]);
  first_.t3 = pedersen_gh(curve, a_[4], a_[5]);
  const Fe ks[] = {a_[2], a_[6]};
  const Point ps[] = {st.C1.point, curve.H};
  first_.t4 = msm(curve, ks, ps);
  first_.t5 = curve.mul(a_[7], curve.G);
  first_.t6 = curve.mul(a_[8], curve.H);
}

AddMulProof AddMulProver::respond(const Fe& c) const {
  AddMulProof p = first_;
  p.c = c;
  p.s1 = c * w_.x + a_[0];
  p.s2 = c * w_.r1 + a_[1];
  p.s3 = c * w_.y + a_[2];
  p.s4 = c * w_.r2 + a_[3];
  p.s5 = c * w_.z + a_[4];
  p.s6 = c * w_.r3 + a_[5];
  p.s7 = c * (w_.r4 - w_.r1 * w_.y) + a_[6];
  p.s8 = c * (w_.x * w_.y + w_.z) + a_[7];
  p.s9 = c * (w_.r4 + w_.r3) + a_[8];
  return p;
}

void absorb_add_mul(Transcript& t, const AddMulStatement& st, const AddMulProof& p) {
  for (const Commitment* x : {&st.C1, &st.C2, &st.C3, &st.C4, &st.C5}) t.absorb("add-mul/C", x->point);
  for (const Point* x : {&p.t1, &p.t2, &p.t3, &p.t4, &p.t5, &p.t6}) t.absorb("add-mul/t", *x);
}

AddMulProof prove_add_mul(const AddMulWitness& w, const AddMulStatement& st, Transcript& t, RandomSource& rng) {
  AddMulProver prover(w, st, rng);
  absorb_add_mul(t, st, prover.first_message());
  return prover.respond(t.challenge_scalar("add-mul/c", st.C1.curve().scalar()));
}

bool check_add_mul(const AddMulProof& p, const AddMulStatement& st) {
  const Curve& curve = st.C1.curve();
  if (!(st.C5 == st.C3 + st.C4)) return false;
  const Fe s4[] = {p.s3, p.s7};
  const Point b4[] = {st.C1.point, curve.H};
  return gh_check(curve, p.s1, p.s2, p.t1, p.c, st.C1.point) &&
         gh_check(curve, p.s3, p.s4, p.t2, p.c, st.C2.point) &&
         gh_check(curve, p.s5, p.s6, p.t3, p.c, st.C3.point) &&
         linear_check(curve, s4, b4, p.t4, p.c, st.C4.point) &&
         gh_check(curve, p.s8, p.s9, p.t5 + p.t6, p.c, st.C5.point);
}

bool verify_add_mul(const AddMulProof& p, const AddMulStatement& st, Transcript& t) {
  absorb_add_mul(t, st, p);
  Fe c = t.challenge_scalar("add-mul/c", st.C1.curve().scalar());
  return c == p.c && check_add_mul(p, st);
}

AddMulProof simulate_add_mul(const AddMulStatement& st, const Fe& c, RandomSource& rng) {
  const Curve& curve = st.C1.curve();
  const Field& f = curve.scalar();
  AddMulProof p;
  p.c = c;
  for (Fe* x : {&p.s1, &p.s2, &p.s3, &p.s4, &p.s5, &p.s6, &p.s7, &p.s8, &p.s9}) *x = f.random(rng);
  p.t1 = pedersen_gh(curve, p.s1, p.s2) - curve.mul(c, st.C1.point);
  p.t2 = pedersen_gh(curve, p.s3, p.s4) - curve.mul(c, st.C2.point);
  p.t3 = pedersen_gh(curve, p.s5, p.s6) - curve.mul(c, st.C3.point);
  const Fe ks[] = {p.s3, p.s7, -c};
  const Point ps[] = {st.C1.point, curve.H, st.C4.point};
  p.t4 = msm(curve, ks, ps);
  p.t6 = curve.mul(f.random(rng), curve.H);
  p.t5 = pedersen_gh(curve, p.s8, p.s9) - curve.mul(c, st.C5.point) - p.t6;
  return p;
}

// ---------------------------------------------------------------------------

Bytes OrEqProof::encode() const {
  Writer w;
  w.count16(branches.size());
  for (const OrEqBranch& b : branches) {
    write_point(w, b.t);
    write_scalar(w, b.c);
    write_scalar(w, b.s);
  }
  return std::move(w).bytes();
}

OrEqProof OrEqProof::decode(const Curve& curve, Reader& r) {
  OrEqProof p;
  size_t n = r.count16(kMaxProofVector);
  for (size_t i = 0; i < n; ++i) {
    OrEqBranch b;
    b.t = read_point(curve, r);
    b.c = read_scalar(curve, r);
    b.s = read_scalar(curve, r);
    p.branches.push_back(b);
  }
  return p;
}

namespace {

void absorb_or_eq(Transcript& t, const Point& c_star, std::span<const Point> children, const Point& h,
                  const OrEqProof& p) {
  t.absorb("or-eq/C*", c_star);
  t.absorb("or-eq/H", h);
  t.absorb_u64("or-eq/n", children.size());
  for (const Point& c : children) t.absorb("or-eq/C", c);
  for (const OrEqBranch& b : p.branches) t.absorb("or-eq/t", b.t);
}

bool branch_ok(const Point& c_star, const Point& child, const Point& h, const OrEqBranch& b) {
  const Fe s[] = {b.s};
  const Point base[] = {h};
  return linear_check(*h.c, s, base, b.t, b.c, c_star - child);
}

}  // namespace

OrEqProof prove_or_eq(const Point& c_star, std::span<const Point> children, size_t index, const Fe& delta,
                      const Point& h, Transcript& t, RandomSource& rng) {
  if (index >= children.size()) throw std::invalid_argument("prove_or_eq: index out of range");
  const Curve& curve = *h.c;
  const Field& f = curve.scalar();
  OrEqProof p;
  p.branches.resize(children.size());
  Fe alpha = f.random_nonzero(rng);
  Fe others = f.zero();
  for (size_t j = 0; j < children.size(); ++j) {
    OrEqBranch& b = p.branches[j];
    if (j == index) {
      b.t = curve.mul(alpha, h);
      continue;
    }
    b.c = f.random(rng);
    b.s = f.random(rng);
    const Fe ks[] = {b.s, -b.c};
    const Point ps[] = {h, c_star - children[j]};
    b.t = msm(curve, ks, ps);
    others += b.c;
  }
  absorb_or_eq(t, c_star, children, h, p);
  Fe c = t.challenge_scalar("or-eq/c", f);
  OrEqBranch& real = p.branches[index];
  real.c = c - others;
  real.s = alpha + real.c * delta;
  return p;
}

bool check_or_eq(const OrEqProof& p, const Point& c_star, std::span<const Point> children, const Point& h,
                 const Fe& c) {
  if (children.empty() || p.branches.size() != children.size()) return false;
  Fe sum = c.f->zero();
  for (const OrEqBranch& b : p.branches) sum += b.c;
  if (sum != c) return false;
  for (size_t j = 0; j < children.size(); ++j) {
    if (!branch_ok(c_star, children[j], h, p.branches[j])) return false;
  }
  return true;
}

bool verify_or_eq(const OrEqProof& p, const Point& c_star, std::span<const Point> children, const Point& h,
                  Transcript& t) {
  absorb_or_eq(t, c_star, children, h, p);
  Fe c = t.challenge_scalar("or-eq/c", h.c->scalar());
  return check_or_eq(p, c_star, children, h, c);
}

OrEqProof simulate_or_eq(const Point& c_star, std::span<const Point> children, const Point& h, const Fe& c,
                         RandomSource& rng) {
  if (children.empty()) throw std::invalid_argument("simulate_or_eq: no children");
  const Curve& curve = *h.c;
  const Field& f = curve.scalar();
  OrEqProof p;
  Fe rest = c;
  for (size_t j = 0; j < children.size(); ++j) {
    OrEqBranch b;
    b.c = j + 1 == children.size() ? rest : f.random(rng);
    rest -= b.c;
    b.s = f.random(rng);
    const Fe ks[] = {b.s, -b.c};
    const Point ps[] = {h, c_star - children[j]};
    b.t = msm(curve, ks, ps);
    p.branches.push_back(b);
  }
  return p;
}

// ---------------------------------------------------------------------------

Bytes DlogEqProof::encode() const {
  Writer w;
  w.count16(t.size());
  for (const Point& x : t) write_point(w, x);
  write_scalar(w, c);
  write_scalar(w, s);
  return std::move(w).bytes();
}

DlogEqProof DlogEqProof::decode(const Curve& curve, Reader& r) {
  DlogEqProof p;
  size_t n = r.count16(kMaxProofVector);
  for (size_t i = 0; i < n; ++i) p.t.push_back(read_point(curve, r));
  p.c = read_scalar(curve, r);
  p.s = read_scalar(curve, r);
  return p;
}

namespace {

void absorb_dlog_eq(Transcript& t, std::span<const Point> bases, std::span<const Point> points,
                    const DlogEqProof& p) {
  t.absorb_u64("dlog-eq/n", bases.size());
  for (size_t j = 0; j < bases.size(); ++j) {
    t.absorb("dlog-eq/B", bases[j]);
    t.absorb("dlog-eq/P", points[j]);
  }
  for (const Point& x : p.t) t.absorb("dlog-eq/t", x);
}

void require_pairs(std::span<const Point> bases, std::span<const Point> points) {
  if (bases.empty() || bases.size() != points.size()) throw std::invalid_argument("dlog-eq: bad base list");
}

}  // namespace

DlogEqProof prove_dlog_eq(std::span<const Point> bases, std::span<const Point> points, const Fe& w, Transcript& t,
                          RandomSource& rng) {
  require_pairs(bases, points);
  const Curve& curve = *bases[0].c;
  Fe alpha = curve.scalar().random_nonzero(rng);
  DlogEqProof p;
  for (const Point& b : bases) p.t.push_back(curve.mul(alpha, b));
  absorb_dlog_eq(t, bases, points, p);
  p.c = t.challenge_scalar("dlog-eq/c", curve.scalar());
  p.s = alpha + p.c * w;
  return p;
}

bool check_dlog_eq(const DlogEqProof& p, std::span<const Point> bases, std::span<const Point> points) {
  if (bases.empty() || bases.size() != points.size() || p.t.size() != bases.size()) return false;
  const Curve& curve = *bases[0].c;
  for (size_t j = 0; j < bases.size(); ++j) {
    const Fe s[] = {p.s};
    const Point b[] = {bases[j]};
    if (!linear_check(curve, s, b, p.t[j], p.c, points[j])) return false;
  }
  return true;
}

bool verify_dlog_eq(const DlogEqProof& p, std::span<const Point> bases, std::span<const Point> points,
                    Transcript& t) {
  if (bases.empty() || bases.size() != points.size()) return false;
  absorb_dlog_eq(t, bases, points, p);
  Fe c = t.challenge_scalar("dlog-eq/c", bases[0].c->scalar());
  return c == p.c && check_dlog_eq(p, bases, points);
}

DlogEqProof simulate_dlog_eq(std::span<const Point> bases, std::span<const Point> points, const Fe& c,
                             RandomSource& rng) {
  require_pairs(bases, points);
  const Curve& curve = *bases[0].c;
  DlogEqProof p;
  p.c = c;
  p.s = curve.scalar().random(rng);
  for (size_t j = 0; j < bases.size(); ++j) {
    const Fe ks[] = {p.s, -c};
    const Point ps[] = {bases[j], points[j]};
    p.t.push_back(msm(curve, ks, ps));
  }
  return p;
}

}  // namespace boomerang
