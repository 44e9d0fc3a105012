#include "boomerang/ats.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <tuple>

#include "boomerang/msm.hpp"

namespace boomerang {

std::string_view procedure_name(Procedure p) {
  switch (p) {
    case Procedure::Issuance: return "Issuance";
    case Procedure::Collection: return "Collection";
    case Procedure::Spending: return "Spending";
    case Procedure::SpendVerify: return "Spending-Verify";
  }
  return "unknown";
}

std::string_view code_name(AtsCode code) {
  switch (code) {
    case AtsCode::Ok: return "ok";
    case AtsCode::Malformed: return "malformed";
    case AtsCode::BadVersion: return "bad-version";
    case AtsCode::Oversize: return "oversize";
    case AtsCode::UnknownProcedure: return "unknown-procedure";
    case AtsCode::UnexpectedMessage: return "unexpected-message";
    case AtsCode::UnknownSession: return "unknown-session";
    case AtsCode::Precondition: return "precondition";
    case AtsCode::Overspend: return "overspend";
    case AtsCode::IssueProof: return "pi-issue";
    case AtsCode::Registration: return "registration";
    case AtsCode::TokenCap: return "token-cap";
    case AtsCode::RateLimited: return "rate-limited";
    case AtsCode::Signature: return "signature";
    case AtsCode::UnknownRoot: return "unknown-root";
    case AtsCode::Membership: return "pi-member";
    case AtsCode::ShowProof: return "show";
    case AtsCode::Linking: return "linking";
    case AtsCode::ValueRange: return "value-range";
    case AtsCode::SubProof: return "pi-sub";
    case AtsCode::DoubleSpend: return "double-spend";
    case AtsCode::AclAbort: return "acl-abort";
    case AtsCode::RewardProof: return "pi-reward";
    case AtsCode::Internal: return "internal";
  }
  return "unknown";
}

namespace {

unsigned range_bits_for(const Field& order) {
  unsigned bits = 16;
  while (bits > 1 && order.bits() <= bits + 1) bits /= 2;
  return bits;
}

template <class T, class... A>
T parse(ByteView bytes, const A&... args) {
  try {
    Reader r(bytes);
    T out = [&] {
      if constexpr (sizeof...(A) == 2) {
        const auto& [a, b] = std::tie(args...);
        return T::decode(a, r, b);
      } else {
        return T::decode(args..., r);
      }
    }();
    r.expect_done();
    return out;
  } catch (const AtsError&) {
    throw;
  } catch (const std::exception& e) {
    throw AtsError(AtsCode::Malformed, std::string("malformed message: ") + e.what());
  }
}

Generators sub_gens(const Generators& g, std::initializer_list<size_t> slots) {
  Generators out{g.curve, {}, g.h};
  for (size_t s : slots) out.g.push_back(g.g[s]);
  return out;
}

Point lin(const Curve& c, std::initializer_list<Fe> ks, std::initializer_list<Point> ps) {
  return msm(c, std::vector<Fe>(ks), std::vector<Point>(ps));
}

}  // namespace

// ---------------------------------------------------------------------------

std::shared_ptr<const AtsParams> AtsParams::make(Cycle cycle, size_t tokens, size_t catalogue) {
  if (tokens == 0) throw AtsError(AtsCode::Precondition, "setup: token count must be positive");
  if (catalogue == 0) catalogue = tokens;
  if (catalogue < tokens) throw AtsError(AtsCode::Precondition, "setup: catalogue smaller than token count");
  auto p = std::make_shared<AtsParams>();
  const Curve& e1 = cycle->E1();
  if (e1.gens.size() < 5) throw std::invalid_argument("setup: cycle needs five system generators");
  p->tokens = tokens;
  p->catalogue = catalogue;
  p->token_gens = Generators::system(e1);
  p->token_gens.g.resize(5);
  p->acl = AclParams::make(p->token_gens);
  unsigned branching = 1;
  while (static_cast<size_t>(branching) * branching < tokens) ++branching;
  p->tree = CurveTreeParams::make(cycle, 2, branching);
  const unsigned bits = range_bits_for(e1.scalar());
  p->sub = RangeParams{bits, U256::from_u64(uint64_t{1} << (bits - 1))};
  p->reward = p->sub;
  p->sub.validate(e1.scalar());
  p->range_gens = IpaGens::derive(e1, bits);
  p->reward_gens = IpaGens::derive(e1, next_pow2(catalogue), "reward");
  p->cycle = std::move(cycle);
  return p;
}

bool AtsParams::in_value_space(const Fe& v) const {
  return !(U256::from_u64(uint64_t{1} << (sub.bits - 1)) < v.value());
}

std::optional<int64_t> scalar_to_int(const Fe& x) {
  U256 a = x.value();
  U256 b = (-x).value();
  const bool neg = b < a;
  const U256& m = neg ? b : a;
  if (!m.fits_u64() || m.w[0] >= (uint64_t{1} << 62)) return std::nullopt;
  return neg ? -static_cast<int64_t>(m.w[0]) : static_cast<int64_t>(m.w[0]);
}

bool token_cap_check(size_t held, size_t cap) { return held <= cap && cap > 0; }

std::vector<Fe> Token::attributes() const { return {id, v, sk, r1, id.f->from_u64(j)}; }

Commitment Token::commit(const AtsParams& params) const { return boomerang::commit(opening(), params.token_gens); }

Bytes IssuerPublic::encode() const {
  Writer w;
  write_point(w, pk.y);
  write_point(w, pk.z);
  write_point(w, policy_commitment);
  return std::move(w).bytes();
}

IssuerPublic IssuerPublic::decode(const AtsParams& params, Reader& r) {
  IssuerPublic p;
  p.pk.y = read_point(params.curve(), r);
  p.pk.z = read_point(params.curve(), r);
  p.policy_commitment = read_point(params.curve(), r);
  if (p.pk.z != acl_tag_key(params.acl, p.pk.y)) throw DecodeError("issuer public: tag key mismatch");
  return p;
}

// ---------------------------------------------------------------------------

ClientState ClientState::setup(ParamsPtr params, const IssuerPublic& issuer, RandomSource& rng) {
  const AtsParams& P = *params;
  const Field& f = P.scalar();
  ClientState cs;
  cs.params_ = std::move(params);
  cs.issuer_ = issuer;
  cs.sk_ = f.random_nonzero(rng);
  cs.pk_ = P.curve().mul(cs.sk_, P.curve().G);
  cs.tree_key_.resize(32);
  rng.fill(cs.tree_key_);
  for (size_t j = 0; j < P.tokens; ++j) {
    cs.state_.push_back(Token{f.random_nonzero(rng), f.zero(), cs.sk_, f.random_nonzero(rng),
                              static_cast<uint32_t>(j), f.zero()});
  }
  cs.comm_.resize(P.tokens);
  cs.sig_.resize(P.tokens);
  cs.tree_ = cs.rebuild_tree();
  return cs;
}

std::vector<Point> ClientState::leaves() const {
  std::vector<Point> out;
  for (const auto& c : comm_) out.push_back(c ? c->point : params_->curve().identity());
  return out;
}

CurveTree ClientState::rebuild_tree() const { return CurveTree::build(leaves(), params_->tree, tree_key_); }

void ClientState::install(uint32_t j, const Token& token, const Commitment& C, const SignedToken& sig,
                          CurveTree tree) {
  state_[j] = token;
  comm_[j] = C;
  sig_[j] = sig;
  tree_ = std::move(tree);
}

namespace {
constexpr uint8_t kSnapshotVersion = 0x01;
}

void ClientState::update_issuer(const IssuerPublic& issuer) {
  if (!(issuer.pk.y == issuer_.pk.y) || !(issuer.pk.z == issuer_.pk.z)) {
    throw AtsError(AtsCode::Precondition, "issuer key changed");
  }
  issuer_ = issuer;
}

Bytes ClientState::snapshot() const {
  Writer w;
  w.u8(kSnapshotVersion);
  w.raw(issuer_.encode());
  write_scalar(w, sk_);
  w.var16(tree_key_);
  w.u32(token_cap > UINT32_MAX ? UINT32_MAX : static_cast<uint32_t>(token_cap));
  w.u32(static_cast<uint32_t>(state_.size()));
  for (const Token& t : state_) {
    for (const Fe* x : {&t.id, &t.v, &t.r1, &t.blind}) write_scalar(w, *x);
    w.u32(t.j);
  }
  for (size_t j = 0; j < state_.size(); ++j) {
    w.u8(comm_[j] ? 1 : 0);
    if (!comm_[j]) continue;
    write_point(w, comm_[j]->point);
    w.raw(sig_[j]->sig.encode());
    write_scalar(w, sig_[j]->open.gamma);
    write_scalar(w, sig_[j]->open.rand);
  }
  return std::move(w).bytes();
}

ClientState ClientState::restore(ParamsPtr params, ByteView bytes) {
  Reader r(bytes);
  if (r.u8() != kSnapshotVersion) throw DecodeError("client snapshot: unknown version");
  const AtsParams& P = *params;
  const Curve& c = P.curve();
  ClientState cs;
  cs.params_ = params;
  cs.issuer_ = IssuerPublic::decode(P, r);
  cs.sk_ = read_scalar(c, r);
  cs.pk_ = c.mul(cs.sk_, c.G);
  cs.tree_key_ = r.var16();
  cs.token_cap = r.u32();
  size_t n = r.u32();
  if (n != P.tokens) throw DecodeError("client snapshot: token count differs from parameters");
  for (size_t j = 0; j < n; ++j) {
    Token t;
    t.sk = cs.sk_;
    for (Fe* x : {&t.id, &t.v, &t.r1, &t.blind}) *x = read_scalar(c, r);
    t.j = r.u32();
    if (t.j != j) throw DecodeError("client snapshot: token position mismatch");
    cs.state_.push_back(t);
  }
  cs.comm_.resize(n);
  cs.sig_.resize(n);
  for (size_t j = 0; j < n; ++j) {
    if (r.u8() == 0) continue;
    cs.comm_[j] = Commitment{read_point(c, r)};
    SignedToken s;
    s.sig = BlindSignature::decode(c, r);
    s.open.gamma = read_scalar(c, r);
    s.open.rand = read_scalar(c, r);
    cs.sig_[j] = s;
  }
  r.expect_done();
  cs.tree_ = cs.rebuild_tree();
  return cs;
}

// ---------------------------------------------------------------------------

DTagDB::DTagDB(const Field& scalar, std::string path) : f_(&scalar), path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() % record_size() != 0) throw DecodeError("dtag log: truncated record");
  Reader r(data);
  while (!r.done()) {
    DTag d;
    d.id = f_->decode(r);
    d.tag = f_->decode(r);
    d.r2 = f_->decode(r);
    by_id_.emplace(d.id.to_bytes(), records_.size());
    records_.push_back(d);
  }
}

std::vector<DTag> DTagDB::insert(const DTag& d) {
  Bytes rec;
  for (const Fe* x : {&d.id, &d.tag, &d.r2}) {
    Bytes b = x->to_bytes();
    rec.insert(rec.end(), b.begin(), b.end());
  }
  std::lock_guard lock(mu_);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
    out.flush();
    if (!out) throw std::runtime_error("dtag log: write failed");
  }
  Bytes key = d.id.to_bytes();
  std::vector<DTag> earlier;
  auto [lo, hi] = by_id_.equal_range(key);
  for (auto it = lo; it != hi; ++it) earlier.push_back(records_[it->second]);
  by_id_.emplace(std::move(key), records_.size());
  records_.push_back(d);
  return earlier;
}

std::vector<DTag> DTagDB::snapshot() const {
  std::lock_guard lock(mu_);
  return records_;
}

size_t DTagDB::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

namespace {

Generators culprit_gens(const Curve& c) { return Generators{&c, {c.G}, c.H}; }

Transcript culprit_transcript(const Point& pk) {
  Transcript t("boomerang/culprit");
  t.absorb("pk", pk);
  return t;
}

}  // namespace

DetectReport detect_double_spend(std::span<const DTag> records, const Curve& curve, RandomSource& rng) {
  std::map<Bytes, std::vector<size_t>> groups;
  for (size_t i = 0; i < records.size(); ++i) groups[records[i].id.to_bytes()].push_back(i);
  DetectReport report;
  std::set<Bytes> seen;
  for (const auto& [id, idx] : groups) {
    for (size_t a = 0; a < idx.size(); ++a) {
      for (size_t b = a + 1; b < idx.size(); ++b) {
        const DTag& d1 = records[idx[a]];
        const DTag& d2 = records[idx[b]];
        if (d1.r2 == d2.r2) {
          ++report.skipped_equal_r2;
          std::clog << "detect: skipping ID " << to_hex(id) << " with repeated r2\n";
          continue;
        }
        Fe sk = (d1.tag - d2.tag) * (d1.r2 - d2.r2).inv();
        Point pk = curve.mul(sk, curve.G);
        if (!seen.insert(pk.encode()).second) continue;
        Transcript t = culprit_transcript(pk);
        OpenProof proof = prove_open(Opening{{sk}, curve.scalar().zero()}, Commitment{pk}, culprit_gens(curve), t, rng);
        report.culprits.push_back(Culprit{pk, sk, std::move(proof)});
      }
    }
  }
  return report;
}

bool verify_culprit(const Culprit& c, const Curve& curve) {
  if (c.proof.s.size() != 1) return false;
  Transcript t = culprit_transcript(c.pk);
  return verify_open(c.proof, Commitment{c.pk}, culprit_gens(curve), t);
}

// ---------------------------------------------------------------------------

IssuerState::IssuerState(ParamsPtr params, RandomSource& rng, std::vector<Fe> policy, std::string dtag_path)
    : IssuerState(params, acl_keygen(params->acl, rng), std::move(policy), std::move(dtag_path)) {}

IssuerState::IssuerState(ParamsPtr params, SignerKeys keys, std::vector<Fe> policy, std::string dtag_path)
    : params_(std::move(params)), keys_(std::move(keys)), policy_(std::move(policy)),
      db_(params_->scalar(), std::move(dtag_path)) {
  const AtsParams& P = *params_;
  if (policy_.empty()) policy_.assign(P.catalogue, P.scalar().one());
  if (policy_.size() != P.catalogue) throw std::invalid_argument("issuer: policy length differs from catalogue");
  public_ = IssuerPublic{keys_.pk, commit_policy(policy_, P.reward_gens)};
}

void IssuerState::register_user(const Point& pk) {
  std::lock_guard lock(mu_);
  if (!users_.emplace(pk.encode(), std::set<uint32_t>{}).second) {
    throw AtsError(AtsCode::Registration, "pk_U already registered");
  }
}

bool IssuerState::registered(const Point& pk) const {
  std::lock_guard lock(mu_);
  return users_.count(pk.encode()) != 0;
}

void IssuerState::reserve_issuance(const Point& pk, uint32_t j) {
  std::lock_guard lock(mu_);
  std::set<uint32_t>& issued = users_[pk.encode()];
  if (issued.count(j)) throw AtsError(AtsCode::Registration, "token already issued for this pk_U");
  if (!token_cap_check(issued.size() + 1, token_cap)) throw AtsError(AtsCode::TokenCap, "token cap reached");
  issued.insert(j);
}

void IssuerState::publish_root(const Point& root) {
  std::lock_guard lock(mu_);
  roots_.insert(root.encode());
}

bool IssuerState::known_root(const Point& root) const {
  std::lock_guard lock(mu_);
  return roots_.count(root.encode()) != 0;
}

Bytes IssuerState::registry_snapshot() const {
  std::lock_guard lock(mu_);
  Writer w;
  w.u32(static_cast<uint32_t>(users_.size()));
  for (const auto& [pk, slots] : users_) {
    w.var16(pk);
    w.u32(static_cast<uint32_t>(slots.size()));
    for (uint32_t j : slots) w.u32(j);
  }
  w.u32(static_cast<uint32_t>(roots_.size()));
  for (const Bytes& r : roots_) w.var16(r);
  return std::move(w).bytes();
}

void IssuerState::restore_registry(ByteView bytes) {
  const Curve& c = params_->curve();
  Reader r(bytes);
  std::map<Bytes, std::set<uint32_t>> users;
  std::set<Bytes> roots;
  for (uint32_t n = r.u32(); n > 0; --n) {
    Bytes pk = r.var16();
    c.decode(pk);
    auto& slots = users[pk];
    for (uint32_t k = r.u32(); k > 0; --k) slots.insert(r.u32());
  }
  for (uint32_t n = r.u32(); n > 0; --n) {
    Bytes root = r.var16();
    c.decode(root);
    roots.insert(std::move(root));
  }
  r.expect_done();
  std::lock_guard lock(mu_);
  users_ = std::move(users);
  roots_ = std::move(roots);
}

size_t IssuerState::known_root_count() const {
  std::lock_guard lock(mu_);
  return roots_.size();
}

void IssuerState::record_spend(SpendRecord r) {
  std::lock_guard lock(mu_);
  spends_.push_back(std::move(r));
}

std::vector<SpendRecord> IssuerState::spends() const {
  std::lock_guard lock(mu_);
  return spends_;
}

std::vector<DTag> IssuerState::flagged() const {
  std::lock_guard lock(mu_);
  return flagged_;
}

// ---------------------------------------------------------------------------
// Messages.

Bytes IssueRequest::encode() const {
  Writer w;
  write_point(w, pk);
  w.u32(j);
  write_point(w, C.point);
  w.raw(proof.encode());
  return std::move(w).bytes();
}

IssueRequest IssueRequest::decode(const AtsParams& params, Reader& r) {
  IssueRequest m;
  m.pk = read_point(params.curve(), r);
  m.j = r.u32();
  m.C.point = read_point(params.curve(), r);
  m.proof = IssueProof::decode(params.curve(), r);
  return m;
}

Bytes SignOffer::encode(bool spending) const {
  Writer w;
  write_scalar(w, id2);
  w.raw(R.encode());
  if (spending) {
    write_scalar(w, reward);
    w.u8(reward_proof ? 1 : 0);
    if (reward_proof) w.raw(reward_proof->encode());
  }
  return std::move(w).bytes();
}

SignOffer SignOffer::decode(const AtsParams& params, Reader& r, bool spending) {
  SignOffer m;
  m.id2 = read_scalar(params.curve(), r);
  m.R = SignerCommit::decode(params.curve(), r);
  if (spending) {
    m.reward = read_scalar(params.curve(), r);
    uint8_t flag = r.u8();
    if (flag > 1) throw DecodeError("offer: bad reward flag");
    if (flag) m.reward_proof = RewardProof::decode(params.curve(), r);
  }
  return m;
}

Bytes SignChallenge::encode() const {
  Writer w;
  write_scalar(w, e);
  write_point(w, root);
  return std::move(w).bytes();
}

SignChallenge SignChallenge::decode(const AtsParams& params, Reader& r) {
  SignChallenge m;
  m.e = read_scalar(params.curve(), r);
  m.root = read_point(params.tree.curve_at(params.tree.depth), r);
  return m;
}

Bytes CollectHello::encode() const {
  Writer w;
  write_scalar(w, v);
  return std::move(w).bytes();
}

CollectHello CollectHello::decode(const AtsParams& params, Reader& r) { return {read_scalar(params.curve(), r)}; }

Bytes NonceMessage::encode() const {
  Writer w;
  write_scalar(w, r2);
  return std::move(w).bytes();
}

NonceMessage NonceMessage::decode(const AtsParams& params, Reader& r) { return {read_scalar(params.curve(), r)}; }

Bytes Presentation::encode(bool spending) const {
  Writer w;
  write_scalar(w, id);
  write_scalar(w, tag);
  write_point(w, next.point);
  write_point(w, root);
  w.raw(sig.encode());
  w.raw(show.encode());
  write_point(w, rerandomized);
  w.raw(membership.encode());
  w.raw(prev.encode());
  w.raw(fresh.encode());
  for (const Point* p : {&am_c1, &am_c3, &am_c4}) write_point(w, *p);
  write_scalar(w, rho2);
  write_scalar(w, rho5);
  w.raw(am.encode());
  if (spending) {
    w.u32(j);
    write_scalar(w, v);
    write_point(w, V);
    w.raw(v_open.encode());
    w.raw(range.encode());
  }
  return std::move(w).bytes();
}

Presentation Presentation::decode(const AtsParams& params, Reader& r, bool spending) {
  const Curve& c = params.curve();
  Presentation p;
  p.id = read_scalar(c, r);
  p.tag = read_scalar(c, r);
  p.next.point = read_point(c, r);
  p.root = read_point(params.tree.curve_at(params.tree.depth), r);
  p.sig = BlindSignature::decode(c, r);
  p.show = ShowBundle::decode(c, params.acl.attribute_count(), r);
  p.rerandomized = read_point(c, r);
  p.membership = MembershipProof::decode(params.tree, r);
  p.prev = OpenProof::decode(c, r);
  p.fresh = OpenProof::decode(c, r);
  for (Point* q : {&p.am_c1, &p.am_c3, &p.am_c4}) *q = read_point(c, r);
  p.rho2 = read_scalar(c, r);
  p.rho5 = read_scalar(c, r);
  p.am = AddMulProof::decode(c, r);
  if (spending) {
    p.j = r.u32();
    p.v = read_scalar(c, r);
    p.V = read_point(c, r);
    p.v_open = OpenProof::decode(c, r);
    p.range = RangeProof::decode(c, r);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Shared statement layout of a presentation.

namespace {

enum Attr : size_t { kId = 0, kValue = 1, kSk = 2, kR1 = 3, kSlot = 4 };

struct Layout {
  Generators prev_gens, fresh_gens, v_gens;
  RevealMask mask;
};

Layout layout(const AtsParams& P, const Presentation& p, bool spending) {
  const Generators& g = P.token_gens;
  Layout l;
  l.mask.assign(5, std::nullopt);
  l.mask[kId] = p.id;
  if (spending) {
    l.mask[kSlot] = P.scalar().from_u64(p.j);
    l.prev_gens = sub_gens(g, {1, 2, 3});
    l.fresh_gens = sub_gens(g, {0, 1, 2, 3});
  } else {
    l.prev_gens = sub_gens(g, {1, 2, 3, 4});
    l.fresh_gens = sub_gens(g, {0, 1, 2, 3, 4});
  }
  l.v_gens = Generators{&P.curve(), {P.curve().G}, P.curve().H};
  return l;
}

Commitment prev_target(const AtsParams& P, const Presentation& p, bool spending) {
  const Curve& c = P.curve();
  Point t = p.rerandomized - c.mul(p.id, P.token_gens.g[0]);
  if (spending) t = t - c.mul(P.scalar().from_u64(p.j), P.token_gens.g[4]);
  return {t};
}

Commitment fresh_target(const AtsParams& P, const Presentation& p, bool spending) {
  if (!spending) return p.next;
  return {p.next.point - P.curve().mul(P.scalar().from_u64(p.j), P.token_gens.g[4])};
}

AddMulStatement tag_statement(const AtsParams& P, const Fe& r2, const Presentation& p) {
  const Curve& c = P.curve();
  return AddMulStatement{{p.am_c1},
                         {lin(c, {r2, p.rho2}, {c.G, c.H})},
                         {p.am_c3},
                         {p.am_c4},
                         {lin(c, {p.tag, p.rho5}, {c.G, c.H})}};
}

void absorb_context(Transcript& t, Procedure proc, const Fe& r2, const Presentation& p, bool spending) {
  t.absorb_u64("present/proc", static_cast<uint8_t>(proc));
  t.absorb("present/r2", r2);
  t.absorb("present/id", p.id);
  t.absorb("present/tag", p.tag);
  t.absorb("present/next", p.next.point);
  t.absorb("present/root", p.root);
  if (spending) {
    t.absorb_u64("present/j", p.j);
    t.absorb("present/v", p.v);
  }
}

Point issuer_part(const AtsParams& P, const Fe& id2, const Fe& v) {
  return lin(P.curve(), {id2, v}, {P.token_gens.g[0], P.token_gens.g[1]});
}

Transcript issue_transcript() { return Transcript("boomerang/issue"); }
Transcript present_transcript() { return Transcript("boomerang/present"); }
Transcript reward_transcript() { return Transcript("boomerang/reward"); }

}  // namespace


AtsCode verify_presentation(const IssuerState& issuer, Procedure proc, const Fe& r2, const Presentation& p) {
  const AtsParams& P = issuer.params();
  const Curve& c = P.curve();
  const Field& f = P.scalar();
  const bool spending = proc != Procedure::Collection;
  const AclPublicKey& pk = issuer.public_info().pk;

  if (!acl_verify(P.acl, pk, p.sig, p.id)) return AtsCode::Signature;
  if (!issuer.known_root(p.root)) return AtsCode::UnknownRoot;
  if (spending && (p.j >= P.tokens || !P.in_value_space(p.v))) return AtsCode::ValueRange;

  Transcript t = present_transcript();
  absorb_context(t, proc, r2, p, spending);
  if (!verify_membership(p.root, p.rerandomized, p.membership, P.tree, t)) return AtsCode::Membership;
  Layout l = layout(P, p, spending);
  auto show = acl_show_statement(P.acl, pk, p.sig, l.mask, p.show, t);
  if (!show) return AtsCode::ShowProof;
  if (spending && !verify_range(p.range, p.V, P.sub, P.range_gens, t)) return AtsCode::SubProof;

  Commitment prev_C = prev_target(P, p, spending);
  Commitment fresh_C = fresh_target(P, p, spending);
  AddMulStatement am = tag_statement(P, r2, p);
  absorb_open(t, show->target, show->bases, p.show.open.t1);
  absorb_open(t, prev_C, l.prev_gens, p.prev.t1);
  absorb_open(t, fresh_C, l.fresh_gens, p.fresh.t1);
  absorb_add_mul(t, am, p.am);
  if (spending) absorb_open(t, {p.V}, l.v_gens, p.v_open.t1);
  Fe ch = t.challenge_scalar("present/c", f);

  const OpenProof& so = p.show.open;
  if (so.c != ch || so.s.size() != show->bases.size() || !check_open(so, show->target, show->bases)) {
    return AtsCode::ShowProof;
  }
  if (p.prev.c != ch || p.prev.s.size() != l.prev_gens.size() || !check_open(p.prev, prev_C, l.prev_gens)) {
    return AtsCode::Linking;
  }
  if (p.fresh.c != ch || p.fresh.s.size() != l.fresh_gens.size() || !check_open(p.fresh, fresh_C, l.fresh_gens)) {
    return AtsCode::Linking;
  }
  if (p.am.c != ch || !check_add_mul(p.am, am)) return AtsCode::Linking;

  auto slot = [&](size_t attr) { return so.s[*show_slot(l.mask, attr)]; };
  const Fe s_v = slot(kValue), s_sk = slot(kSk), s_r1 = slot(kR1);
  bool linked = p.prev.s[0] == s_v && p.prev.s[1] == s_sk && p.prev.s[2] == s_r1 && p.fresh.s[1] == s_v &&
                p.fresh.s[2] == s_sk && p.am.s1 == s_sk && p.am.s5 == s_r1;
  if (!spending) {
    const Fe s_j = slot(kSlot);
    linked = linked && p.prev.s[3] == s_j && p.fresh.s[4] == s_j;
  }
  if (!linked) return AtsCode::Linking;
  if (spending) {
    if (p.v_open.c != ch || p.v_open.s.size() != 1 || !check_open(p.v_open, {p.V}, l.v_gens)) {
      return AtsCode::SubProof;
    }
    if (p.v_open.s[0] != s_v - ch * p.v) return AtsCode::SubProof;
  }
  (void)c;
  return AtsCode::Ok;
}

std::vector<Fe> spend_vector(const AtsParams& params, uint32_t j, const Fe& v) {
  std::vector<Fe> out(params.catalogue, params.scalar().zero());
  out.at(j) = v;
  return out;
}

bool verify_reward_claim(const AtsParams& params, const IssuerPublic& issuer, const Fe& reward,
                         const Point& spend_commitment, const RewardProof& proof) {
  Transcript t = reward_transcript();
  return verify_reward(reward, issuer.policy_commitment, spend_commitment, params.catalogue, proof, params.reward,
                       params.reward_gens, params.range_gens, t);
}

// ---------------------------------------------------------------------------
// Client side.

namespace {

void check_step(int& step, int expect) {
  if (step != expect) throw AtsError(AtsCode::UnexpectedMessage, "procedure step out of order");
  ++step;
}

template <class F>
auto acl_guard(F&& f) {
  try {
    return f();
  } catch (const AclAbort& e) {
    throw AtsError(AtsCode::AclAbort, e.what());
  }
}

void check_interaction(const ClientState& cs, uint32_t j) {
  if (j >= cs.state().size()) throw AtsError(AtsCode::Precondition, "token index out of range");
  if (!token_cap_check(cs.state().size(), cs.token_cap)) throw AtsError(AtsCode::TokenCap, "token cap exceeded");
}

}  // namespace

ClientIssuance::ClientIssuance(ClientState& client, uint32_t j, RandomSource& rng)
    : cs_(&client), rng_(&rng), j_(j) {
  check_interaction(client, j);
  if (client.is_signed(j)) throw AtsError(AtsCode::Precondition, "token already signed");
}

Bytes ClientIssuance::m1() {
  check_step(step_, 0);
  const AtsParams& P = cs_->params();
  token_ = cs_->state_[j_];
  token_.v = P.scalar().zero();
  token_.blind = P.scalar().random(*rng_);
  C1_ = token_.commit(P);
  IssueRequest req{cs_->pk_, j_, C1_, {}};
  Transcript t = issue_transcript();
  req.proof = prove_issue(token_.opening(), IssueStatement{C1_, cs_->pk_, P.scalar().from_u64(j_)}, P.token_gens,
                          t, *rng_);
  return req.encode();
}

Bytes ClientIssuance::m3(ByteView m2) {
  check_step(step_, 1);
  const AtsParams& P = cs_->params();
  SignOffer offer = parse<SignOffer>(m2, P, false);
  final_ = token_;
  final_.id = token_.id + offer.id2;
  C_ = C1_ + Commitment{issuer_part(P, offer.id2, P.scalar().zero())};
  if (!(C_ == final_.commit(P))) throw AtsError(AtsCode::Internal, "issuance: joint commitment mismatch");
  Fe e = acl_guard([&] {
    user_.emplace(P.acl, cs_->issuer_.pk, C_, final_.id, *rng_);
    return user_->challenge(offer.R);
  });
  tree_ = cs_->tree_.replace_leaf(j_, C_.point);
  return SignChallenge{e, tree_->root()}.encode();
}

void ClientIssuance::finish(ByteView m4) {
  check_step(step_, 2);
  const AtsParams& P = cs_->params();
  SignerResponse S = parse<SignerResponse>(m4, P.curve());
  auto [sig, open] = acl_guard([&] { return user_->finish(S); });
  cs_->install(j_, final_, C_, SignedToken{sig, open}, std::move(*tree_));
}

ClientPresentation::ClientPresentation(ClientState& client, Procedure proc, uint32_t j, const Fe& v,
                                       RandomSource& rng, SpendOptions opts)
    : cs_(&client), rng_(&rng), proc_(proc), j_(j), v_(v), opts_(opts) {
  if (proc == Procedure::Issuance) throw std::invalid_argument("presentation: not an issuance");
  check_interaction(client, j);
  if (!client.is_signed(j)) throw AtsError(AtsCode::Precondition, "token not signed");
  const AtsParams& P = client.params();
  if (spending()) {
    if (!P.in_value_space(v)) throw AtsError(AtsCode::ValueRange, "spend value outside the value space");
    if (opts.want_reward_proof && proc != Procedure::SpendVerify) proc_ = Procedure::SpendVerify;
    Fe rest = client.balance(j) - v;
    if (rest.value().bit_length() > P.sub.bits && !opts.forge_sub) {
      throw AtsError(AtsCode::Overspend, "spend exceeds balance");
    }
  } else if (!P.in_value_space(v) && !P.in_value_space(-v)) {
    throw AtsError(AtsCode::ValueRange, "collection value outside the value space");
  }
}

Bytes ClientPresentation::m0() const {
  if (spending()) return {};
  return CollectHello{v_}.encode();
}

Bytes ClientPresentation::m2(ByteView m1) {
  check_step(step_, 0);
  const AtsParams& P = cs_->params();
  const Curve& c = P.curve();
  const Field& f = P.scalar();
  const bool sp = spending();
  const Fe r2 = parse<NonceMessage>(m1, P).r2;
  const Token& old = cs_->state_[j_];
  const SignedToken& signed_old = *cs_->sig_[j_];

  Presentation p;
  p.id = old.id;
  p.tag = old.sk * r2 + old.r1;
  next_ = Token{f.random_nonzero(*rng_), old.v, old.sk, f.random_nonzero(*rng_), j_, f.random(*rng_)};
  next_C_ = next_.commit(P);
  p.next = next_C_;
  p.root = cs_->root();
  p.sig = signed_old.sig;
  if (sp) {
    p.j = j_;
    p.v = v_;
  }

  Transcript t = present_transcript();
  absorb_context(t, proc_, r2, p, sp);
  Membership mem = prove_membership(cs_->tree_, j_, t, *rng_);
  p.rerandomized = mem.rerandomized_leaf;
  p.membership = std::move(mem.proof);

  const Fe a_v = f.random_nonzero(*rng_), a_sk = f.random_nonzero(*rng_), a_r1 = f.random_nonzero(*rng_),
           a_j = f.random_nonzero(*rng_);
  Layout l = layout(P, p, sp);
  std::vector<std::optional<Fe>> show_presets = {std::nullopt, a_v, a_sk, a_r1, sp ? std::nullopt : std::optional(a_j)};
  ShowProver show(P.acl, cs_->issuer_.pk, signed_old.sig, signed_old.open, old.opening(), l.mask, t, *rng_,
                  show_presets);

  Fe rest = old.v - v_, gamma = f.random(*rng_);
  if (sp) {
    p.V = lin(c, {rest, gamma}, {c.G, c.H});
    const bool honest = rest.value().bit_length() <= P.sub.bits;
    p.range = prove_range(honest ? rest : f.zero(), gamma, P.sub, P.range_gens, t, *rng_);
  }

  std::vector<Fe> prev_msgs = {old.v, old.sk, old.r1};
  std::vector<std::optional<Fe>> prev_presets = {a_v, a_sk, a_r1};
  std::vector<Fe> fresh_msgs = {next_.id, next_.v, next_.sk, next_.r1};
  std::vector<std::optional<Fe>> fresh_presets = {std::nullopt, a_v, a_sk, std::nullopt};
  if (!sp) {
    prev_msgs.push_back(f.from_u64(j_));
    prev_presets.push_back(a_j);
    fresh_msgs.push_back(f.from_u64(j_));
    fresh_presets.push_back(a_j);
  }
  OpenProver prev(Opening{prev_msgs, old.blind + mem.delta}, l.prev_gens, *rng_, prev_presets);
  OpenProver fresh(Opening{fresh_msgs, next_.blind}, l.fresh_gens, *rng_, fresh_presets);

  AddMulWitness w{old.sk, r2, old.r1, f.random(*rng_), f.random(*rng_), f.random(*rng_), f.random(*rng_)};
  AddMulStatement am_st = add_mul_statement(c, w);
  AddMulProver am(w, am_st, *rng_, a_sk, a_r1);
  p.am_c1 = am_st.C1.point;
  p.am_c3 = am_st.C3.point;
  p.am_c4 = am_st.C4.point;
  p.rho2 = w.r2;
  p.rho5 = w.r3 + w.r4;

  const std::optional<Fe> v_presets[] = {a_v};
  OpenProver v_open(Opening{{rest}, gamma}, l.v_gens, *rng_, v_presets);

  absorb_open(t, show.target(), show.bases(), show.t1());
  absorb_open(t, prev_target(P, p, sp), l.prev_gens, prev.t1());
  absorb_open(t, fresh_target(P, p, sp), l.fresh_gens, fresh.t1());
  absorb_add_mul(t, tag_statement(P, r2, p), am.first_message());
  if (sp) absorb_open(t, {p.V}, l.v_gens, v_open.t1());
  Fe ch = t.challenge_scalar("present/c", f);

  p.show = show.respond(ch);
  p.prev = prev.respond(ch);
  p.fresh = fresh.respond(ch);
  p.am = am.respond(ch);
  if (sp) p.v_open = v_open.respond(ch);
  return p.encode(sp);
}

Bytes ClientPresentation::m4(ByteView m3) {
  check_step(step_, 1);
  const AtsParams& P = cs_->params();
  const bool sp = spending();
  SignOffer offer = parse<SignOffer>(m3, P, sp);
  Point part = issuer_part(P, offer.id2, v_);
  final_ = next_;
  if (sp) {
    final_.id = next_.id - offer.id2;
    final_.v = next_.v - v_;
    C_ = next_C_ - Commitment{part};
    SpendOutcome out;
    out.reward = offer.reward;
    out.spend_commitment = commit_spend(spend_vector(P, j_, v_), P.reward_gens);
    if (proc_ == Procedure::SpendVerify) {
      if (!offer.reward_proof ||
          !verify_reward_claim(P, cs_->issuer_, offer.reward, out.spend_commitment, *offer.reward_proof)) {
        throw AtsError(AtsCode::RewardProof, "reward proof rejected");
      }
      out.proof = offer.reward_proof;
    }
    outcome_ = std::move(out);
  } else {
    final_.id = next_.id + offer.id2;
    final_.v = next_.v + v_;
    C_ = next_C_ + Commitment{part};
  }
  if (!(C_ == final_.commit(P))) throw AtsError(AtsCode::Internal, "joint commitment mismatch");
  Fe e = acl_guard([&] {
    user_.emplace(P.acl, cs_->issuer_.pk, C_, final_.id, *rng_);
    return user_->challenge(offer.R);
  });
  tree_ = cs_->tree_.replace_leaf(j_, C_.point);
  return SignChallenge{e, tree_->root()}.encode();
}

void ClientPresentation::finish(ByteView m5) {
  check_step(step_, 2);
  const AtsParams& P = cs_->params();
  SignerResponse S = parse<SignerResponse>(m5, P.curve());
  auto [sig, open] = acl_guard([&] { return user_->finish(S); });
  cs_->install(j_, final_, C_, SignedToken{sig, open}, std::move(*tree_));
}

// ---------------------------------------------------------------------------
// Issuer side.

Bytes IssuerIssuance::on_m1(ByteView m1) {
  check_step(step_, 0);
  if (!is_->admit(Procedure::Issuance)) throw AtsError(AtsCode::RateLimited, "rate limited");
  const AtsParams& P = is_->params();
  IssueRequest req = parse<IssueRequest>(m1, P);
  if (req.pk.is_identity()) throw AtsError(AtsCode::IssueProof, "identity public key");
  if (req.j >= P.tokens) throw AtsError(AtsCode::Precondition, "token index out of range");
  Transcript t = issue_transcript();
  if (!verify_issue(req.proof, IssueStatement{req.C, req.pk, P.scalar().from_u64(req.j)}, P.token_gens, t)) {
    throw AtsError(AtsCode::IssueProof, "pi_issue rejected");
  }
  is_->reserve_issuance(req.pk, req.j);
  SignOffer offer;
  offer.id2 = P.scalar().random_nonzero(*rng_);
  Commitment C = req.C + Commitment{issuer_part(P, offer.id2, P.scalar().zero())};
  signer_.emplace(P.acl, is_->keys(), C, *rng_);
  offer.R = signer_->commitment();
  return offer.encode(false);
}

Bytes IssuerIssuance::on_m3(ByteView m3) {
  check_step(step_, 1);
  SignChallenge ch = parse<SignChallenge>(m3, is_->params());
  SignerResponse S = acl_guard([&] { return signer_->respond(ch.e); });
  is_->publish_root(ch.root);
  return S.encode();
}

IssuerPresentation::IssuerPresentation(IssuerState& issuer, Procedure proc, RandomSource& rng)
    : is_(&issuer), rng_(&rng), proc_(proc) {
  if (proc == Procedure::Issuance) throw std::invalid_argument("presentation: not an issuance");
}

Bytes IssuerPresentation::on_m0(ByteView m0) {
  check_step(step_, 0);
  if (!is_->admit(proc_)) throw AtsError(AtsCode::RateLimited, "rate limited");
  const AtsParams& P = is_->params();
  if (spending()) {
    if (!m0.empty()) throw AtsError(AtsCode::Malformed, "spending hello carries no payload");
  } else {
    v_ = parse<CollectHello>(m0, P).v;
    if (!P.in_value_space(v_) && !P.in_value_space(-v_)) {
      throw AtsError(AtsCode::ValueRange, "collection value outside the value space");
    }
  }
  r2_ = P.scalar().random_nonzero(*rng_);
  return NonceMessage{r2_}.encode();
}

Bytes IssuerPresentation::on_m2(ByteView m2) {
  check_step(step_, 1);
  const AtsParams& P = is_->params();
  const bool sp = spending();
  Presentation p = parse<Presentation>(m2, P, sp);
  AtsCode code = verify_presentation(*is_, proc_, r2_, p);
  if (code != AtsCode::Ok) throw AtsError(code, std::string("presentation rejected: ") + std::string(code_name(code)));
  std::vector<DTag> earlier = is_->db().insert(DTag{p.tag, p.id, r2_});
  if (!earlier.empty()) {
    {
      std::lock_guard lock(is_->mu_);
      is_->flagged_.push_back(DTag{p.tag, p.id, r2_});
    }
    throw AtsError(AtsCode::DoubleSpend, "token ID seen before");
  }
  SignOffer offer;
  offer.id2 = P.scalar().random_nonzero(*rng_);
  if (sp) v_ = p.v;
  Commitment part{issuer_part(P, offer.id2, v_)};
  Commitment C = sp ? p.next - part : p.next + part;
  if (sp) {
    SpendRecord rec{spend_vector(P, p.j, p.v), is_->policy(), P.scalar().zero()};
    for (size_t i = 0; i < rec.spSt.size(); ++i) rec.rwrdSt += rec.spSt[i] * rec.plcySt[i];
    offer.reward = rec.rwrdSt;
    if (proc_ == Procedure::SpendVerify) {
      Transcript t = reward_transcript();
      try {
        offer.reward_proof =
            prove_reward(rec.spSt, rec.plcySt, P.reward, P.reward_gens, P.range_gens, t, *rng_).proof;
      } catch (const RangeError& e) {
        throw AtsError(AtsCode::RewardProof, e.what());
      }
    }
    record_ = std::move(rec);
  }
  signer_.emplace(P.acl, is_->keys(), C, *rng_);
  offer.R = signer_->commitment();
  return offer.encode(sp);
}

Bytes IssuerPresentation::on_m4(ByteView m4) {
  check_step(step_, 2);
  SignChallenge ch = parse<SignChallenge>(m4, is_->params());
  SignerResponse S = acl_guard([&] { return signer_->respond(ch.e); });
  is_->publish_root(ch.root);
  if (record_) is_->record_spend(*record_);
  return S.encode();
}

// ---------------------------------------------------------------------------

Traffic issuance(ClientState& client, IssuerState& issuer, uint32_t j, RandomSource& rng) {
  ClientIssuance c(client, j, rng);
  IssuerIssuance s(issuer, rng);
  Traffic tr;
  Bytes m1 = c.m1();
  Bytes m2 = s.on_m1(m1);
  Bytes m3 = c.m3(m2);
  Bytes m4 = s.on_m3(m3);
  c.finish(m4);
  tr.up = m1.size() + m3.size();
  tr.down = m2.size() + m4.size();
  return tr;
}

namespace {

Traffic present(ClientPresentation& c, IssuerPresentation& s) {
  Traffic tr;
  Bytes m0 = c.m0();
  Bytes m1 = s.on_m0(m0);
  Bytes m2 = c.m2(m1);
  Bytes m3 = s.on_m2(m2);
  Bytes m4 = c.m4(m3);
  Bytes m5 = s.on_m4(m4);
  c.finish(m5);
  tr.up = m0.size() + m2.size() + m4.size();
  tr.down = m1.size() + m3.size() + m5.size();
  return tr;
}

}  // namespace

Traffic collection(ClientState& client, IssuerState& issuer, uint32_t j, const Fe& v, RandomSource& rng) {
  ClientPresentation c(client, Procedure::Collection, j, v, rng);
  IssuerPresentation s(issuer, Procedure::Collection, rng);
  return present(c, s);
}

SpendResult spend(ClientState& client, IssuerState& issuer, uint32_t j, const Fe& v, RandomSource& rng,
                  SpendOptions opts) {
  const Procedure proc = opts.want_reward_proof ? Procedure::SpendVerify : Procedure::Spending;
  ClientPresentation c(client, proc, j, v, rng, opts);
  IssuerPresentation s(issuer, proc, rng);
  SpendResult out;
  out.traffic = present(c, s);
  out.outcome = *c.outcome();
  out.record = *s.record();
  return out;
}

}  // namespace boomerang
