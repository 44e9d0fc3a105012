#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "boomerang/acl.hpp"
#include "boomerang/bulletproofs.hpp"
#include "boomerang/curve_tree.hpp"
#include "boomerang/cycle.hpp"
#include "boomerang/sigma.hpp"

namespace boomerang {

enum class Procedure : uint8_t { Issuance = 0x01, Collection = 0x02, Spending = 0x03, SpendVerify = 0x04 };

std::string_view procedure_name(Procedure p);

enum class AtsCode : uint8_t {
  Ok = 0,
  Malformed,
  BadVersion,
  Oversize,
  UnknownProcedure,
  UnexpectedMessage,
  UnknownSession,
  Precondition,
  Overspend,
  IssueProof,
  Registration,
  TokenCap,
  RateLimited,
  Signature,
  UnknownRoot,
  Membership,
  ShowProof,
  Linking,
  ValueRange,
  SubProof,
  DoubleSpend,
  AclAbort,
  RewardProof,
  Internal,
};

std::string_view code_name(AtsCode code);

class AtsError : public std::runtime_error {
 public:
  AtsError(AtsCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  AtsCode code() const { return code_; }

 private:
  AtsCode code_;
};

// ---------------------------------------------------------------------------
// Public parameters shared by every party.

struct AtsParams {
  Cycle cycle;
  size_t tokens = 1;     // n, length of state
  size_t catalogue = 1;  // length of spSt and plcySt
  Generators token_gens;  // G_1..G_5 for (ID, v, sk, r1, j), blinding H; on E1
  AclParams acl;
  CurveTreeParams tree;
  RangeParams sub;     // pi_sub width l; values live in [0, 2^(l-1)]
  RangeParams reward;  // reward bound
  IpaGens range_gens;
  IpaGens reward_gens;

  // D = 2, branching = ceil(sqrt(n)). A zero catalogue means one slot per token.
  static std::shared_ptr<const AtsParams> make(Cycle cycle, size_t tokens, size_t catalogue = 0);

  const Curve& curve() const { return cycle->E1(); }
  const Field& scalar() const { return cycle->E1().scalar(); }
  // v in [0, 2^(l-1)].
  bool in_value_space(const Fe& v) const;
};

using ParamsPtr = std::shared_ptr<const AtsParams>;

// Integer reading of a scalar: small values and negatives of small values.
std::optional<int64_t> scalar_to_int(const Fe& x);

inline constexpr size_t kDefaultTokenCap = 100;

// Accepts iff the held token count is within the cap (cap 0 rejects everything).
bool token_cap_check(size_t held, size_t cap);

// ---------------------------------------------------------------------------

struct Token {
  Fe id, v, sk, r1;
  uint32_t j = 0;
  Fe blind;  // commitment randomness

  std::vector<Fe> attributes() const;
  Opening opening() const { return {attributes(), blind}; }
  Commitment commit(const AtsParams& params) const;
};

struct SignedToken {
  BlindSignature sig;
  SignatureOpening open;
};

struct IssuerPublic {
  AclPublicKey pk;
  Point policy_commitment;

  Bytes encode() const;
  static IssuerPublic decode(const AtsParams& params, Reader& r);
};

class ClientState {
 public:
  // n = params->tokens zero-balance unsigned tokens with fresh ID' and r1.
  static ClientState setup(ParamsPtr params, const IssuerPublic& issuer, RandomSource& rng);

  const AtsParams& params() const { return *params_; }
  const ParamsPtr& params_ptr() const { return params_; }
  const IssuerPublic& issuer() const { return issuer_; }
  const Fe& sk() const { return sk_; }
  const Point& pk() const { return pk_; }
  const std::vector<Token>& state() const { return state_; }
  const std::vector<std::optional<Commitment>>& comm_state() const { return comm_; }
  const std::vector<std::optional<SignedToken>>& sig_state() const { return sig_; }
  const CurveTree& tree() const { return tree_; }
  const Point& root() const { return tree_.root(); }

  bool is_signed(uint32_t j) const { return j < sig_.size() && sig_[j].has_value(); }
  const Fe& balance(uint32_t j) const { return state_.at(j).v; }

  size_t token_cap = kDefaultTokenCap;

  // Tree over comm_state from scratch, identity for unsigned slots.
  CurveTree rebuild_tree() const;

  // Version byte, keys, tree key, then the token, commitment and signature vectors.
  Bytes snapshot() const;
  static ClientState restore(ParamsPtr params, ByteView bytes);
  // Adopts a republished policy commitment; the signing key must not change.
  void update_issuer(const IssuerPublic& issuer);

 private:
  friend class ClientIssuance;
  friend class ClientPresentation;

  std::vector<Point> leaves() const;
  void install(uint32_t j, const Token& token, const Commitment& C, const SignedToken& sig, CurveTree tree);

  ParamsPtr params_;
  IssuerPublic issuer_;
  Fe sk_;
  Point pk_;
  Bytes tree_key_;
  std::vector<Token> state_;
  std::vector<std::optional<Commitment>> comm_;
  std::vector<std::optional<SignedToken>> sig_;
  CurveTree tree_;
};

// ---------------------------------------------------------------------------
// Double-spending tags.

struct DTag {
  Fe tag, id, r2;
};

// Append-only log of fixed-width ID || tag || r2 records. Writers are serialized.
class DTagDB {
 public:
  explicit DTagDB(const Field& scalar, std::string path = {});

  // Stores the record and returns earlier records with the same ID.
  std::vector<DTag> insert(const DTag& d);
  std::vector<DTag> snapshot() const;
  size_t size() const;
  size_t record_size() const { return 3 * f_->byte_len(); }
  const std::string& path() const { return path_; }

 private:
  const Field* f_;
  std::string path_;
  mutable std::mutex mu_;
  std::vector<DTag> records_;
  std::multimap<Bytes, size_t> by_id_;
};

struct Culprit {
  Point pk;
  Fe sk;
  OpenProof proof;  // opening of pk over (G; H) with zero blinding
};

struct DetectReport {
  std::vector<Culprit> culprits;
  size_t skipped_equal_r2 = 0;
};

DetectReport detect_double_spend(std::span<const DTag> records, const Curve& curve, RandomSource& rng);
bool verify_culprit(const Culprit& c, const Curve& curve);

// ---------------------------------------------------------------------------

struct SpendRecord {
  std::vector<Fe> spSt, plcySt;
  Fe rwrdSt;
};

class IssuerState {
 public:
  // An empty policy is all ones. dtag_path empty keeps the log in memory.
  IssuerState(ParamsPtr params, RandomSource& rng, std::vector<Fe> policy = {}, std::string dtag_path = {});
  IssuerState(ParamsPtr params, SignerKeys keys, std::vector<Fe> policy, std::string dtag_path);

  const AtsParams& params() const { return *params_; }
  const ParamsPtr& params_ptr() const { return params_; }
  const SignerKeys& keys() const { return keys_; }
  const IssuerPublic& public_info() const { return public_; }
  const std::vector<Fe>& policy() const { return policy_; }
  DTagDB& db() { return db_; }
  const DTagDB& db() const { return db_; }

  // Throws AtsError(Registration) when pk was seen before.
  void register_user(const Point& pk);
  bool registered(const Point& pk) const;
  // Marks (pk, j) issued; registers pk on first use.
  void reserve_issuance(const Point& pk, uint32_t j);

  void publish_root(const Point& root);
  bool known_root(const Point& root) const;
  size_t known_root_count() const;

  void record_spend(SpendRecord r);
  std::vector<SpendRecord> spends() const;
  std::vector<DTag> flagged() const;
  // Registered keys with their issued slots, then the known roots.
  Bytes registry_snapshot() const;
  void restore_registry(ByteView bytes);

  size_t token_cap = kDefaultTokenCap;
  // Called once per procedure before any work. The default admits everything.
  std::function<bool(Procedure)> rate_limit;

  bool admit(Procedure p) const { return !rate_limit || rate_limit(p); }

 private:
  friend class IssuerPresentation;

  ParamsPtr params_;
  SignerKeys keys_;
  std::vector<Fe> policy_;
  IssuerPublic public_;
  DTagDB db_;
  mutable std::mutex mu_;
  std::map<Bytes, std::set<uint32_t>> users_;
  std::set<Bytes> roots_;
  std::vector<SpendRecord> spends_;
  std::vector<DTag> flagged_;
};

// ---------------------------------------------------------------------------
// Messages. Index k is message M_k of its procedure; M0 opens collection and spending.

struct IssueRequest {  // issuance M1
  Point pk;
  uint32_t j = 0;
  Commitment C;  // C'_j
  IssueProof proof;

  Bytes encode() const;
  static IssueRequest decode(const AtsParams& params, Reader& r);
};

struct SignOffer {  // issuance M2, collection and spending M3
  Fe id2;  // ID''
  SignerCommit R;
  // Spending only.
  Fe reward;
  std::optional<RewardProof> reward_proof;

  Bytes encode(bool spending) const;
  static SignOffer decode(const AtsParams& params, Reader& r, bool spending);
};

struct SignChallenge {  // e together with the root of the updated tree
  Fe e;
  Point root;

  Bytes encode() const;
  static SignChallenge decode(const AtsParams& params, Reader& r);
};

struct CollectHello {  // collection M0
  Fe v;

  Bytes encode() const;
  static CollectHello decode(const AtsParams& params, Reader& r);
};

struct NonceMessage {  // collection and spending M1
  Fe r2;

  Bytes encode() const;
  static NonceMessage decode(const AtsParams& params, Reader& r);
};

// Collection and spending M2: the old token shown, its tag and the next commitment.
struct Presentation {
  Fe id, tag;
  Commitment next;  // C'
  Point root;
  BlindSignature sig;
  ShowBundle show;
  Point rerandomized;  // member leaf + delta*H
  MembershipProof membership;
  OpenProof prev;  // rerandomized - ID*G_1 (- j*G_5)
  OpenProof fresh;  // next (- j*G_5)
  Point am_c1, am_c3, am_c4;
  Fe rho2, rho5;
  AddMulProof am;
  // Spending only.
  uint32_t j = 0;
  Fe v;
  Point V;  // (w - v)*G + gamma*H
  OpenProof v_open;
  RangeProof range;

  Bytes encode(bool spending) const;
  static Presentation decode(const AtsParams& params, Reader& r, bool spending);
};

// ---------------------------------------------------------------------------
// Client procedures. Each holds its pending state until the last message.

class ClientIssuance {
 public:
  ClientIssuance(ClientState& client, uint32_t j, RandomSource& rng);
  Bytes m1();
  Bytes m3(ByteView m2);
  void finish(ByteView m4);

 private:
  ClientState* cs_;
  RandomSource* rng_;
  uint32_t j_;
  Token token_;
  Commitment C1_;
  std::optional<UserSession> user_;
  Token final_;
  Commitment C_;
  std::optional<CurveTree> tree_;
  int step_ = 0;
};

struct SpendOptions {
  bool want_reward_proof = false;
  // Adversarial harness: present a range proof for 0 when w - v is out of range.
  bool forge_sub = false;
};

struct SpendOutcome {
  Fe reward;
  std::optional<RewardProof> proof;
  Point spend_commitment;
};

// Collection (verify = false, spending = false) and spending.
class ClientPresentation {
 public:
  ClientPresentation(ClientState& client, Procedure proc, uint32_t j, const Fe& v, RandomSource& rng,
                     SpendOptions opts = {});
  Bytes m0() const;
  Bytes m2(ByteView m1);
  Bytes m4(ByteView m3);
  void finish(ByteView m5);

  const std::optional<SpendOutcome>& outcome() const { return outcome_; }

 private:
  bool spending() const { return proc_ != Procedure::Collection; }

  ClientState* cs_;
  RandomSource* rng_;
  Procedure proc_;
  uint32_t j_;
  Fe v_;
  SpendOptions opts_;
  Token next_;
  Commitment next_C_;
  std::optional<UserSession> user_;
  Token final_;
  Commitment C_;
  std::optional<CurveTree> tree_;
  std::optional<SpendOutcome> outcome_;
  int step_ = 0;
};

// ---------------------------------------------------------------------------
// Issuer sessions. Every handler throws AtsError on rejection.

class IssuerIssuance {
 public:
  IssuerIssuance(IssuerState& issuer, RandomSource& rng) : is_(&issuer), rng_(&rng) {}
  Bytes on_m1(ByteView m1);
  Bytes on_m3(ByteView m3);
  bool done() const { return step_ == 2; }

 private:
  IssuerState* is_;
  RandomSource* rng_;
  std::optional<SignerSession> signer_;
  int step_ = 0;
};

class IssuerPresentation {
 public:
  IssuerPresentation(IssuerState& issuer, Procedure proc, RandomSource& rng);
  Bytes on_m0(ByteView m0);
  Bytes on_m2(ByteView m2);
  Bytes on_m4(ByteView m4);
  bool done() const { return step_ == 3; }
  const std::optional<SpendRecord>& record() const { return record_; }

 private:
  bool spending() const { return proc_ != Procedure::Collection; }

  IssuerState* is_;
  RandomSource* rng_;
  Procedure proc_;
  Fe v_;
  Fe r2_;
  std::optional<SignerSession> signer_;
  std::optional<SpendRecord> record_;
  int step_ = 0;
};

// Presentation checks against the issuer's view; returns the first failing check.
AtsCode verify_presentation(const IssuerState& issuer, Procedure proc, const Fe& r2, const Presentation& p);

// ---------------------------------------------------------------------------
// In-process drivers over serialized messages.

struct Traffic {
  size_t up = 0, down = 0;
};

Traffic issuance(ClientState& client, IssuerState& issuer, uint32_t j, RandomSource& rng);
Traffic collection(ClientState& client, IssuerState& issuer, uint32_t j, const Fe& v, RandomSource& rng);

struct SpendResult {
  Traffic traffic;
  SpendOutcome outcome;
  SpendRecord record;
};

SpendResult spend(ClientState& client, IssuerState& issuer, uint32_t j, const Fe& v, RandomSource& rng,
                  SpendOptions opts = {});

// Public re-verification of a reward claim, as a third party would.
bool verify_reward_claim(const AtsParams& params, const IssuerPublic& issuer, const Fe& reward,
                         const Point& spend_commitment, const RewardProof& proof);
std::vector<Fe> spend_vector(const AtsParams& params, uint32_t j, const Fe& v);

}  // namespace boomerang
