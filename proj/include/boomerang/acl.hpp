#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "boomerang/pedersen.hpp"
#include "boomerang/sigma.hpp"

namespace boomerang {

// Attribute generators h_1..h_n with h_0 = their blinding generator, plus the
// auxiliary point h of the signer's OR branch.
struct AclParams {
  const Curve* curve = nullptr;
  Generators attrs;
  Point h;

  static AclParams make(const Generators& attrs);
  size_t attribute_count() const { return attrs.size(); }
};

struct AclPublicKey {
  Point y, z;
};

struct SignerKeys {
  Fe x;
  AclPublicKey pk;
};

class AclAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// z = hash-to-point(G, y, h).
Point acl_tag_key(const AclParams& params, const Point& y);
SignerKeys acl_keygen(const AclParams& params, RandomSource& rng);

struct Registration {
  Commitment C;
  Opening opening;
  OpenProof proof;
};

Registration acl_reg_user(const AclParams& params, std::vector<Fe> attributes, Transcript& t, RandomSource& rng);
bool acl_reg_signer(const AclParams& params, const Commitment& C, const OpenProof& proof, Transcript& t);

// ---------------------------------------------------------------------------

struct SignerCommit {  // R
  Fe rand;
  Point a, a1, a2;

  Bytes encode() const;
  static SignerCommit decode(const Curve& curve, Reader& r);
};

struct SignerResponse {  // S
  Fe ch, c, r, r1, r2;

  Bytes encode() const;
  static SignerResponse decode(const Curve& curve, Reader& r);
};

struct BlindSignature {
  Point zeta1, zeta;
  Fe rho, omega, rho1, rho2, nu, omega1;

  Bytes encode() const;
  static BlindSignature decode(const Curve& curve, Reader& r);
  friend bool operator==(const BlindSignature&, const BlindSignature&) = default;
};

struct SignatureOpening {
  Fe gamma, rand;
};

class SignerSession {
 public:
  SignerSession(const AclParams& params, const SignerKeys& keys, const Commitment& C, RandomSource& rng);
  const SignerCommit& commitment() const { return R_; }
  // Answers exactly once.
  SignerResponse respond(const Fe& e);

 private:
  const AclParams* params_;
  Fe x_, u_, r1_, r2_, c_;
  SignerCommit R_;
  bool answered_ = false;
};

class UserSession {
 public:
  UserSession(const AclParams& params, const AclPublicKey& pk, const Commitment& C, const Fe& m, RandomSource& rng);
  // Aborts on rand == 0 or identity points in R.
  Fe challenge(const SignerCommit& R);
  // Aborts unless the hash identity holds.
  std::pair<BlindSignature, SignatureOpening> finish(const SignerResponse& S) const;

 private:
  const AclParams* params_;
  AclPublicKey pk_;
  Commitment C_;
  Fe m_;
  RandomSource* rng_;
  Fe gamma_, tau_, t_[5], rand_;
  Point zeta_, zeta1_, zeta2_;
  bool challenged_ = false;
};

bool acl_verify(const AclParams& params, const AclPublicKey& pk, const BlindSignature& sig, const Fe& m);

// ---------------------------------------------------------------------------
// Showing: revealed[i] holds attribute i's value or nothing for a hidden one.

using RevealMask = std::vector<std::optional<Fe>>;

struct ShowBundle {
  Point Gamma;
  std::vector<Point> h_prime;  // gamma*h_0 .. gamma*h_n
  DlogEqProof eq;
  OpenProof open;  // over (h'_0, hidden h'_i...; Gamma)

  Bytes encode() const;
  static ShowBundle decode(const Curve& curve, size_t attributes, Reader& r);
};

class ShowProver {
 public:
  // attr_presets[i] fixes the nonce of attribute i when it is hidden.
  ShowProver(const AclParams& params, const AclPublicKey& pk, const BlindSignature& sig,
             const SignatureOpening& sopen, const Opening& attrs, const RevealMask& revealed, Transcript& t,
             RandomSource& rng, std::span<const std::optional<Fe>> attr_presets = {});
  const Point& t1() const { return prover_->t1(); }
  const Point& Gamma() const { return bundle_.Gamma; }
  // Statement of the open proof, for absorbing into a composite transcript.
  const Commitment& target() const { return target_; }
  const Generators& bases() const { return bases_; }
  ShowBundle respond(const Fe& c) const;

 private:
  ShowBundle bundle_;
  Commitment target_;
  Generators bases_;
  std::optional<OpenProver> prover_;
};

struct ShowStatement {
  Commitment target;
  Generators bases;
};

// Checks pi_eq against t and derives the open-proof statement; nullopt on failure.
std::optional<ShowStatement> acl_show_statement(const AclParams& params, const AclPublicKey& pk,
                                                const BlindSignature& sig, const RevealMask& revealed,
                                                const ShowBundle& bundle, Transcript& t);

ShowBundle acl_show(const AclParams& params, const AclPublicKey& pk, const BlindSignature& sig,
                    const SignatureOpening& sopen, const Opening& attrs, const RevealMask& revealed, Transcript& t,
                    RandomSource& rng);
bool acl_show_verify(const AclParams& params, const AclPublicKey& pk, const BlindSignature& sig,
                     const RevealMask& revealed, const ShowBundle& bundle, Transcript& t);

// Position of attribute i among the hidden messages of the open proof (slot 0 is h'_0).
std::optional<size_t> show_slot(const RevealMask& revealed, size_t attribute);

}  // namespace boomerang
