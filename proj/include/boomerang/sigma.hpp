#pragma once

#include <optional>
#include <span>
#include <vector>

#include "boomerang/pedersen.hpp"
#include "boomerang/random.hpp"
#include "boomerang/transcript.hpp"

namespace boomerang {

// Responses take the form s = c*w + alpha throughout. A prover built with a
// preset nonce for some witness yields the same response as any other prover
// sharing that nonce, which is how proofs are linked under one challenge.
using NoncePresets = std::span<const std::optional<Fe>>;

inline constexpr size_t kMaxProofVector = 1024;

// ---------------------------------------------------------------------------
// Knowledge of an opening: c*C + t1 == s_x*H + sum s_k*G_k.

struct OpenProof {
  Point t1;
  Fe c;
  std::vector<Fe> s;
  Fe s_x;

  Bytes encode() const;
  static OpenProof decode(const Curve& curve, Reader& r);
};

class OpenProver {
 public:
  // presets[k] fixes the nonce of message k; presets[n] the nonce of r.
  OpenProver(Opening witness, const Generators& gens, RandomSource& rng, NoncePresets presets = {});
  const Point& t1() const { return t1_; }
  const Fe& nonce(size_t k) const { return alpha_[k]; }
  OpenProof respond(const Fe& c) const;

 private:
  Opening w_;
  std::vector<Fe> alpha_;  // messages then r
  Point t1_;
};

bool check_open(const OpenProof& proof, const Commitment& C, const Generators& gens);
void absorb_open(Transcript& t, const Commitment& C, const Generators& gens, const Point& t1);
OpenProof prove_open(const Opening& opening, const Commitment& C, const Generators& gens, Transcript& t,
                     RandomSource& rng);
bool verify_open(const OpenProof& proof, const Commitment& C, const Generators& gens, Transcript& t);
OpenProof simulate_open(const Commitment& C, const Fe& c, const Generators& gens, size_t n, RandomSource& rng);
// Two accepting proofs with the same t1 and distinct challenges.
Opening extract_open(const OpenProof& a, const OpenProof& b);

// ---------------------------------------------------------------------------
// Issuance structure: C opens to (m1, 0, sk, m4, j) with pk = sk*G and j public.
//   c*pk + t1 == s3*G
//   c*(C - j*G_5) + t2 == s5*H + s1*G_1 + s3*G_3 + s4*G_4

struct IssueStatement {
  Commitment C;
  Point pk;
  Fe j;
};

struct IssueProof {
  Point t1, t2;
  Fe c;
  Fe s1, s3, s4, s5;

  Bytes encode() const;
  static IssueProof decode(const Curve& curve, Reader& r);
};

// The token opening must hold exactly five messages. Slot 2 and slot 5 are
// not covered by responses; a nonzero slot 2 makes the proof fail to verify.
IssueProof prove_issue(const Opening& token, const IssueStatement& st, const Generators& gens, Transcript& t,
                       RandomSource& rng);
bool check_issue(const IssueProof& proof, const IssueStatement& st, const Generators& gens);
bool verify_issue(const IssueProof& proof, const IssueStatement& st, const Generators& gens, Transcript& t);
IssueProof simulate_issue(const IssueStatement& st, const Fe& c, const Generators& gens, RandomSource& rng);

// ---------------------------------------------------------------------------
// Addition / subtraction over (G, H) of one curve: C3 = C1 +/- C2.

struct PedersenPair {
  Fe value, blind;
};

struct AddStatement {
  Commitment C1, C2, C3;
  bool subtract = false;
};

struct AddProof {
  Point t1, t2, t3, t4;
  Fe c;
  Fe s1, s2, s3, s4, s5, s6;

  Bytes encode() const;
  static AddProof decode(const Curve& curve, Reader& r);
};

AddStatement add_statement(const Curve& curve, const PedersenPair& a, const PedersenPair& b, bool subtract);
AddProof prove_add(const PedersenPair& a, const PedersenPair& b, const AddStatement& st, Transcript& t,
                   RandomSource& rng);
bool check_add(const AddProof& proof, const AddStatement& st);
bool verify_add(const AddProof& proof, const AddStatement& st, Transcript& t);
AddProof simulate_add(const AddStatement& st, const Fe& c, RandomSource& rng);

// ---------------------------------------------------------------------------
// Multiplication: C3 commits to x*y.
//   G*s1 + H*s2 == t1 + c*C1
//   G*s3 + H*s4 == t2 + c*C2
//   C1*s3 + H*s5 == t3 + c*C3

struct MulStatement {
  Commitment C1, C2, C3;
};

struct MulWitness {
  Fe x, r1, y, r2, r3;
};

struct MulProof {
  Point t1, t2, t3;
  Fe c;
  Fe s1, s2, s3, s4, s5;

  Bytes encode() const;
  static MulProof decode(const Curve& curve, Reader& r);
};

class MulProver {
 public:
  MulProver(const MulWitness& w, const MulStatement& st, RandomSource& rng);
  const MulProof& first_message() const { return first_; }
  MulProof respond(const Fe& c) const;

 private:
  MulWitness w_;
  Fe a_[5];
  MulProof first_;
};

MulStatement mul_statement(const Curve& curve, const MulWitness& w);
MulProof prove_mul(const MulWitness& w, const MulStatement& st, Transcript& t, RandomSource& rng);
bool check_mul(const MulProof& proof, const MulStatement& st);
bool verify_mul(const MulProof& proof, const MulStatement& st, Transcript& t);
MulProof simulate_mul(const MulStatement& st, const Fe& c, RandomSource& rng);
MulWitness extract_mul(const MulProof& a, const MulProof& b);

// ---------------------------------------------------------------------------
// Addition of a product: C5 commits to x*y + z with blinding r3 + r4.

struct AddMulStatement {
  Commitment C1, C2, C3, C4, C5;
};

struct AddMulWitness {
  Fe x, y, z, r1, r2, r3, r4;
};

struct AddMulProof {
  Point t1, t2, t3, t4, t5, t6;
  Fe c;
  Fe s1, s2, s3, s4, s5, s6, s7, s8, s9;

  Bytes encode() const;
  static AddMulProof decode(const Curve& curve, Reader& r);
};

class AddMulProver {
 public:
  // presets: {alpha_1 (x), alpha_5 (z)}.
  AddMulProver(const AddMulWitness& w, const AddMulStatement& st, RandomSource& rng,
               std::optional<Fe> preset_x = std::nullopt, std::optional<Fe> preset_z = std::nullopt);
  const AddMulProof& first_message() const { return first_; }
  AddMulProof respond(const Fe& c) const;

 private:
  AddMulWitness w_;
  Fe a_[9];
  AddMulProof first_;
};

AddMulStatement add_mul_statement(const Curve& curve, const AddMulWitness& w);
void absorb_add_mul(Transcript& t, const AddMulStatement& st, const AddMulProof& first);
AddMulProof prove_add_mul(const AddMulWitness& w, const AddMulStatement& st, Transcript& t, RandomSource& rng);
// The five equations plus C5 == C3 + C4.
bool check_add_mul(const AddMulProof& proof, const AddMulStatement& st);
bool verify_add_mul(const AddMulProof& proof, const AddMulStatement& st, Transcript& t);
AddMulProof simulate_add_mul(const AddMulStatement& st, const Fe& c, RandomSource& rng);

// ---------------------------------------------------------------------------
// One-out-of-many equality: C* - C_i = delta*H for some hidden i.

struct OrEqBranch {
  Point t;
  Fe c, s;
};

struct OrEqProof {
  std::vector<OrEqBranch> branches;

  Bytes encode() const;
  static OrEqProof decode(const Curve& curve, Reader& r);
};

OrEqProof prove_or_eq(const Point& c_star, std::span<const Point> children, size_t index, const Fe& delta,
                      const Point& h, Transcript& t, RandomSource& rng);
bool verify_or_eq(const OrEqProof& proof, const Point& c_star, std::span<const Point> children, const Point& h,
                  Transcript& t);
// Interactive check against an explicit master challenge.
bool check_or_eq(const OrEqProof& proof, const Point& c_star, std::span<const Point> children, const Point& h,
                 const Fe& c);
OrEqProof simulate_or_eq(const Point& c_star, std::span<const Point> children, const Point& h, const Fe& c,
                         RandomSource& rng);

// ---------------------------------------------------------------------------
// Equality of discrete logs: P_j = w*B_j for all j.

struct DlogEqProof {
  std::vector<Point> t;
  Fe c;
  Fe s;

  Bytes encode() const;
  static DlogEqProof decode(const Curve& curve, Reader& r);
};

DlogEqProof prove_dlog_eq(std::span<const Point> bases, std::span<const Point> points, const Fe& w, Transcript& t,
                          RandomSource& rng);
bool check_dlog_eq(const DlogEqProof& proof, std::span<const Point> bases, std::span<const Point> points);
bool verify_dlog_eq(const DlogEqProof& proof, std::span<const Point> bases, std::span<const Point> points,
                    Transcript& t);
DlogEqProof simulate_dlog_eq(std::span<const Point> bases, std::span<const Point> points, const Fe& c,
                             RandomSource& rng);

// ---------------------------------------------------------------------------
// Helpers shared by composite proofs.

// sum s_k*B_k == t + c*target.
bool linear_check(const Curve& curve, std::span<const Fe> s, std::span<const Point> bases, const Point& t,
                  const Fe& c, const Point& target);
void write_point(Writer& w, const Point& p);
void write_scalar(Writer& w, const Fe& x);
Point read_point(const Curve& curve, Reader& r);
Fe read_scalar(const Curve& curve, Reader& r);

}  // namespace boomerang
