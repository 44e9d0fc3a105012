#pragma once

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "boomerang/random.hpp"
#include "boomerang/transcript.hpp"

namespace boomerang {

// Vector generators g_i, h_i and the inner-product base u on one curve.
struct IpaGens {
  const Curve* curve = nullptr;
  std::vector<Point> g, h;
  Point u;

  static IpaGens derive(const Curve& c, size_t n, std::string_view label = "bulletproofs");
  size_t size() const { return g.size(); }
};

struct IpaProof {
  std::vector<Point> L, R;
  Fe a, b;

  size_t rounds() const { return L.size(); }
  Bytes encode() const;
  static IpaProof decode(const Curve& curve, Reader& r);
};

// P = <a, g> + <b, h> + <a, b>*U. Lengths must be equal powers of two.
IpaProof prove_ipa(std::vector<Fe> a, std::vector<Fe> b, std::vector<Point> g, std::vector<Point> h,
                   const Point& U, Transcript& t);
bool verify_ipa(const IpaProof& proof, std::span<const Point> g, std::span<const Point> h, const Point& U,
                const Point& P, Transcript& t);

size_t next_pow2(size_t n);

// ---------------------------------------------------------------------------

struct RangeParams {
  unsigned bits = 16;
  U256 limit = U256::from_u64(1u << 15);  // exclusive bound on rewards

  // Throws unless bits is a power of two and 2^(bits+1) fits below the group order.
  void validate(const Field& order) const;
};

class RangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RangeProof {
  Point A, S, T1, T2;
  Fe tau_x, mu, t_hat;
  IpaProof ipa;

  Bytes encode() const;
  static RangeProof decode(const Curve& curve, Reader& r);
};

// V = value*G + gamma*H with the curve's system G and H. Refuses value >= 2^bits.
RangeProof prove_range(const Fe& value, const Fe& gamma, const RangeParams& params, const IpaGens& gens,
                       Transcript& t, RandomSource& rng);
bool verify_range(const RangeProof& proof, const Point& V, const RangeParams& params, const IpaGens& gens,
                  Transcript& t);

// ---------------------------------------------------------------------------

// Spend vector committed on g, policy vector on h, both without blinding.
Point commit_spend(std::span<const Fe> spend, const IpaGens& gens);
Point commit_policy(std::span<const Fe> policy, const IpaGens& gens);

struct RewardProof {
  IpaProof ipa;
  Point slack;       // (limit - 1 - reward)*G + slack_blind*H
  Fe slack_blind;
  RangeProof range;

  Bytes encode() const;
  static RewardProof decode(const Curve& curve, Reader& r);
};

struct RewardResult {
  Fe reward;
  RewardProof proof;
};

// ipa_gens must cover the padded catalogue size, range_gens the range width.
RewardResult prove_reward(std::span<const Fe> spend, std::span<const Fe> policy, const RangeParams& params,
                          const IpaGens& ipa_gens, const IpaGens& range_gens, Transcript& t, RandomSource& rng);
bool verify_reward(const Fe& reward, const Point& policy_commitment, const Point& spend_commitment,
                   size_t catalogue, const RewardProof& proof, const RangeParams& params,
                   const IpaGens& ipa_gens, const IpaGens& range_gens, Transcript& t);

}  // namespace boomerang
