#pragma once

#include <memory>
#include <vector>

#include "boomerang/cycle.hpp"
#include "boomerang/pedersen.hpp"
#include "boomerang/sigma.hpp"

namespace boomerang {

struct TreeGens {
  Generators e1, e2;  // 2*branching slots each, blinding H of the curve
};

struct CurveTreeParams {
  unsigned depth = 2;
  unsigned branching = 32;
  Cycle cycle;
  std::shared_ptr<const TreeGens> gens;

  static CurveTreeParams make(Cycle cycle, unsigned depth, unsigned branching);

  size_t capacity() const;
  // Leaves sit on level 0 (E1); level k lives on E1 iff k is even.
  const Curve& curve_at(unsigned level) const { return level % 2 == 0 ? cycle->E1() : cycle->E2(); }
  const Generators& gens_at(unsigned level) const { return level % 2 == 0 ? gens->e1 : gens->e2; }
};

class TreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parents of one level: child i goes into slots (2i, 2i+1) of its parent.
// A parent whose children are all the identity is the identity.
std::vector<Point> tree_level_serial(std::span<const Point> children, const CurveTreeParams& params, unsigned level,
                                     std::span<const Fe> blindings);
std::vector<Point> tree_level_parallel(std::span<const Point> children, const CurveTreeParams& params,
                                       unsigned level, std::span<const Fe> blindings);

struct CurveTree {
  CurveTreeParams params;
  Bytes blinding_key;  // empty: non-hiding nodes
  size_t leaf_count = 0;
  std::vector<std::vector<Point>> levels;  // levels[0] = leaves padded with the identity

  static CurveTree build(std::span<const Point> leaves, const CurveTreeParams& params, ByteView blinding_key = {});
  CurveTree replace_leaf(size_t index, const Point& leaf) const;

  const Point& root() const { return levels.back()[0]; }
  const Point& leaf(size_t i) const { return levels[0].at(i); }
  Fe node_blinding(unsigned level, size_t index) const;
};

struct MembershipLevel {
  std::vector<Point> children;  // on the curve of the level below
  DlogEqProof blinding;         // current commitment minus its coordinate part, base H
  Point next;                   // rerandomized child
  OrEqProof select;

  Bytes encode() const;
};

struct MembershipProof {
  std::vector<MembershipLevel> levels;  // root first

  Bytes encode() const;
  static MembershipProof decode(const CurveTreeParams& params, Reader& r);
};

struct Membership {
  Point rerandomized_leaf;  // leaf + delta*H
  Fe delta;
  MembershipProof proof;
};

Membership prove_membership(const CurveTree& tree, size_t index, Transcript& t, RandomSource& rng);
bool verify_membership(const Point& root, const Point& rerandomized_leaf, const MembershipProof& proof,
                       const CurveTreeParams& params, Transcript& t);

}  // namespace boomerang
