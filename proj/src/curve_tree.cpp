#include "boomerang/curve_tree.hpp"

#include <omp.h>

#include "boomerang/msm.hpp"

namespace boomerang {

CurveTreeParams CurveTreeParams::make(Cycle cycle, unsigned depth, unsigned branching) {
  if (depth == 0 || branching == 0) throw TreeError("tree depth and branching must be positive");
  auto gens = std::make_shared<TreeGens>();
  gens->e1 = Generators::derive(cycle->E1(), 2 * branching, "curve-tree");
  gens->e2 = Generators::derive(cycle->E2(), 2 * branching, "curve-tree");
  CurveTreeParams p;
  p.depth = depth;
  p.branching = branching;
  p.cycle = std::move(cycle);
  p.gens = std::move(gens);
  (void)p.capacity();
  return p;
}

size_t CurveTreeParams::capacity() const {
  size_t c = 1;
  for (unsigned k = 0; k < depth; ++k) {
    if (c > (size_t{1} << 40) / branching) throw TreeError("tree capacity too large");
    c *= branching;
  }
  return c;
}

namespace {

// sum x_i*G_{2i} + y_i*G_{2i+1} over one node's children, optionally plus b*H.
Point pack(const std::vector<Affine>& coords, size_t first, const CurveTreeParams& params, unsigned level,
           const Fe* blinding) {
  const Generators& gens = params.gens_at(level);
  const Field& f = params.curve_at(level).scalar();
  std::vector<Fe> ks;
  std::vector<Point> ps;
  for (size_t i = 0; i < params.branching; ++i) {
    const Affine& a = coords[first + i];
    if (a.infinity) continue;
    ks.push_back(f.from_u256(a.x.value()));
    ps.push_back(gens.g[2 * i]);
    ks.push_back(f.from_u256(a.y.value()));
    ps.push_back(gens.g[2 * i + 1]);
  }
  if (ks.empty()) return params.curve_at(level).identity();
  if (blinding && !blinding->is_zero()) {
    ks.push_back(*blinding);
    ps.push_back(gens.h);
  }
  return msm(params.curve_at(level), ks, ps);
}

void check_level_input(std::span<const Point> children, const CurveTreeParams& params, unsigned level,
                       std::span<const Fe> blindings) {
  if (level == 0 || level > params.depth) throw TreeError("tree level out of range");
  if (children.size() % params.branching != 0) throw TreeError("child count not a multiple of branching");
  if (!blindings.empty() && blindings.size() != children.size() / params.branching) {
    throw TreeError("one blinding per parent required");
  }
}

}  // namespace

std::vector<Point> tree_level_serial(std::span<const Point> children, const CurveTreeParams& params, unsigned level,
                                     std::span<const Fe> blindings) {
  check_level_input(children, params, level, blindings);
  std::vector<Affine> coords = batch_affine(children);
  const size_t n = children.size() / params.branching;
  std::vector<Point> out;
  out.reserve(n);
  for (size_t p = 0; p < n; ++p) {
    out.push_back(pack(coords, p * params.branching, params, level, blindings.empty() ? nullptr : &blindings[p]));
  }
  return out;
}

std::vector<Point> tree_level_parallel(std::span<const Point> children, const CurveTreeParams& params,
                                       unsigned level, std::span<const Fe> blindings) {
  check_level_input(children, params, level, blindings);
  std::vector<Affine> coords = batch_affine(children);
  const long n = static_cast<long>(children.size() / params.branching);
  std::vector<Point> out(static_cast<size_t>(n), params.curve_at(level).identity());
#pragma omp parallel for schedule(dynamic)
  for (long p = 0; p < n; ++p) {
    out[p] = pack(coords, static_cast<size_t>(p) * params.branching, params, level,
                  blindings.empty() ? nullptr : &blindings[p]);
  }
  return out;
}

Fe CurveTree::node_blinding(unsigned level, size_t index) const {
  const Field& f = params.curve_at(level).scalar();
  if (blinding_key.empty() || level == 0) return f.zero();
  Sha256 h;
  h.update(as_bytes("curve-tree/blind"));
  h.update(blinding_key);
  h.update_u32(level);
  h.update_u32(static_cast<uint32_t>(index >> 32));
  h.update_u32(static_cast<uint32_t>(index));
  return f.from_bytes_reduce(expand(h, 2 * f.byte_len()));
}

CurveTree CurveTree::build(std::span<const Point> leaves, const CurveTreeParams& params, ByteView blinding_key) {
  const size_t cap = params.capacity();
  if (leaves.size() > cap) throw TreeError("leaf count exceeds tree capacity");
  const Curve& e1 = params.cycle->E1();
  CurveTree t;
  t.params = params;
  t.blinding_key.assign(blinding_key.begin(), blinding_key.end());
  t.leaf_count = leaves.size();
  std::vector<Point> level0(cap, e1.identity());
  for (size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i].c != &e1) throw TreeError("leaves must lie on E1");
    level0[i] = leaves[i];
  }
  t.levels.push_back(std::move(level0));
  const bool parallel = omp_get_max_threads() > 1;
  for (unsigned k = 1; k <= params.depth; ++k) {
    const size_t n = t.levels.back().size() / params.branching;
    std::vector<Fe> blind;
    if (!t.blinding_key.empty()) {
      for (size_t i = 0; i < n; ++i) blind.push_back(t.node_blinding(k, i));
    }
    t.levels.push_back(parallel ? tree_level_parallel(t.levels.back(), params, k, blind)
                                : tree_level_serial(t.levels.back(), params, k, blind));
  }
  return t;
}

CurveTree CurveTree::replace_leaf(size_t index, const Point& leaf) const {
  if (index >= leaf_count) throw TreeError("replace_leaf: index out of range");
  if (leaf.c != &params.cycle->E1()) throw TreeError("leaves must lie on E1");
  CurveTree t = *this;
  t.levels[0][index] = leaf;
  size_t idx = index;
  for (unsigned k = 1; k <= params.depth; ++k) {
    idx /= params.branching;
    std::span<const Point> kids(t.levels[k - 1].data() + idx * params.branching, params.branching);
    std::vector<Affine> coords = batch_affine(kids);
    Fe b = t.node_blinding(k, idx);
    t.levels[k][idx] = pack(coords, 0, params, k, &b);
  }
  return t;
}

// ---------------------------------------------------------------------------

Bytes MembershipLevel::encode() const {
  Writer w;
  w.count16(children.size());
  for (const Point& c : children) write_point(w, c);
  w.raw(blinding.encode());
  write_point(w, next);
  w.raw(select.encode());
  return std::move(w).bytes();
}

Bytes MembershipProof::encode() const {
  Writer w;
  w.u8(static_cast<uint8_t>(levels.size()));
  for (const MembershipLevel& l : levels) w.raw(l.encode());
  return std::move(w).bytes();
}

MembershipProof MembershipProof::decode(const CurveTreeParams& params, Reader& r) {
  MembershipProof p;
  size_t n = r.u8();
  if (n != params.depth) throw DecodeError("membership: wrong level count");
  for (unsigned k = params.depth; k >= 1; --k) {
    const Curve& here = params.curve_at(k);
    const Curve& below = params.curve_at(k - 1);
    MembershipLevel l;
    size_t m = r.count16(params.branching);
    for (size_t i = 0; i < m; ++i) l.children.push_back(read_point(below, r));
    l.blinding = DlogEqProof::decode(here, r);
    l.next = read_point(below, r);
    l.select = OrEqProof::decode(below, r);
    p.levels.push_back(std::move(l));
  }
  return p;
}

namespace {

Point coordinate_part(std::span<const Point> children, const CurveTreeParams& params, unsigned level) {
  return pack(batch_affine(children), 0, params, level, nullptr);
}

std::vector<Point> candidates(std::span<const Point> children) {
  std::vector<Point> out;
  for (const Point& c : children) {
    if (!c.is_identity()) out.push_back(c);
  }
  return out;
}

void absorb_tree(Transcript& t, const Point& root, const CurveTreeParams& params) {
  t.absorb_u64("tree/depth", params.depth);
  t.absorb_u64("tree/branching", params.branching);
  t.absorb("tree/root", root);
}

}  // namespace

Membership prove_membership(const CurveTree& tree, size_t index, Transcript& t, RandomSource& rng) {
  const CurveTreeParams& params = tree.params;
  if (index >= tree.leaf_count) throw TreeError("prove_membership: index out of range");
  if (tree.leaf(index).is_identity()) throw TreeError("prove_membership: padding leaf");
  absorb_tree(t, tree.root(), params);

  std::vector<size_t> idx(params.depth + 1);
  idx[0] = index;
  for (unsigned k = 1; k <= params.depth; ++k) idx[k] = idx[k - 1] / params.branching;

  Membership out;
  Point c_star = tree.root();
  Fe beta = tree.node_blinding(params.depth, 0);
  for (unsigned k = params.depth; k >= 1; --k) {
    const Curve& here = params.curve_at(k);
    const Curve& below = params.curve_at(k - 1);
    MembershipLevel lvl;
    const size_t first = idx[k] * params.branching;
    lvl.children.assign(tree.levels[k - 1].begin() + static_cast<long>(first),
                        tree.levels[k - 1].begin() + static_cast<long>(first + params.branching));
    for (const Point& c : lvl.children) t.absorb("tree/child", c);

    const Point base[] = {here.H};
    const Point target[] = {c_star - coordinate_part(lvl.children, params, k)};
    lvl.blinding = prove_dlog_eq(base, target, beta, t, rng);

    const Point& child = lvl.children[idx[k - 1] - first];
    Fe delta = below.scalar().random_nonzero(rng);
    lvl.next = child + below.mul(delta, below.H);
    std::vector<Point> cand = candidates(lvl.children);
    size_t pos = 0;
    for (size_t i = 0; i < idx[k - 1] - first; ++i) pos += lvl.children[i].is_identity() ? 0 : 1;
    lvl.select = prove_or_eq(lvl.next, cand, pos, delta, below.H, t, rng);

    c_star = lvl.next;
    beta = tree.node_blinding(k - 1, idx[k - 1]) + delta;
    out.delta = delta;
    out.proof.levels.push_back(std::move(lvl));
  }
  out.rerandomized_leaf = c_star;
  return out;
}

bool verify_membership(const Point& root, const Point& rerandomized_leaf, const MembershipProof& proof,
                       const CurveTreeParams& params, Transcript& t) {
  if (proof.levels.size() != params.depth) return false;
  if (root.c != &params.curve_at(params.depth) || rerandomized_leaf.c != &params.cycle->E1()) return false;
  absorb_tree(t, root, params);
  Point c_star = root;
  for (unsigned k = params.depth; k >= 1; --k) {
    const MembershipLevel& lvl = proof.levels[params.depth - k];
    const Curve& here = params.curve_at(k);
    const Curve& below = params.curve_at(k - 1);
    if (lvl.children.size() != params.branching) return false;
    for (const Point& c : lvl.children) {
      if (c.c != &below) return false;
      t.absorb("tree/child", c);
    }
    const Point base[] = {here.H};
    const Point target[] = {c_star - coordinate_part(lvl.children, params, k)};
    if (!verify_dlog_eq(lvl.blinding, base, target, t)) return false;
    std::vector<Point> cand = candidates(lvl.children);
    if (cand.empty() || lvl.next.c != &below) return false;
    if (!verify_or_eq(lvl.select, lvl.next, cand, below.H, t)) return false;
    c_star = lvl.next;
  }
  return c_star == rerandomized_leaf;
}

}  // namespace boomerang
