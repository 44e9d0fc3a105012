#include "boomerang/msm.hpp"

#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace boomerang {
namespace {

constexpr size_t kStrausMax = 96;
constexpr size_t kParallelMin = 256;

uint32_t window(const U256& k, size_t start, size_t width) {
  uint32_t d = 0;
  for (size_t b = 0; b < width && start + b < 256; ++b) d |= static_cast<uint32_t>(k.bit(start + b)) << b;
  return d;
}

std::vector<U256> canonical(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points) {
  if (scalars.size() != points.size()) throw std::invalid_argument("msm: length mismatch");
  std::vector<U256> ks(scalars.size());
  for (size_t i = 0; i < scalars.size(); ++i) {
    if (scalars[i].f != &curve.scalar() || points[i].c != &curve) {
      throw std::invalid_argument("msm: element from wrong group");
    }
    ks[i] = scalars[i].value();
  }
  return ks;
}

bool same_coords(const Point& a, const Point& b) { return a.X.v == b.X.v && a.Y.v == b.Y.v && a.Z.v == b.Z.v; }

Point straus(const Curve& curve, const std::vector<U256>& ks, std::span<const Point> points) {
  constexpr size_t w = Curve::kFixedWindow;
  const size_t bits = curve.scalar().bits();
  const size_t windows = (bits + w - 1) / w;

  // Terms on G or H use the curve's fixed tables and need no doublings.
  Point acc = curve.identity();
  std::vector<size_t> rest;
  for (size_t i = 0; i < points.size(); ++i) {
    const bool g = same_coords(points[i], curve.G), h = !g && same_coords(points[i], curve.H);
    if (!g && !h) {
      rest.push_back(i);
      continue;
    }
    auto fixed = curve.fixed_table(h);
    for (size_t win = 0; win < windows; ++win) {
      uint32_t d = window(ks[i], win * w, w);
      if (d != 0) acc += fixed[(win << w) + d];
    }
  }
  if (rest.empty()) return acc;

  const size_t n = rest.size();
  std::vector<Point> table(n << w, curve.identity());
  for (size_t i = 0; i < n; ++i) {
    Point* t = &table[i << w];
    t[1] = points[rest[i]];
    for (size_t d = 2; d < (size_t{1} << w); ++d) t[d] = t[d - 1] + t[1];
  }
  Point var = curve.identity();
  for (size_t win = windows; win-- > 0;) {
    for (size_t j = 0; j < w; ++j) var = var.dbl();
    for (size_t i = 0; i < n; ++i) {
      uint32_t d = window(ks[rest[i]], win * w, w);
      if (d != 0) var += table[(i << w) + d];
    }
  }
  return acc + var;
}

size_t pippenger_width(size_t n) {
  size_t c = 1;
  while ((size_t{1} << (c + 1)) <= n && c < 16) ++c;
  return c > 2 ? c - 1 : c;
}

Point pippenger_window(const Curve& curve, const std::vector<U256>& ks, std::span<const Point> points,
                       size_t win, size_t c) {
  std::vector<Point> buckets((size_t{1} << c), curve.identity());
  for (size_t i = 0; i < points.size(); ++i) {
    uint32_t d = window(ks[i], win * c, c);
    if (d != 0) buckets[d] += points[i];
  }
  Point running = curve.identity();
  Point total = curve.identity();
  for (size_t d = buckets.size() - 1; d >= 1; --d) {
    running += buckets[d];
    total += running;
  }
  return total;
}

Point combine_windows(const Curve& curve, const std::vector<Point>& totals, size_t c) {
  Point acc = curve.identity();
  for (size_t win = totals.size(); win-- > 0;) {
    for (size_t j = 0; j < c; ++j) acc = acc.dbl();
    acc += totals[win];
  }
  return acc;
}

Point pippenger(const Curve& curve, const std::vector<U256>& ks, std::span<const Point> points) {
  const size_t c = pippenger_width(points.size());
  const size_t windows = (curve.scalar().bits() + c - 1) / c;
  std::vector<Point> totals(windows);
  for (size_t win = 0; win < windows; ++win) totals[win] = pippenger_window(curve, ks, points, win, c);
  return combine_windows(curve, totals, c);
}

}  // namespace

Point msm_serial(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points) {
  auto ks = canonical(curve, scalars, points);
  if (points.empty()) return curve.identity();
  if (points.size() <= kStrausMax) return straus(curve, ks, points);
  return pippenger(curve, ks, points);
}

Point msm_parallel(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points) {
  auto ks = canonical(curve, scalars, points);
  if (points.empty()) return curve.identity();
  const size_t c = pippenger_width(points.size());
  const long windows = static_cast<long>((curve.scalar().bits() + c - 1) / c);
  std::vector<Point> totals(windows);
#pragma omp parallel for schedule(dynamic)
  for (long win = 0; win < windows; ++win) {
    totals[win] = pippenger_window(curve, ks, points, static_cast<size_t>(win), c);
  }
  return combine_windows(curve, totals, c);
}

Point msm(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points) {
#ifdef _OPENMP
  if (points.size() >= kParallelMin && omp_get_max_threads() > 1) {
    return msm_parallel(curve, scalars, points);
  }
#endif
  return msm_serial(curve, scalars, points);
}

Point msm_naive(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points) {
  if (scalars.size() != points.size()) throw std::invalid_argument("msm: length mismatch");
  Point acc = curve.identity();
  for (size_t i = 0; i < points.size(); ++i) acc += curve.mul(scalars[i], points[i]);
  return acc;
}

}  // namespace boomerang
