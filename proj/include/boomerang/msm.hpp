#pragma once

#include <span>

#include "boomerang/curve.hpp"

namespace boomerang {

// Variable-time multi-scalar multiplication: sum k_i * P_i.
// All entry points agree bit for bit; msm() picks a kernel by size.
Point msm(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points);

// Serial reference (Straus for short inputs, Pippenger otherwise).
Point msm_serial(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points);

// OpenMP kernel: Pippenger windows evaluated in parallel.
Point msm_parallel(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points);

// Textbook sum of ladders; test oracle.
Point msm_naive(const Curve& curve, std::span<const Fe> scalars, std::span<const Point> points);

}  // namespace boomerang
