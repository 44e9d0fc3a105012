#include "boomerang/pedersen.hpp"

#include <stdexcept>

#include "boomerang/msm.hpp"

namespace boomerang {

Generators Generators::system(const Curve& c) { return Generators{&c, c.gens, c.H}; }

Generators Generators::derive(const Curve& c, size_t count, std::string_view label) {
  const Point fixed[] = {c.G, c.H};
  return Generators{&c, c.derive_generators(count, label, fixed), c.H};
}

Commitment commit(std::span<const Fe> messages, const Fe& r, const Generators& gens) {
  if (messages.empty() || messages.size() > gens.size()) {
    throw std::invalid_argument("commit: message count must be in [1, generator count]");
  }
  std::vector<Fe> ks(messages.begin(), messages.end());
  std::vector<Point> ps(gens.g.begin(), gens.g.begin() + static_cast<long>(messages.size()));
  ks.push_back(r);
  ps.push_back(gens.h);
  return {msm(*gens.curve, ks, ps)};
}

Commitment add(const Commitment& a, const Commitment& b) {
  if (a.point.c != b.point.c) throw std::invalid_argument("commitment curve mismatch");
  return {a.point + b.point};
}

Commitment sub(const Commitment& a, const Commitment& b) {
  if (a.point.c != b.point.c) throw std::invalid_argument("commitment curve mismatch");
  return {a.point - b.point};
}

Commitment rerandomize(const Commitment& c, const Fe& delta, const Generators& gens) {
  return {c.point + gens.curve->mul(delta, gens.h)};
}

std::pair<Point, Commitment> blind(const Commitment& c, const Fe& gamma, const Point& z) {
  if (gamma.is_zero()) throw std::invalid_argument("blind: gamma must be nonzero");
  if (z.is_identity()) throw std::invalid_argument("blind: z must not be the identity");
  const Curve& curve = c.curve();
  return {curve.mul(gamma, z), Commitment{curve.mul(gamma, c.point)}};
}

}  // namespace boomerang
