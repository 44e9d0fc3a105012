#include <doctest.h>

#include "boomerang/cycle.hpp"
#include "boomerang/transcript.hpp"

using namespace boomerang;

TEST_CASE("challenges are deterministic in the absorbed data") {
  const Field& f = secp_secq()->E1().scalar();
  Transcript a("d"), b("d");
  a.absorb("x", as_bytes("hello"));
  b.absorb("x", as_bytes("hello"));
  CHECK(a.challenge_scalar("c", f) == b.challenge_scalar("c", f));
  CHECK(a.state() == b.state());
}

TEST_CASE("framing separates labels, data and domains") {
  const Field& f = secp_secq()->E1().scalar();
  auto c = [&](std::string_view dom, std::string_view l1, std::string_view d1) {
    Transcript t(dom);
    t.absorb(l1, as_bytes(d1));
    return t.challenge_scalar("c", f);
  };
  CHECK(c("d", "ab", "c") != c("d", "a", "bc"));
  CHECK(c("d", "a", "b") != c("e", "a", "b"));
  CHECK(c("d", "a", "b") != c("d", "b", "b"));
}

TEST_CASE("successive challenges differ and chain") {
  const Field& f = secp_secq()->E2().scalar();
  Transcript t("d");
  Fe c1 = t.challenge_scalar("c", f);
  Fe c2 = t.challenge_scalar("c", f);
  CHECK(c1 != c2);
  Transcript u("d");
  u.challenge_scalar("c", f);
  CHECK(u.challenge_scalar("c", f) == c2);
}

TEST_CASE("challenges are never zero on a tiny order") {
  Cycle tiny = find_toy_cycle(1000);
  const Field& f = tiny->E1().scalar();
  for (uint64_t i = 0; i < 5000; ++i) {
    Transcript t("d");
    t.absorb_u64("i", i);
    CHECK_FALSE(t.challenge_scalar("c", f).is_zero());
  }
}
