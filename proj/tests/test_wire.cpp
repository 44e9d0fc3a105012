#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <set>
#include <thread>

#include "boomerang/wire.hpp"

using namespace boomerang;

namespace {

struct Fixture {
  DeterministicRandom rng{101};
  CycleChoice choice = CycleChoice::mid_toy();
  ParamsPtr params = AtsParams::make(choice.build(), 1);
  IssuerState issuer{params, rng};
  Dispatcher d{issuer, choice};
};

Frame frame(Procedure p, uint8_t idx, const SessionId& s, Bytes payload = {}) {
  return Frame{kWireVersion, static_cast<uint8_t>(p), idx, s, std::move(payload)};
}

}  // namespace

TEST_CASE("frame encoding round-trips") {
  DeterministicRandom rng(3);
  for (int i = 0; i < 500; ++i) {
    Frame f;
    f.procedure = static_cast<uint8_t>(1 + rng.uniform(4));
    f.index = static_cast<uint8_t>(rng.uniform(6));
    f.session = random_session(rng);
    f.payload.resize(rng.uniform(i < 490 ? 4096 : kMaxFrame - kFrameHeader + 1));
    rng.fill(f.payload);
    Bytes b = encode_frame(f);
    CHECK(b.size() == 4 + kFrameHeader + f.payload.size());
    CHECK(((uint32_t{b[0]} << 24) | (uint32_t{b[1]} << 16) | (uint32_t{b[2]} << 8) | b[3]) == b.size() - 4);
    CHECK(decode_frame(b) == f);
  }
  Frame big;
  big.payload.resize(kMaxFrame - kFrameHeader + 1);
  CHECK_THROWS_AS(encode_frame(big), WireError);
  CHECK_THROWS_AS(check_frame_length(kMaxFrame + 1), WireError);
  CHECK_THROWS_AS(check_frame_length(kFrameHeader - 1), WireError);
  CHECK_NOTHROW(check_frame_length(kMaxFrame));

  Frame req = frame(Procedure::Collection, 2, SessionId{7});
  Frame err = error_frame(req, AtsCode::Membership);
  CHECK(err.is_error());
  CHECK(err.error_code() == AtsCode::Membership);
  CHECK(err.session == req.session);
  CHECK(decode_frame(encode_frame(err)) == err);

  Bytes truncated = encode_frame(req);
  truncated.pop_back();
  CHECK_THROWS_AS(decode_frame(truncated), WireError);
}

TEST_CASE("dispatcher rejects bad frames") {
  Fixture fx;
  SessionId s{1};
  Frame bad = frame(Procedure::Issuance, 1, s);
  bad.version = 2;
  CHECK(fx.d.handle(bad).error_code() == AtsCode::BadVersion);
  Frame unk = frame(Procedure::Issuance, 1, s);
  unk.procedure = 9;
  CHECK(fx.d.handle(unk).error_code() == AtsCode::UnknownProcedure);
  CHECK(fx.d.handle(frame(Procedure::Collection, 2, s)).error_code() == AtsCode::UnknownSession);
  CHECK(fx.d.handle(frame(Procedure::Issuance, 1, s, {1, 2})).error_code() == AtsCode::Malformed);
  CHECK(fx.d.open_sessions() == 0);
}

TEST_CASE("script parsing") {
  auto ops = parse_script("issue\n# comment\ncollect 0 5\n\nspend 0 3 --verify\nspend 1 2\nissue 1\n");
  REQUIRE(ops.size() == 5);
  CHECK(ops[0].kind == ScriptOp::Issue);
  CHECK(ops[1].kind == ScriptOp::Collect);
  CHECK(ops[1].v == 5);
  CHECK(ops[2].verify);
  CHECK_FALSE(ops[3].verify);
  CHECK(ops[4].j == 1);
  CHECK(parse_script("").empty());
  CHECK_THROWS(parse_script("collect 0"));
  CHECK_THROWS(parse_script("spend 0 1 --fast"));
  CHECK_THROWS(parse_script("dance"));
}

TEST_CASE("in-process script run and empty script") {
  Fixture fx;
  LocalChannel ch(fx.d);
  CHECK(run_client(ch, {}, fx.rng).rows.empty());
  auto ops = parse_script("issue\ncollect 0 5\ncollect 0 4\nspend 0 6\n");
  BenchReport rep = run_client(ch, ops, fx.rng);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].proc == Procedure::Issuance);
  CHECK(rep.rows[0].message_bytes.size() == 4);
  CHECK(rep.rows[3].proc == Procedure::Spending);
  CHECK(rep.rows[3].message_bytes.size() == 6);
  for (const ProcReport& r : rep.rows) {
    size_t up = 0, down = 0;
    for (size_t i = 0; i < r.message_bytes.size(); ++i) (i % 2 ? down : up) += r.message_bytes[i];
    CHECK(up == r.bytes_up);
    CHECK(down == r.bytes_down);
  }
  CHECK(fx.d.completed(Procedure::Collection) == 2);
  CHECK(fx.d.open_sessions() == 0);
}

TEST_CASE("protocol aborts name the failing message") {
  Fixture fx;
  LocalChannel ch(fx.d);
  RemoteClient c(ch, fx.rng);
  c.issue(0);
  c.collect(0, 3);
  SpendOptions forge;
  forge.forge_sub = true;
  try {
    c.spend(0, 9, false, forge);
    FAIL("forged spend accepted");
  } catch (const ProtocolAbort& e) {
    CHECK(e.code() == AtsCode::SubProof);
    CHECK(e.index() == 2);
    CHECK(e.procedure() == Procedure::Spending);
  }
  CHECK(fx.d.open_sessions() == 0);
  CHECK(*scalar_to_int(c.state().balance(0)) == 3);
}

TEST_CASE("interleaved sessions stay isolated") {
  Fixture fx;
  LocalChannel ch(fx.d);
  RemoteClient a(ch, fx.rng), b(ch, fx.rng);
  a.issue(0);
  b.issue(0);

  const SessionId sa = random_session(fx.rng), sb = random_session(fx.rng);
  const Fe va = a.params()->scalar().from_u64(2), vb = b.params()->scalar().from_u64(2);
  ClientPresentation ca(a.state(), Procedure::Collection, 0, va, fx.rng);
  ClientPresentation cb(b.state(), Procedure::Collection, 0, vb, fx.rng);
  Frame a1 = fx.d.handle(frame(Procedure::Collection, 0, sa, ca.m0()));
  Frame b1 = fx.d.handle(frame(Procedure::Collection, 0, sb, cb.m0()));
  REQUIRE_FALSE(a1.is_error());
  REQUIRE_FALSE(b1.is_error());
  CHECK(a1.payload != b1.payload);  // distinct r2
  CHECK(fx.d.open_sessions() == 2);

  Bytes a2 = ca.m2(a1.payload);
  Bytes b2 = cb.m2(b1.payload);
  // A's presentation bound to A's r2 fails in B's session, which is then dropped.
  const SessionId sc = random_session(fx.rng);
  ClientPresentation cc(b.state(), Procedure::Collection, 0, vb, fx.rng);
  Frame c1 = fx.d.handle(frame(Procedure::Collection, 0, sc, cc.m0()));
  REQUIRE_FALSE(c1.is_error());
  CHECK(fx.d.handle(frame(Procedure::Collection, 2, sc, a2)).is_error());
  CHECK(fx.d.handle(frame(Procedure::Collection, 2, sc, b2)).error_code() == AtsCode::UnknownSession);

  Frame b3 = fx.d.handle(frame(Procedure::Collection, 2, sb, b2));
  Frame a3 = fx.d.handle(frame(Procedure::Collection, 2, sa, a2));
  REQUIRE_FALSE(a3.is_error());
  REQUIRE_FALSE(b3.is_error());
  Bytes a4 = ca.m4(a3.payload);
  Bytes b4 = cb.m4(b3.payload);
  // Challenges cross-posted between sessions do not complete either signature.
  Frame cross = fx.d.handle(frame(Procedure::Collection, 4, sa, b4));
  if (!cross.is_error()) CHECK_THROWS(ca.finish(cross.payload));
  Frame b5 = fx.d.handle(frame(Procedure::Collection, 4, sb, b4));
  REQUIRE_FALSE(b5.is_error());
  cb.finish(b5.payload);
  CHECK(*scalar_to_int(b.state().balance(0)) == 2);
}

TEST_CASE("replaying a completed session's M3 is rejected") {
  Fixture fx;
  LocalChannel ch(fx.d);
  RemoteClient c(ch, fx.rng);
  const SessionId sid = random_session(fx.rng);
  ClientIssuance ci(c.state(), 0, fx.rng);
  Frame m2 = fx.d.handle(frame(Procedure::Issuance, 1, sid, ci.m1()));
  REQUIRE_FALSE(m2.is_error());
  Bytes m3 = ci.m3(m2.payload);
  Frame m4 = fx.d.handle(frame(Procedure::Issuance, 3, sid, m3));
  REQUIRE_FALSE(m4.is_error());
  ci.finish(m4.payload);
  CHECK(fx.d.completed(Procedure::Issuance) == 1);
  for (int i = 0; i < 3; ++i) {
    Frame replay = fx.d.handle(frame(Procedure::Issuance, 3, sid, m3));
    CHECK(replay.is_error());
    CHECK(replay.error_code() == AtsCode::UnexpectedMessage);
  }
  // Reopening the same session id is refused as well.
  CHECK(fx.d.handle(frame(Procedure::Issuance, 1, sid, {})).error_code() == AtsCode::UnexpectedMessage);
}

TEST_CASE("loopback server, single-threaded and concurrent") {
  Fixture fx;
  SUBCASE("single client over TCP") {
    Server server(fx.d, "127.0.0.1:0");
    server.start();
    TcpChannel ch(server.address());
    auto ops = parse_script("issue\ncollect 0 5\ncollect 0 5\nspend 0 7 --verify\n");
    BenchReport rep = run_client(ch, ops, fx.rng);
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.rows[3].proc == Procedure::SpendVerify);
    CHECK(fx.issuer.spends().size() == 1);
    server.stop();
  }
  SUBCASE("wrong version closes the connection") {
    Server server(fx.d, "127.0.0.1:0");
    server.start();
    TcpChannel ch(server.address());
    Frame bad = frame(Procedure::Issuance, 0, SessionId{});
    bad.version = 0x07;
    CHECK(ch.exchange(bad).error_code() == AtsCode::BadVersion);
    CHECK_THROWS(ch.exchange(frame(Procedure::Issuance, 0, SessionId{})));
    server.stop();
  }
  SUBCASE("oversize length is refused before the body arrives") {
    Server server(fx.d, "127.0.0.1:0");
    server.start();
    // Raw socket: send only a length field claiming 16 MiB.
    auto [host, port] = std::pair{std::string("127.0.0.1"), server.port()};
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    inet_pton(AF_INET, host.c_str(), &sa.sin_addr);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) == 0);
    const uint8_t head[4] = {0x01, 0x00, 0x00, 0x00};
    REQUIRE(::send(fd, head, 4, 0) == 4);
    uint8_t buf[64];
    size_t got = 0;
    for (ssize_t n; (n = ::recv(fd, buf + got, sizeof buf - got, 0)) > 0;) got += static_cast<size_t>(n);
    ::close(fd);
    REQUIRE(got == 4 + kFrameHeader + 1);
    Frame err = decode_frame(ByteView(buf, got));
    CHECK(err.error_code() == AtsCode::Oversize);
    server.stop();
  }
  SUBCASE("ten parallel clients") {
    ServeOptions opts;
    opts.concurrent = true;
    Server server(fx.d, "127.0.0.1:0", opts);
    server.start();
    std::vector<BenchReport> reports(10);
    std::vector<std::string> errors(10);
    std::vector<std::thread> ts;
    for (size_t i = 0; i < 10; ++i) {
      ts.emplace_back([&, i] {
        try {
          DeterministicRandom r(1000 + i);
          TcpChannel ch(server.address());
          reports[i] = run_client(ch, parse_script("issue\ncollect 0 3\nspend 0 2\n"), r);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      });
    }
    for (auto& t : ts) t.join();
    for (size_t i = 0; i < 10; ++i) {
      CAPTURE(i);
      CHECK(errors[i].empty());
      CHECK(reports[i].rows.size() == 3);
    }
    CHECK(fx.d.completed(Procedure::Issuance) == 10);
    CHECK(fx.d.completed(Procedure::Collection) == 10);
    CHECK(fx.d.completed(Procedure::Spending) == 10);
    CHECK(fx.issuer.db().size() == 20);
    std::set<Bytes> ids;
    for (const DTag& t : fx.issuer.db().snapshot()) ids.insert(t.id.to_bytes());
    CHECK(ids.size() == 20);
    server.stop();
  }
  SUBCASE("bind failure") {
    Server first(fx.d, "127.0.0.1:0");
    CHECK_THROWS(Server(fx.d, first.address()));
  }
}

TEST_CASE("bench produces four rows") {
  BenchConfig cfg;
  cfg.cycle = CycleChoice::mid_toy();
  cfg.users = 2;
  cfg.catalogue = 4;
  cfg.reps = 1;
  BenchResult r = bench(cfg);
  REQUIRE(r.procs.size() == 4);
  CHECK(r.total_ms.size() == 1);
  std::string text = format_bench(r);
  CHECK(text.find("proc=Issuance ms=") != std::string::npos);
  CHECK(text.find("proc=Spending-Verify ms=") != std::string::npos);
  CHECK(r.procs[3].bytes_down > r.procs[2].bytes_down);
}
