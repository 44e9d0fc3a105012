#include "boomerang/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <system_error>

namespace boomerang {

AtsCode Frame::error_code() const {
  return payload.size() == 1 ? static_cast<AtsCode>(payload[0]) : AtsCode::Malformed;
}

Bytes encode_frame(const Frame& f) {
  const size_t len = kFrameHeader + f.payload.size();
  if (len > kMaxFrame) throw WireError(AtsCode::Oversize, "frame exceeds cap");
  Writer w;
  w.u32(static_cast<uint32_t>(len));
  w.u8(f.version);
  w.u8(f.procedure);
  w.u8(f.index);
  w.raw(f.session);
  w.raw(f.payload);
  return std::move(w).bytes();
}

void check_frame_length(uint32_t length) {
  if (length > kMaxFrame) throw WireError(AtsCode::Oversize, "frame exceeds cap");
  if (length < kFrameHeader) throw WireError(AtsCode::Malformed, "frame shorter than header");
}

Frame decode_frame(ByteView bytes) {
  try {
    Reader r(bytes);
    const uint32_t len = r.u32();
    check_frame_length(len);
    if (r.remaining() != len) throw WireError(AtsCode::Malformed, "frame length mismatch");
    Frame f;
    f.version = r.u8();
    f.procedure = r.u8();
    f.index = r.u8();
    ByteView sid = r.raw(16);
    std::copy(sid.begin(), sid.end(), f.session.begin());
    ByteView rest = r.raw(r.remaining());
    f.payload.assign(rest.begin(), rest.end());
    return f;
  } catch (const DecodeError& e) {
    throw WireError(AtsCode::Malformed, e.what());
  }
}

Frame error_frame(const Frame& request, AtsCode code) {
  Frame f;
  f.procedure = kErrorProcedure;
  f.index = request.index;
  f.session = request.session;
  f.payload = {static_cast<uint8_t>(code)};
  return f;
}

SessionId random_session(RandomSource& rng) {
  SessionId s;
  rng.fill(s);
  return s;
}

// ---------------------------------------------------------------------------

CycleChoice CycleChoice::parse(const std::string& name) {
  if (name == "secp-secq" || name == "production") return production();
  if (name == "mid-toy") return mid_toy();
  if (name.rfind("toy", 0) == 0) {
    uint64_t max = 1000;
    if (name.size() > 4 && name[3] == ':') {
      auto [p, ec] = std::from_chars(name.data() + 4, name.data() + name.size(), max);
      if (ec != std::errc{} || p != name.data() + name.size()) throw std::invalid_argument("bad cycle: " + name);
    } else if (name != "toy") {
      throw std::invalid_argument("bad cycle: " + name);
    }
    return {find_toy_cycle_description(max)};
  }
  throw std::invalid_argument("unknown cycle: " + name);
}

Cycle CycleChoice::build() const { return toy ? make_toy_cycle(*toy) : secp_secq(); }

std::string CycleChoice::name() const {
  if (!toy) return "secp-secq";
  return "toy-" + std::to_string(toy->p) + "-" + std::to_string(toy->q);
}

Bytes ServerHello::encode() const {
  Writer w;
  w.u8(cycle.toy ? 1 : 0);
  if (cycle.toy) {
    w.u64(cycle.toy->p);
    w.u64(cycle.toy->q);
    w.u64(cycle.toy->b1);
    w.u64(cycle.toy->b2);
  }
  w.u32(tokens);
  w.u32(catalogue);
  w.raw(issuer);
  return std::move(w).bytes();
}

ServerHello ServerHello::decode(ByteView bytes) {
  Reader r(bytes);
  ServerHello h;
  const uint8_t kind = r.u8();
  if (kind > 1) throw DecodeError("hello: cycle kind");
  if (kind == 1) {
    ToyCycleDescription d;
    d.p = r.u64();
    d.q = r.u64();
    d.b1 = r.u64();
    d.b2 = r.u64();
    h.cycle.toy = d;
  }
  h.tokens = r.u32();
  h.catalogue = r.u32();
  ByteView rest = r.raw(r.remaining());
  h.issuer.assign(rest.begin(), rest.end());
  return h;
}

// ---------------------------------------------------------------------------

namespace {

bool opens(Procedure p, uint8_t index) { return index == (p == Procedure::Issuance ? 1 : 0); }

bool known_procedure(uint8_t p) { return p >= 0x01 && p <= 0x04; }

}  // namespace

Dispatcher::Dispatcher(IssuerState& issuer, CycleChoice cycle, size_t max_sessions)
    : issuer_(&issuer), max_sessions_(max_sessions) {
  const AtsParams& P = issuer.params();
  hello_.cycle = std::move(cycle);
  hello_.tokens = static_cast<uint32_t>(P.tokens);
  hello_.catalogue = static_cast<uint32_t>(P.catalogue);
  hello_.issuer = issuer.public_info().encode();
}

size_t Dispatcher::open_sessions() const {
  std::lock_guard lk(mu_);
  return sessions_.size() - finished_.size();
}

size_t Dispatcher::completed_sessions() const {
  std::lock_guard lk(mu_);
  size_t n = 0;
  for (const auto& [p, c] : completed_) n += c;
  return n;
}

size_t Dispatcher::completed(Procedure p) const {
  std::lock_guard lk(mu_);
  auto it = completed_.find(p);
  return it == completed_.end() ? 0 : it->second;
}

void Dispatcher::retire(const SessionId& id) {
  std::lock_guard lk(mu_);
  sessions_.erase(id);
}

Frame Dispatcher::handle(const Frame& req) {
  if (req.version != kWireVersion) return error_frame(req, AtsCode::BadVersion);
  if (!known_procedure(req.procedure)) return error_frame(req, AtsCode::UnknownProcedure);
  const auto proc = static_cast<Procedure>(req.procedure);

  if (proc == Procedure::Issuance && req.index == 0) {
    if (!req.payload.empty()) return error_frame(req, AtsCode::Malformed);
    Frame out{kWireVersion, req.procedure, 0, req.session, hello_.encode()};
    return out;
  }

  std::shared_ptr<Session> s;
  {
    std::lock_guard lk(mu_);
    auto it = sessions_.find(req.session);
    if (opens(proc, req.index)) {
      if (it != sessions_.end()) return error_frame(req, AtsCode::UnexpectedMessage);
      if (sessions_.size() - finished_.size() >= max_sessions_) return error_frame(req, AtsCode::RateLimited);
      s = std::make_shared<Session>();
      s->rng = std::make_unique<SystemRandom>();
      s->proc = proc;
      if (proc == Procedure::Issuance) {
        s->machine = std::make_unique<IssuerIssuance>(*issuer_, *s->rng);
      } else {
        s->machine = std::make_unique<IssuerPresentation>(*issuer_, proc, *s->rng);
      }
      sessions_.emplace(req.session, s);
    } else {
      if (it == sessions_.end()) return error_frame(req, AtsCode::UnknownSession);
      s = it->second;
    }
  }
  if (s->proc != proc) return error_frame(req, AtsCode::UnexpectedMessage);

  std::lock_guard sl(s->mu);
  const bool was_done = s->done;
  try {
    Frame out = step(*s, req);
    if (!was_done && s->done) {
      std::lock_guard lk(mu_);
      ++completed_[proc];
      finished_.push_back(req.session);
      if (finished_.size() > max_sessions_) {
        sessions_.erase(finished_.front());
        finished_.erase(finished_.begin());
      }
    }
    return out;
  } catch (const AtsError& e) {
    if (!was_done) retire(req.session);
    return error_frame(req, e.code());
  } catch (const std::exception&) {
    if (!was_done) retire(req.session);
    return error_frame(req, AtsCode::Internal);
  }
}

Frame Dispatcher::step(Session& s, const Frame& req) {
  Frame out{kWireVersion, req.procedure, static_cast<uint8_t>(req.index + 1), req.session, {}};
  if (auto* iss = std::get_if<std::unique_ptr<IssuerIssuance>>(&s.machine)) {
    switch (req.index) {
      case 1: out.payload = (*iss)->on_m1(req.payload); break;
      case 3: out.payload = (*iss)->on_m3(req.payload); break;
      default: throw AtsError(AtsCode::UnexpectedMessage, "issuance: bad message index");
    }
    s.done = (*iss)->done();
  } else {
    auto& pres = std::get<std::unique_ptr<IssuerPresentation>>(s.machine);
    switch (req.index) {
      case 0: out.payload = pres->on_m0(req.payload); break;
      case 2: out.payload = pres->on_m2(req.payload); break;
      case 4: out.payload = pres->on_m4(req.payload); break;
      default: throw AtsError(AtsCode::UnexpectedMessage, "presentation: bad message index");
    }
    s.done = pres->done();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sockets.

namespace {

[[noreturn]] void sys_fail(const char* what) { throw std::system_error(errno, std::generic_category(), what); }

std::pair<std::string, std::string> split_addr(const std::string& addr) {
  const size_t colon = addr.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("address must be host:port: " + addr);
  std::string host = addr.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  return {host, addr.substr(colon + 1)};
}

addrinfo* resolve(const std::string& addr, bool passive) {
  auto [host, port] = split_addr(addr);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw std::runtime_error("resolve " + addr + ": " + gai_strerror(rc));
  }
  return res;
}

bool write_all(int fd, ByteView data) {
  size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<size_t>(n);
  }
  return true;
}

// False on a clean EOF before the first byte.
bool read_all(int fd, std::span<uint8_t> out) {
  size_t off = 0;
  while (off < out.size()) {
    ssize_t n = ::recv(fd, out.data() + off, out.size() - off, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n == 0 && off == 0) return false;
    if (n <= 0) throw WireError(AtsCode::Malformed, "truncated frame");
    off += static_cast<size_t>(n);
  }
  return true;
}

// Reads one frame; the body is allocated only after the length passes the cap.
std::optional<Frame> read_frame(int fd) {
  std::array<uint8_t, 4> head;
  if (!read_all(fd, head)) return std::nullopt;
  const uint32_t len = (uint32_t{head[0]} << 24) | (uint32_t{head[1]} << 16) | (uint32_t{head[2]} << 8) | head[3];
  check_frame_length(len);
  Bytes buf(4 + len);
  std::copy(head.begin(), head.end(), buf.begin());
  if (!read_all(fd, std::span(buf).subspan(4))) throw WireError(AtsCode::Malformed, "truncated frame");
  return decode_frame(buf);
}

void set_nodelay(int fd) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

Frame LocalChannel::exchange(const Frame& request) {
  Frame in = decode_frame(encode_frame(request));
  return decode_frame(encode_frame(d_->handle(in)));
}

TcpChannel::TcpChannel(const std::string& addr) {
  addrinfo* res = resolve(addr, false);
  for (addrinfo* a = res; a; a = a->ai_next) {
    fd_ = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  freeaddrinfo(res);
  if (fd_ < 0) sys_fail(("connect " + addr).c_str());
  set_nodelay(fd_);
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

Frame TcpChannel::exchange(const Frame& request) {
  if (!write_all(fd_, encode_frame(request))) throw std::runtime_error("connection closed by server");
  std::optional<Frame> reply = read_frame(fd_);
  if (!reply) throw std::runtime_error("connection closed by server");
  return *reply;
}

Server::Server(Dispatcher& d, const std::string& addr, ServeOptions opts) : d_(&d), opts_(opts) {
  host_ = split_addr(addr).first;
  addrinfo* res = resolve(addr, true);
  for (addrinfo* a = res; a; a = a->ai_next) {
    listen_fd_ = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (listen_fd_ < 0) continue;
    int one = 1;
    setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listen_fd_, a->ai_addr, a->ai_addrlen) == 0 && ::listen(listen_fd_, 64) == 0) break;
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  freeaddrinfo(res);
  if (listen_fd_ < 0) sys_fail(("bind " + addr).c_str());
  sockaddr_storage ss{};
  socklen_t sl = sizeof ss;
  getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&ss), &sl);
  port_ = ntohs(ss.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port
                                         : reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
}

Server::~Server() {
  stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

std::string Server::address() const { return host_ + ":" + std::to_string(port_); }

void Server::serve_connection(int fd) {
  set_nodelay(fd);
  {
    std::lock_guard lk(workers_mu_);
    live_.push_back(fd);
  }
  for (;;) {
    std::optional<Frame> req;
    try {
      req = read_frame(fd);
    } catch (const WireError& e) {
      write_all(fd, encode_frame(error_frame(Frame{}, e.code())));
      break;
    }
    if (!req) break;
    Frame reply = d_->handle(*req);
    if (!write_all(fd, encode_frame(reply))) break;
    if (reply.is_error() && reply.error_code() == AtsCode::BadVersion) break;
  }
  {
    std::lock_guard lk(workers_mu_);
    live_.erase(std::find(live_.begin(), live_.end(), fd));
  }
  ::close(fd);
}

void Server::run() {
  size_t served = 0;
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, 100);
    if (rc <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    if (opts_.concurrent) {
      std::lock_guard lk(workers_mu_);
      workers_.emplace_back([this, fd] { serve_connection(fd); });
    } else {
      serve_connection(fd);
    }
    if (opts_.max_connections && ++served >= opts_.max_connections) break;
  }
  std::vector<std::thread> ws;
  {
    std::lock_guard lk(workers_mu_);
    ws.swap(workers_);
  }
  for (auto& t : ws) t.join();
}

void Server::start() {
  thread_ = std::thread([this] { run(); });
}

void Server::stop() {
  stopping_ = true;
  {
    std::lock_guard lk(workers_mu_);
    for (int fd : live_) ::shutdown(fd, SHUT_RDWR);
  }
  if (thread_.joinable()) thread_.join();
}

// ---------------------------------------------------------------------------
// Client driver.

ProtocolAbort::ProtocolAbort(AtsCode code, Procedure proc, uint8_t index)
    : AtsError(code, std::string(procedure_name(proc)) + " aborted at M" + std::to_string(index) + ": " +
                         std::string(code_name(code))),
      proc_(proc),
      index_(index) {}

std::vector<ScriptOp> parse_script(std::string_view text) {
  std::vector<ScriptOp> ops;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> words;
    for (std::string w; ls >> w;) words.push_back(w);
    if (words.empty()) continue;
    auto fail = [&] { throw std::invalid_argument("script line " + std::to_string(lineno) + ": " + line); };
    auto num = [&](const std::string& s, auto& out) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc{} || p != s.data() + s.size()) fail();
    };
    ScriptOp op;
    if (words[0] == "issue" && words.size() <= 2) {
      op.kind = ScriptOp::Issue;
      if (words.size() == 2) num(words[1], op.j);
    } else if (words[0] == "collect" && words.size() == 3) {
      op.kind = ScriptOp::Collect;
      num(words[1], op.j);
      num(words[2], op.v);
    } else if (words[0] == "spend" && (words.size() == 3 || (words.size() == 4 && words[3] == "--verify"))) {
      op.kind = ScriptOp::Spend;
      num(words[1], op.j);
      num(words[2], op.v);
      op.verify = words.size() == 4;
    } else {
      fail();
    }
    ops.push_back(op);
  }
  return ops;
}

RemoteClient::RemoteClient(Channel& ch, RandomSource& rng) : ch_(&ch), rng_(&rng) {
  Frame hello{kWireVersion, static_cast<uint8_t>(Procedure::Issuance), 0, random_session(rng), {}};
  Frame reply = ch.exchange(hello);
  if (reply.is_error()) throw ProtocolAbort(reply.error_code(), Procedure::Issuance, 0);
  ServerHello h = ServerHello::decode(reply.payload);
  params_ = AtsParams::make(h.cycle.build(), h.tokens, h.catalogue);
  Reader r(h.issuer);
  issuer_ = IssuerPublic::decode(*params_, r);
  r.expect_done();
  client_.emplace(ClientState::setup(params_, issuer_, rng));
}

Bytes RemoteClient::send(ProcReport& rep, const SessionId& sid, uint8_t index, Bytes payload) {
  rep.bytes_up += payload.size();
  rep.message_bytes.push_back(payload.size());
  Frame req{kWireVersion, static_cast<uint8_t>(rep.proc), index, sid, std::move(payload)};
  Frame reply = ch_->exchange(req);
  if (reply.is_error()) throw ProtocolAbort(reply.error_code(), rep.proc, index);
  if (reply.procedure != req.procedure || reply.index != index + 1 || reply.session != sid) {
    throw ProtocolAbort(AtsCode::UnexpectedMessage, rep.proc, index);
  }
  rep.bytes_down += reply.payload.size();
  rep.message_bytes.push_back(reply.payload.size());
  return std::move(reply.payload);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

ProcReport RemoteClient::issue(uint32_t j) {
  ProcReport rep;
  rep.proc = (Procedure::Issuance);
  const auto t0 = Clock::now();
  const SessionId sid = random_session(*rng_);
  ClientIssuance c(*client_, j, *rng_);
  Bytes m2 = send(rep, sid, 1, c.m1());
  Bytes m4 = send(rep, sid, 3, c.m3(m2));
  c.finish(m4);
  rep.ms = ms_since(t0);
  return rep;
}

ProcReport RemoteClient::collect(uint32_t j, int64_t v) {
  ProcReport rep;
  rep.proc = (Procedure::Collection);
  const auto t0 = Clock::now();
  const SessionId sid = random_session(*rng_);
  ClientPresentation c(*client_, Procedure::Collection, j, params_->scalar().from_int(v), *rng_);
  Bytes m1 = send(rep, sid, 0, c.m0());
  Bytes m3 = send(rep, sid, 2, c.m2(m1));
  Bytes m5 = send(rep, sid, 4, c.m4(m3));
  c.finish(m5);
  rep.ms = ms_since(t0);
  return rep;
}

ProcReport RemoteClient::spend(uint32_t j, int64_t v, bool verify, SpendOptions opts) {
  opts.want_reward_proof = verify;
  const Procedure proc = verify ? Procedure::SpendVerify : Procedure::Spending;
  ProcReport rep;
  rep.proc = (proc);
  const auto t0 = Clock::now();
  const SessionId sid = random_session(*rng_);
  ClientPresentation c(*client_, proc, j, params_->scalar().from_int(v), *rng_, opts);
  Bytes m1 = send(rep, sid, 0, c.m0());
  Bytes m3 = send(rep, sid, 2, c.m2(m1));
  Bytes m5 = send(rep, sid, 4, c.m4(m3));
  c.finish(m5);
  last_spend_ = c.outcome();
  rep.ms = ms_since(t0);
  return rep;
}

ProcReport RemoteClient::run(const ScriptOp& op) {
  switch (op.kind) {
    case ScriptOp::Issue: return issue(op.j);
    case ScriptOp::Collect: return collect(op.j, op.v);
    case ScriptOp::Spend: return spend(op.j, op.v, op.verify);
  }
  throw std::logic_error("script op");
}

BenchReport run_client(Channel& ch, std::span<const ScriptOp> script, RandomSource& rng) {
  BenchReport rep;
  if (script.empty()) return rep;
  RemoteClient client(ch, rng);
  for (const ScriptOp& op : script) rep.rows.push_back(client.run(op));
  return rep;
}

// ---------------------------------------------------------------------------
// Benchmark.

namespace {

constexpr std::array<Procedure, 4> kBenchProcs = {Procedure::Issuance, Procedure::Collection, Procedure::Spending,
                                                  Procedure::SpendVerify};

double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2;
}

}  // namespace

BenchResult bench(const BenchConfig& cfg) {
  BenchResult out;
  out.users = cfg.users;
  ParamsPtr params = AtsParams::make(cfg.cycle.build(), 1, cfg.catalogue);
  std::array<std::vector<double>, 4> samples;
  std::array<std::optional<ProcReport>, 4> sizes;
  SystemRandom rng;

  for (size_t rep = 0; rep < cfg.reps; ++rep) {
    IssuerState issuer(params, rng);
    Dispatcher d(issuer, cfg.cycle);
    std::unique_ptr<Server> server;
    if (cfg.tcp) {
      server = std::make_unique<Server>(d, "127.0.0.1:0");
      server->start();
    }
    std::array<double, 4> sum{};
    const auto t0 = Clock::now();
    for (size_t u = 0; u < cfg.users; ++u) {
      std::unique_ptr<Channel> ch;
      if (server) {
        ch = std::make_unique<TcpChannel>(server->address());
      } else {
        ch = std::make_unique<LocalChannel>(d);
      }
      RemoteClient client(*ch, rng);
      std::array<ProcReport, 4> r = {client.issue(0), client.collect(0, 5), client.spend(0, 1, false),
                                     client.spend(0, 1, true)};
      for (size_t k = 0; k < 4; ++k) {
        samples[k].push_back(r[k].ms);
        sum[k] += r[k].ms;
        if (!sizes[k]) sizes[k] = r[k];
      }
    }
    out.total_ms.push_back(ms_since(t0));
    std::array<double, 4> mean{};
    for (size_t k = 0; k < 4; ++k) mean[k] = sum[k] / static_cast<double>(cfg.users);
    out.rep_ms.push_back(mean);
    if (server) server->stop();
  }

  for (size_t k = 0; k < 4; ++k) {
    ProcSummary s;
    s.proc = kBenchProcs[k];
    if (!samples[k].empty()) {
      s.mean_ms = std::accumulate(samples[k].begin(), samples[k].end(), 0.0) / static_cast<double>(samples[k].size());
      s.median_ms = median(samples[k]);
    }
    if (sizes[k]) {
      s.bytes_up = sizes[k]->bytes_up;
      s.bytes_down = sizes[k]->bytes_down;
      s.message_bytes = sizes[k]->message_bytes;
    }
    out.procs.push_back(std::move(s));
  }
  return out;
}

std::string format_bench(const BenchResult& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  for (const ProcSummary& s : r.procs) {
    os << "proc=" << procedure_name(s.proc) << " ms=" << s.mean_ms << " bytes_up=" << s.bytes_up
       << " bytes_down=" << s.bytes_down << "\n";
  }
  os << "\nusers=" << r.users << " reps=" << r.total_ms.size() << "\n";
  os << std::left << std::setw(16) << "procedure" << std::right << std::setw(12) << "mean ms" << std::setw(12)
     << "median ms" << std::setw(10) << "up B" << std::setw(10) << "down B" << "  messages\n";
  for (const ProcSummary& s : r.procs) {
    std::string msgs;
    for (size_t i = 0; i < s.message_bytes.size(); ++i) {
      if (i) msgs += " ";
      msgs += std::to_string(s.message_bytes[i]);
    }
    os << std::left << std::setw(16) << procedure_name(s.proc) << std::right << std::setw(12) << s.mean_ms
       << std::setw(12) << s.median_ms << std::setw(10) << s.bytes_up << std::setw(10) << s.bytes_down << "  "
       << msgs << "\n";
  }
  if (!r.total_ms.empty()) {
    os << std::left << std::setw(16) << "total" << std::right << std::setw(12)
       << std::accumulate(r.total_ms.begin(), r.total_ms.end(), 0.0) / static_cast<double>(r.total_ms.size())
       << std::setw(12) << median(r.total_ms) << "\n";
  }
  return os.str();
}

}  // namespace boomerang
