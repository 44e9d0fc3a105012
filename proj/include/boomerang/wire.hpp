#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "boomerang/ats.hpp"

namespace boomerang {

inline constexpr uint8_t kWireVersion = 0x01;
inline constexpr uint8_t kErrorProcedure = 0xFF;
inline constexpr size_t kFrameHeader = 1 + 1 + 1 + 16;
inline constexpr size_t kMaxFrame = size_t{1} << 20;  // value of the length field

using SessionId = std::array<uint8_t, 16>;

struct Frame {
  uint8_t version = kWireVersion;
  uint8_t procedure = 0;
  uint8_t index = 0;
  SessionId session{};
  Bytes payload;

  bool is_error() const { return procedure == kErrorProcedure; }
  AtsCode error_code() const;
  friend bool operator==(const Frame&, const Frame&) = default;
};

// Framing failures carry the code that goes into the error frame.
class WireError : public AtsError {
 public:
  using AtsError::AtsError;
};

// length (4 bytes BE) || version || procedure || index || session || payload.
Bytes encode_frame(const Frame& f);
// Parses one complete frame; the version byte is not checked here.
Frame decode_frame(ByteView bytes);
// Validates a length field before anything is allocated for the body.
void check_frame_length(uint32_t length);
Frame error_frame(const Frame& request, AtsCode code);

SessionId random_session(RandomSource& rng);

// ---------------------------------------------------------------------------
// Public parameters as announced by the server in reply to issuance message 0.

struct CycleChoice {
  std::optional<ToyCycleDescription> toy;  // empty for secp256k1/secq256k1

  static CycleChoice production() { return {}; }
  static CycleChoice mid_toy() { return {mid_toy_description()}; }
  static CycleChoice parse(const std::string& name);
  Cycle build() const;
  std::string name() const;
};

struct ServerHello {
  CycleChoice cycle;
  uint32_t tokens = 1;
  uint32_t catalogue = 1;
  Bytes issuer;  // IssuerPublic encoding

  Bytes encode() const;
  static ServerHello decode(ByteView bytes);
};

// ---------------------------------------------------------------------------
// Issuer side: maps session ids to issuer state machines.

class Dispatcher {
 public:
  Dispatcher(IssuerState& issuer, CycleChoice cycle, size_t max_sessions = 1024);

  // Answers a request frame. Protocol failures become error frames and drop the session.
  Frame handle(const Frame& request);

  size_t open_sessions() const;
  size_t completed_sessions() const;
  // Distinct session ids that completed each procedure.
  size_t completed(Procedure p) const;
  IssuerState& issuer() { return *issuer_; }

 private:
  struct Session {
    std::unique_ptr<SystemRandom> rng;
    std::variant<std::unique_ptr<IssuerIssuance>, std::unique_ptr<IssuerPresentation>> machine;
    Procedure proc;
    bool done = false;
    std::mutex mu;
  };

  Frame step(Session& s, const Frame& request);
  void retire(const SessionId& id);

  IssuerState* issuer_;
  ServerHello hello_;
  size_t max_sessions_;
  mutable std::mutex mu_;
  std::map<SessionId, std::shared_ptr<Session>> sessions_;
  std::vector<SessionId> finished_;  // retention order of completed sessions
  std::map<Procedure, size_t> completed_;
};

// ---------------------------------------------------------------------------
// Transports.

class Channel {
 public:
  virtual ~Channel() = default;
  virtual Frame exchange(const Frame& request) = 0;
};

class LocalChannel final : public Channel {
 public:
  explicit LocalChannel(Dispatcher& d) : d_(&d) {}
  // Round-trips through the byte encoding so sizes match a socket.
  Frame exchange(const Frame& request) override;

 private:
  Dispatcher* d_;
};

class TcpChannel final : public Channel {
 public:
  // addr is host:port.
  explicit TcpChannel(const std::string& addr);
  ~TcpChannel() override;
  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;
  Frame exchange(const Frame& request) override;

 private:
  int fd_ = -1;
};

struct ServeOptions {
  bool concurrent = false;  // one thread per connection
  size_t max_connections = 0;  // stop after this many; 0 runs until stop()
};

class Server {
 public:
  // Binds host:port; port 0 picks a free one.
  Server(Dispatcher& d, const std::string& addr, ServeOptions opts = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  uint16_t port() const { return port_; }
  std::string address() const;
  // Blocks until stop() or max_connections connections were served.
  void run();
  void start();  // run() on a background thread
  void stop();

 private:
  void serve_connection(int fd);

  Dispatcher* d_;
  ServeOptions opts_;
  std::string host_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread thread_;
  std::mutex workers_mu_;
  std::vector<std::thread> workers_;
  std::vector<int> live_;  // open connection fds, shut down by stop()
};

// ---------------------------------------------------------------------------
// Client driver.

struct ProcReport {
  Procedure proc{};
  double ms = 0;
  size_t bytes_up = 0, bytes_down = 0;
  std::vector<size_t> message_bytes;  // payload sizes in message order
};

struct BenchReport {
  size_t users = 1;
  std::vector<ProcReport> rows;
};

// Raised on an error frame, with the index of the message that failed.
class ProtocolAbort : public AtsError {
 public:
  ProtocolAbort(AtsCode code, Procedure proc, uint8_t index);
  Procedure procedure() const { return proc_; }
  uint8_t index() const { return index_; }

 private:
  Procedure proc_;
  uint8_t index_;
};

struct ScriptOp {
  enum Kind { Issue, Collect, Spend } kind = Issue;
  uint32_t j = 0;
  int64_t v = 0;
  bool verify = false;
};

// One operation per line: `issue [J]`, `collect J V`, `spend J V [--verify]`. '#' starts a comment.
std::vector<ScriptOp> parse_script(std::string_view text);

class RemoteClient {
 public:
  // Fetches the public parameters and sets up a fresh client.
  RemoteClient(Channel& ch, RandomSource& rng);

  ProcReport issue(uint32_t j);
  ProcReport collect(uint32_t j, int64_t v);
  ProcReport spend(uint32_t j, int64_t v, bool verify, SpendOptions opts = {});
  ProcReport run(const ScriptOp& op);

  ClientState& state() { return *client_; }
  const ParamsPtr& params() const { return params_; }
  const std::optional<SpendOutcome>& last_spend() const { return last_spend_; }

 private:
  Bytes send(ProcReport& rep, const SessionId& sid, uint8_t index, Bytes payload);

  Channel* ch_;
  RandomSource* rng_;
  ParamsPtr params_;
  IssuerPublic issuer_;
  std::optional<ClientState> client_;
  std::optional<SpendOutcome> last_spend_;
};

BenchReport run_client(Channel& ch, std::span<const ScriptOp> script, RandomSource& rng);

// ---------------------------------------------------------------------------
// Benchmark: `users` clients each run issue, collect, spend, spend-verify per repetition.

struct BenchConfig {
  CycleChoice cycle = CycleChoice::production();
  size_t users = 1;
  size_t catalogue = 1;
  size_t reps = 1;
  bool tcp = false;  // loopback socket instead of an in-process channel
};

struct ProcSummary {
  Procedure proc{};
  double mean_ms = 0, median_ms = 0;
  size_t bytes_up = 0, bytes_down = 0;
  std::vector<size_t> message_bytes;
};

struct BenchResult {
  size_t users = 0;
  std::vector<ProcSummary> procs;  // issuance, collection, spending, spend-verify
  std::vector<double> total_ms;    // wall time of each repetition
  std::vector<std::array<double, 4>> rep_ms;  // per-repetition mean of each procedure
};

BenchResult bench(const BenchConfig& cfg);
// Machine-readable `proc=` lines followed by an aligned table.
std::string format_bench(const BenchResult& r);

}  // namespace boomerang
