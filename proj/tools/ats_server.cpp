#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "boomerang/wire.hpp"

using namespace boomerang;

namespace {
Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Issuer server"};
  std::string listen = "127.0.0.1:7878", cycle = "secp-secq", dtags;
  size_t tokens = 1, catalogue = 0, max_sessions = 1024, max_connections = 0;
  bool concurrent = false;
  app.add_option("--listen", listen, "host:port")->capture_default_str();
  app.add_option("--cycle", cycle, "secp-secq, mid-toy, toy or toy:N")->capture_default_str();
  app.add_option("--tokens", tokens, "Tokens per client (n)")->capture_default_str();
  app.add_option("--catalogue", catalogue, "Catalogue length (default n)");
  app.add_option("--dtags", dtags, "Tag log file (default in memory)");
  app.add_option("--max-sessions", max_sessions)->capture_default_str();
  app.add_option("--max-connections", max_connections, "Exit after serving this many connections");
  app.add_flag("--concurrent", concurrent, "One thread per connection");
  CLI11_PARSE(app, argc, argv);

  try {
    CycleChoice choice = CycleChoice::parse(cycle);
    ParamsPtr params = AtsParams::make(choice.build(), tokens, catalogue);
    SystemRandom rng;
    IssuerState issuer(params, rng, {}, dtags);
    Dispatcher d(issuer, choice, max_sessions);
    ServeOptions opts;
    opts.concurrent = concurrent;
    opts.max_connections = max_connections;
    Server server(d, listen, opts);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << server.address() << " cycle=" << choice.name() << " tokens=" << params->tokens
              << " catalogue=" << params->catalogue << (concurrent ? " concurrent" : "") << std::endl;
    server.run();
    g_server = nullptr;
    std::cout << "served issuance=" << d.completed(Procedure::Issuance)
              << " collection=" << d.completed(Procedure::Collection)
              << " spending=" << d.completed(Procedure::Spending)
              << " spend-verify=" << d.completed(Procedure::SpendVerify) << " dtags=" << issuer.db().size()
              << std::endl;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
