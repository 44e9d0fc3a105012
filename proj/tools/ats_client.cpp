#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "boomerang/wire.hpp"

using namespace boomerang;

int main(int argc, char** argv) {
  CLI::App app{"Scripted client"};
  std::string connect, script_file;
  app.add_option("--connect", connect, "host:port")->required();
  app.add_option("--script", script_file, "issue | collect J V | spend J V [--verify], one per line")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(script_file);
    if (!in) throw std::runtime_error("cannot read " + script_file);
    std::stringstream text;
    text << in.rdbuf();
    std::vector<ScriptOp> ops = parse_script(text.str());
    if (ops.empty()) {
      std::cout << "empty script\n";
      return 0;
    }
    TcpChannel ch(connect);
    SystemRandom rng;
    RemoteClient client(ch, rng);
    std::cout << std::fixed << std::setprecision(3);
    for (const ScriptOp& op : ops) {
      ProcReport r = client.run(op);
      std::cout << "proc=" << procedure_name(r.proc) << " ms=" << r.ms << " bytes_up=" << r.bytes_up
                << " bytes_down=" << r.bytes_down << "\n";
    }
    for (uint32_t j = 0; j < client.state().state().size(); ++j) {
      if (auto v = scalar_to_int(client.state().balance(j))) std::cout << "slot " << j << " balance=" << *v << "\n";
    }
  } catch (const ProtocolAbort& e) {
    std::cerr << "abort: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
