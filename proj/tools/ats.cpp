// Local command-line front end. State lives in one directory:
//   config.json  cycle, token count, catalogue
//   issuer.key   issuer signing scalar (hex)
//   policy.txt   one policy weight per line
//   registry.bin issuer registrations and known roots
//   client.state client snapshot
//   dtags.db     double-spending tag log

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "boomerang/ats.hpp"
#include "boomerang/wire.hpp"

namespace fs = std::filesystem;
using namespace boomerang;

namespace {

Bytes read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, ByteView data) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  }
  fs::rename(tmp, p);
}

std::string read_text(const fs::path& p) {
  Bytes b = read_file(p);
  return {b.begin(), b.end()};
}

std::vector<int64_t> read_ints(const fs::path& p) {
  std::istringstream in(read_text(p));
  std::vector<int64_t> out;
  for (std::string line; std::getline(in, line);) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    for (int64_t x; ls >> x;) out.push_back(x);
    if (!ls.eof()) throw std::runtime_error(p.string() + ": not an integer: " + line);
  }
  return out;
}

std::vector<Fe> to_scalars(const AtsParams& P, const std::vector<int64_t>& xs) {
  std::vector<Fe> out;
  for (int64_t x : xs) out.push_back(P.scalar().from_int(x));
  return out;
}

std::string show(const Fe& x) {
  if (auto v = scalar_to_int(x)) return std::to_string(*v);
  return to_hex(x.to_bytes());
}

struct Store {
  fs::path dir;
  CycleChoice cycle;
  ParamsPtr params;
  std::optional<IssuerState> issuer;
  std::optional<ClientState> client;
  fs::path client_path;

  fs::path at(const char* name) const { return dir / name; }

  static void create(const fs::path& dir, const std::string& cycle, size_t tokens, size_t catalogue,
                     const std::string& policy_file) {
    if (fs::exists(dir / "config.json")) throw std::runtime_error(dir.string() + " is already set up");
    fs::create_directories(dir);
    CycleChoice choice = CycleChoice::parse(cycle);
    ParamsPtr params = AtsParams::make(choice.build(), tokens, catalogue);
    std::vector<Fe> policy;
    if (!policy_file.empty()) policy = to_scalars(*params, read_ints(policy_file));
    SystemRandom rng;
    IssuerState issuer(params, rng, policy, (dir / "dtags.db").string());
    ClientState client = ClientState::setup(params, issuer.public_info(), rng);

    nlohmann::json cfg = {{"cycle", choice.toy ? "toy:" + std::to_string(choice.toy->p) : "secp-secq"},
                          {"tokens", params->tokens},
                          {"catalogue", params->catalogue}};
    if (choice.toy && choice.toy->p == mid_toy_description().p) cfg["cycle"] = "mid-toy";
    const std::string text = cfg.dump(2) + "\n";
    write_file(dir / "config.json", as_bytes(text));
    const std::string key = to_hex(issuer.keys().x.to_bytes()) + "\n";
    write_file(dir / "issuer.key", as_bytes(key));
    std::string pol;
    for (const Fe& w : issuer.policy()) pol += show(w) + "\n";
    write_file(dir / "policy.txt", as_bytes(pol));
    write_file(dir / "registry.bin", issuer.registry_snapshot());
    write_file(dir / "client.state", client.snapshot());
  }

  void load(const fs::path& d, const std::string& client_file = {}) {
    Store& s = *this;
    s.dir = d;
    auto cfg = nlohmann::json::parse(read_text(d / "config.json"));
    s.cycle = CycleChoice::parse(cfg.at("cycle").get<std::string>());
    s.params = AtsParams::make(s.cycle.build(), cfg.at("tokens").get<size_t>(), cfg.at("catalogue").get<size_t>());
    const AtsParams& P = *s.params;

    SignerKeys keys;
    std::string key_hex = read_text(d / "issuer.key");
    while (!key_hex.empty() && std::isspace(static_cast<unsigned char>(key_hex.back()))) key_hex.pop_back();
    auto x = P.scalar().from_bytes(from_hex(key_hex));
    if (!x || x->is_zero()) throw std::runtime_error("issuer.key: bad scalar");
    keys.x = *x;
    keys.pk.y = P.curve().mul(keys.x, P.curve().G);
    keys.pk.z = acl_tag_key(P.acl, keys.pk.y);
    s.issuer.emplace(s.params, keys, to_scalars(P, read_ints(d / "policy.txt")), (d / "dtags.db").string());
    s.issuer->restore_registry(read_file(d / "registry.bin"));

    s.client_path = client_file.empty() ? d / "client.state" : fs::path(client_file);
    s.client.emplace(ClientState::restore(s.params, read_file(s.client_path)));
    s.client->update_issuer(s.issuer->public_info());
  }

  void save() {
    write_file(at("registry.bin"), issuer->registry_snapshot());
    write_file(client_path, client->snapshot());
  }
};

void print_balances(const ClientState& c) {
  for (uint32_t j = 0; j < c.state().size(); ++j) {
    std::cout << "slot " << j << " " << (c.is_signed(j) ? "signed" : "unsigned") << " balance=" << show(c.balance(j))
              << "\n";
  }
}

int cmd_gen_toy_cycle(uint64_t max_prime) {
  ToyCycleDescription d = find_toy_cycle_description(max_prime);
  const uint64_t n1 = count_points_exhaustive(d.p, 0, d.b1);
  const uint64_t n2 = count_points_exhaustive(d.q, 0, d.b2);
  Cycle c = make_toy_cycle(d);
  std::cout << "# toy 2-cycle, largest p <= " << max_prime << "\n"
            << "p = " << d.p << "\n"
            << "q = " << d.q << "\n"
            << "E1: y^2 = x^3 + " << d.b1 << " over F_p\n"
            << "E2: y^2 = x^3 + " << d.b2 << " over F_q\n"
            << "#E1(F_p) = " << n1 << " (exhaustive count, expected q)\n"
            << "#E2(F_q) = " << n2 << " (exhaustive count, expected p)\n"
            << "E1.G = " << to_hex(c->E1().G.encode()) << "\n"
            << "E1.H = " << to_hex(c->E1().H.encode()) << "\n"
            << "E2.G = " << to_hex(c->E2().G.encode()) << "\n"
            << "E2.H = " << to_hex(c->E2().H.encode()) << "\n";
  return n1 == d.q && n2 == d.p ? 0 : 1;
}

int cmd_tree_root(const std::string& file, const std::string& cycle, unsigned depth, unsigned branching,
                  const std::string& key_hex) {
  Cycle c = CycleChoice::parse(cycle).build();
  std::istringstream in(read_text(file));
  std::vector<Point> leaves;
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    leaves.push_back(c->E1().decode(from_hex(line)));
  }
  if (leaves.empty()) throw std::runtime_error(file + ": no leaves");
  if (branching == 0) {
    branching = 1;
    while (std::pow(static_cast<double>(branching), depth) < static_cast<double>(leaves.size())) ++branching;
  }
  CurveTreeParams params = CurveTreeParams::make(c, depth, branching);
  Bytes key = from_hex(key_hex);
  CurveTree tree = CurveTree::build(leaves, params, key);
  std::cout << to_hex(tree.root().encode()) << "\n";
  return 0;
}

int cmd_issue(const fs::path& dir, const std::string& client_file, uint32_t j) {
  Store s;
  s.load(dir, client_file);
  SystemRandom rng;
  Traffic t = issuance(*s.client, *s.issuer, j, rng);
  s.save();
  std::cout << "issued slot " << j << " bytes_up=" << t.up << " bytes_down=" << t.down << "\n";
  return 0;
}

int cmd_collect(const fs::path& dir, const std::string& client_file, uint32_t j, int64_t v) {
  Store s;
  s.load(dir, client_file);
  SystemRandom rng;
  Traffic t = collection(*s.client, *s.issuer, j, s.params->scalar().from_int(v), rng);
  s.save();
  std::cout << "collected " << v << " into slot " << j << " balance=" << show(s.client->balance(j))
            << " bytes_up=" << t.up << " bytes_down=" << t.down << "\n";
  return 0;
}

int cmd_spend(const fs::path& dir, const std::string& client_file, uint32_t j, int64_t v, const std::string& policy,
              bool prove, const std::string& out) {
  Store s;
  s.load(dir, client_file);
  SystemRandom rng;
  if (!policy.empty()) {
    // A new policy is committed before this spend and adopted by the client.
    std::vector<Fe> w = to_scalars(*s.params, read_ints(policy));
    s.issuer.emplace(s.params, s.issuer->keys(), w, (dir / "dtags.db").string());
    s.issuer->restore_registry(read_file(s.at("registry.bin")));
    s.client->update_issuer(s.issuer->public_info());
    std::string text;
    for (const Fe& x : w) text += show(x) + "\n";
    write_file(s.at("policy.txt"), as_bytes(text));
  }
  SpendOptions opts;
  opts.want_reward_proof = prove;
  SpendResult r = spend(*s.client, *s.issuer, j, s.params->scalar().from_int(v), rng, opts);
  s.save();
  std::cout << "spent " << v << " from slot " << j << " balance=" << show(s.client->balance(j))
            << " reward=" << show(r.outcome.reward) << " bytes_up=" << r.traffic.up
            << " bytes_down=" << r.traffic.down << "\n";
  if (r.outcome.proof) {
    const fs::path claim = out.empty() ? s.at("reward.claim") : fs::path(out);
    std::ostringstream text;
    text << "reward " << to_hex(r.outcome.reward.to_bytes()) << "\n"
         << "spend " << to_hex(r.outcome.spend_commitment.encode()) << "\n"
         << "proof " << to_hex(r.outcome.proof->encode()) << "\n";
    write_file(claim, as_bytes(text.str()));
    std::cout << "reward claim written to " << claim.string() << "\n";
  }
  return 0;
}

int cmd_detect(const fs::path& dir) {
  Store s;
  s.load(dir);
  SystemRandom rng;
  DetectReport rep = detect_double_spend(s.issuer->db().snapshot(), s.params->curve(), rng);
  std::cout << "records=" << s.issuer->db().size() << " culprits=" << rep.culprits.size()
            << " skipped_equal_r2=" << rep.skipped_equal_r2 << "\n";
  for (const Culprit& c : rep.culprits) {
    std::cout << "culprit pk=" << to_hex(c.pk.encode()) << " sk=" << to_hex(c.sk.to_bytes())
              << " proof=" << (verify_culprit(c, s.params->curve()) ? "valid" : "INVALID") << "\n";
  }
  return rep.culprits.empty() ? 0 : 2;
}

int cmd_verify_reward(const fs::path& dir, const std::string& file) {
  Store s;
  s.load(dir);
  const AtsParams& P = *s.params;
  std::map<std::string, Bytes> fields;
  std::istringstream in(read_text(file));
  for (std::string k, v; in >> k >> v;) fields[k] = from_hex(v);
  for (const char* k : {"reward", "spend", "proof"}) {
    if (!fields.count(k)) throw std::runtime_error(file + ": missing " + k);
  }
  auto reward = P.scalar().from_bytes(fields["reward"]);
  if (!reward) throw std::runtime_error(file + ": bad reward");
  Point spend_c = P.curve().decode(fields["spend"]);
  Reader r(fields["proof"]);
  RewardProof proof = RewardProof::decode(P.curve(), r);
  r.expect_done();
  const bool ok = verify_reward_claim(P, s.issuer->public_info(), *reward, spend_c, proof);
  std::cout << (ok ? "accept" : "reject") << " reward=" << show(*reward) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accumulation tokens: local issuer and client"};
  app.require_subcommand(1);
  std::string dir = "ats-state";
  std::string client_file;
  app.add_option("--dir", dir, "State directory")->capture_default_str();
  app.add_option("--client", client_file, "Client snapshot to use instead of <dir>/client.state");

  std::string cycle = "secp-secq", policy, out, key_hex, leaf_file;
  size_t tokens = 1, catalogue = 0;
  uint64_t max_prime = 1000;
  uint32_t slot = 0;
  int64_t value = 0;
  bool prove = false;
  unsigned depth = 2, branching = 0;

  auto* setup = app.add_subcommand("setup", "Create issuer and client state");
  setup->add_option("--cycle", cycle, "secp-secq, mid-toy, toy or toy:N")->capture_default_str();
  setup->add_option("--tokens", tokens, "Tokens per client (n)")->capture_default_str();
  setup->add_option("--catalogue", catalogue, "Catalogue length (default n)");
  setup->add_option("--policy", policy, "Policy file, one weight per line");

  auto* gen = app.add_subcommand("gen-toy-cycle", "Find and print a toy 2-cycle");
  gen->add_option("--max-prime", max_prime, "Upper bound on p")->required();

  auto* tree = app.add_subcommand("tree-root", "Recompute a tree root from a leaf file");
  tree->add_option("file", leaf_file, "One hex point per line")->required();
  tree->add_option("--cycle", cycle)->capture_default_str();
  tree->add_option("--depth", depth)->capture_default_str();
  tree->add_option("--branching", branching, "Default: smallest b with b^depth >= leaves");
  tree->add_option("--key", key_hex, "Hex node-blinding key");

  auto* issue = app.add_subcommand("issue", "Run issuance for one slot");
  issue->add_option("--slot", slot)->capture_default_str();

  auto* collect = app.add_subcommand("collect", "Collect a value into a slot");
  collect->add_option("--value", value)->required();
  collect->add_option("--slot", slot)->capture_default_str();

  auto* spendc = app.add_subcommand("spend", "Spend a value from a slot");
  spendc->add_option("--value", value)->required();
  spendc->add_option("--slot", slot)->capture_default_str();
  spendc->add_option("--policy", policy, "Commit this policy before spending");
  spendc->add_flag("--prove-reward", prove, "Request a publicly verifiable reward proof");
  spendc->add_option("--out", out, "Reward claim file (default <dir>/reward.claim)");

  auto* detect = app.add_subcommand("detect", "Scan the tag log for double spending");

  std::string claim;
  auto* vr = app.add_subcommand("verify-reward", "Check a reward claim file");
  vr->add_option("file", claim)->required();

  auto* bal = app.add_subcommand("balance", "Print client balances");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*setup) {
      Store::create(dir, cycle, tokens, catalogue, policy);
      std::cout << "initialized " << dir << "\n";
      return 0;
    }
    if (*gen) return cmd_gen_toy_cycle(max_prime);
    if (*tree) return cmd_tree_root(leaf_file, cycle, depth, branching, key_hex);
    if (*issue) {
      if (!fs::exists(fs::path(dir) / "config.json")) Store::create(dir, cycle, tokens, catalogue, policy);
      return cmd_issue(dir, client_file, slot);
    }
    if (*collect) return cmd_collect(dir, client_file, slot, value);
    if (*spendc) return cmd_spend(dir, client_file, slot, value, policy, prove, out);
    if (*detect) return cmd_detect(dir);
    if (*vr) return cmd_verify_reward(dir, claim);
    if (*bal) {
      Store s;
      s.load(dir, client_file);
      print_balances(*s.client);
      return 0;
    }
  } catch (const AtsError& e) {
    std::cerr << "error: " << code_name(e.code()) << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
