// abnet: command-line driver for abelian network analysis.

#include <abnet/abnet.hpp>
#include <abnet/json_io.hpp>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace abnet;

constexpr const char* kVersion = "abnet 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitNeverHalts = 10;
constexpr int kExitInconclusive = 20;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw InternalInconsistency("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string fingerprint(const Network& net) { return sha256_hex(canonical_dump(network_to_json(net))); }

struct Output {
  std::string path;

  void write(const Json& j) const {
    const auto text = j.dump(2) + "\n";
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << text;
  }
};

Json report(const std::string& command, const Network& net, Json body) {
  body["command"] = command;
  body["version"] = kVersion;
  body["fingerprint"] = fingerprint(net);
  return body;
}

/// Loads a network and rejects it (exit 1) when it is not abelian.
Network load_valid(const std::string& path) {
  auto net = load_network(path);
  const auto vs = validate_abelian(net);
  if (!vs.empty()) throw InvalidArgument(path + ": network is not abelian (" + std::to_string(vs.size()) +
                                         " violations; run 'abnet validate')");
  return net;
}

StateTuple load_state(const Network& net, const std::string& path) {
  return path.empty() ? net.initial_state() : state_from_json(net, read_json_file(path));
}

int cmd_validate(const std::string& path, const Output& out) {
  const auto net = load_network(path);
  const auto vs = validate_abelian(net);
  out.write(report("validate", net, {{"valid", vs.empty()}, {"violations", violations_to_json(vs)}}));
  return vs.empty() ? kExitOk : kExitFail;
}

int cmd_analyze(const std::string& path, const std::string& state, bool debug, const Output& out) {
  const auto net = load_valid(path);
  out.write(report("analyze", net, analyze_report(net, load_state(net, state), debug)));
  return kExitOk;
}

struct RunArgs {
  std::string input;
  std::size_t max_rounds = kDefaultMaxRounds;
  std::uint64_t max_steps = kDefaultMaxSteps;
  bool use_amplifier = false;
};

int cmd_run(const std::string& path, const RunArgs& a, const Output& out) {
  const auto net = load_valid(path);
  const auto cfg = a.input.empty() ? net.empty_config(net.initial_state()) : input_from_json(net, read_json_file(a.input));
  HaltOptions opts;
  opts.max_rounds = a.max_rounds;
  if (a.use_amplifier) {
    const auto hv = halts_on_all_inputs(net, cfg.state);
    if (const auto* amp = std::get_if<Amplifier>(&hv.evidence)) opts.amplifier = *amp;
  }
  const auto verdict = halt_on_input(net, cfg, opts);
  Json body = input_verdict_to_json(net, verdict);
  body["input"] = config_to_json(net, cfg);

  // Replay halting runs by direct simulation when they fit the step budget.
  if (const auto* h = std::get_if<Halts>(&verdict.outcome)) {
    Int total = 0;
    for (const auto& c : h->odometer) total += c;
    if (total <= a.max_steps) {
      RunOptions ro;
      ro.max_steps = a.max_steps;
      const auto sim = run_to_completion(net, cfg, ro);
      const auto* rec = std::get_if<ExecRecord>(&sim);
      if (!rec || rec->odometer != h->odometer || rec->final != h->final)
        throw InternalInconsistency("simulation disagrees with the round-based verdict");
      body["simulation_checked"] = true;
    } else {
      body["simulation_checked"] = false;
    }
  }
  out.write(report("run", net, std::move(body)));
  if (verdict.halts()) return kExitOk;
  return verdict.never_halts() ? kExitNeverHalts : kExitInconclusive;
}

int cmd_components(const std::string& path, const std::string& state, const Output& out) {
  const auto net = load_valid(path);
  out.write(report("components", net, components_report(net, load_state(net, state))));
  return kExitOk;
}

int cmd_monoid(const std::string& path, const Output& out) {
  const auto net = load_network(path);
  out.write(report("monoid", net, monoid_report(net)));
  return kExitOk;
}

/// Matrix file: either a bare array of rows or {"L": rows, "names"?: [...], "name"?: str}.
int cmd_build_topp(const std::string& path, const Output& out) {
  const auto j = read_json_file(path);
  std::vector<std::string> names;
  std::string name = "topp";
  IntMatrix l;
  if (j.is_array()) {
    l = int_matrix_from_json(j);
  } else {
    l = int_matrix_from_json(detail::field(j, "L", "matrix"), "matrix.L");
    if (j.contains("names")) names = detail::strings_of(j["names"], "matrix.names");
    if (j.contains("name")) name = detail::string_of(j["name"], "matrix.name");
  }
  out.write(network_to_json(build_toppling(l, names, name)));
  return kExitOk;
}

int cmd_build_graph(const std::string& kind, const std::string& path, const Output& out) {
  const auto g = graph_from_json(read_json_file(path));
  out.write(network_to_json(kind == "sand" ? build_sandpile(g) : build_rotor(g)));
  return kExitOk;
}

int cmd_sandpilize(const std::string& path, const std::string& state, const Output& out) {
  const auto net = load_valid(path);
  out.write(network_to_json(sandpilize(net, load_state(net, state))));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abelian network analysis: validation, invariants, halting certificates, builders"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Output out;
  std::string path, state, input, matrix, graph;
  bool debug = false;
  RunArgs run;

  auto add_output = [&](CLI::App* c) { c->add_option("-o,--output", out.path, "Write JSON here instead of stdout"); };
  auto add_network = [&](CLI::App* c) { c->add_option("network", path, "Network JSON file")->required(); };
  auto add_state = [&](CLI::App* c) { c->add_option("--state", state, "State JSON file {vertex: label}"); };

  auto* validate = app.add_subcommand("validate", "Check the abelian axioms");
  add_network(validate);
  add_output(validate);

  auto* analyze = app.add_subcommand("analyze", "Kernel, production matrix, Laplacian and halting verdict");
  add_network(analyze);
  add_state(analyze);
  analyze->add_flag("--debug-all-minors", debug, "Also check all principal minors and semipositivity");
  add_output(analyze);

  auto* runc = app.add_subcommand("run", "Decide halting on one input");
  add_network(runc);
  runc->add_option("--input", run.input, "Input JSON file {state?, letters}");
  runc->add_option("--max-rounds", run.max_rounds, "Round budget")->check(CLI::NonNegativeNumber);
  runc->add_option("--max-steps", run.max_steps, "Step budget for the simulation cross-check");
  runc->add_flag("--use-amplifier", run.use_amplifier, "Use the amplifier threshold when one exists");
  add_output(runc);

  auto* components = app.add_subcommand("components", "Local and strong components");
  add_network(components);
  add_state(components);
  add_output(components);

  auto* monoid = app.add_subcommand("monoid", "Transition monoid structure per vertex");
  add_network(monoid);
  add_output(monoid);

  auto* build = app.add_subcommand("build", "Construct a toppling, sandpile or rotor network");
  build->require_subcommand(1);
  auto* topp = build->add_subcommand("topp", "Toppling network from a Laplacian");
  topp->add_option("--matrix", matrix, "Matrix JSON file")->required();
  add_output(topp);
  auto* sand = build->add_subcommand("sand", "Sandpile network of a graph");
  sand->add_option("--graph", graph, "Graph JSON file")->required();
  add_output(sand);
  auto* rotor = build->add_subcommand("rotor", "Rotor network of a graph");
  rotor->add_option("--graph", graph, "Graph JSON file")->required();
  add_output(rotor);

  auto* sandp = app.add_subcommand("sandpilize", "Sandpilization at a state");
  add_network(sandp);
  add_state(sandp);
  add_output(sandp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*validate) return cmd_validate(path, out);
    if (*analyze) return cmd_analyze(path, state, debug, out);
    if (*runc) return cmd_run(path, run, out);
    if (*components) return cmd_components(path, state, out);
    if (*monoid) return cmd_monoid(path, out);
    if (*topp) return cmd_build_topp(matrix, out);
    if (*sand) return cmd_build_graph("sand", graph, out);
    if (*rotor) return cmd_build_graph("rotor", graph, out);
    if (*sandp) return cmd_sandpilize(path, state, out);
  } catch (const ParseError& e) {
    std::cerr << "abnet: parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "abnet: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitFail;
}
